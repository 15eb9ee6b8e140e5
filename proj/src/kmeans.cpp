#include <algorithm>
#include <limits>
#include <numeric>

#include "evoml/analytics.hpp"
#include "evoml/error.hpp"
#include "evoml/random.hpp"

namespace evoml {
namespace {

// Assigns each point to its nearest centroid (lowest index on ties) and
// returns the summed squared distance.
double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment, std::vector<double>& dist) {
  double objective = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    assignment[static_cast<std::size_t>(i)] = arg;
    dist[static_cast<std::size_t>(i)] = best;
    objective += best;
  }
  return objective;
}

Matrix plus_plus_init(const Matrix& points, int k, Rng& rng) {
  const auto n = points.rows();
  Matrix centroids(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= d2[static_cast<std::size_t>(i)];
        if (u <= 0.0) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = first(rng);
    }
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations) {
  const auto n = points.rows();
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, point count]");
  Rng rng(seed);
  KMeansResult result;
  result.centroids = plus_plus_init(points, k, rng);
  result.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> previous;
  std::vector<double> dist(static_cast<std::size_t>(n));

  for (int it = 0; it < max_iterations; ++it) {
    result.objective_history.push_back(assign(points, result.centroids, result.assignment, dist));
    result.iterations = it + 1;
    if (result.assignment == previous) break;
    previous = result.assignment;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = result.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    std::vector<std::size_t> by_distance(static_cast<std::size_t>(n));
    std::iota(by_distance.begin(), by_distance.end(), 0);
    std::stable_sort(by_distance.begin(), by_distance.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    std::size_t next_far = 0;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        result.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else if (next_far < by_distance.size()) {
        result.centroids.row(c) = points.row(static_cast<Eigen::Index>(by_distance[next_far++]));
      }
    }
  }
  return result;
}

}  // namespace evoml
