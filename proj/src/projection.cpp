#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "evoml/analytics.hpp"
#include "evoml/error.hpp"
#include "evoml/random.hpp"

namespace evoml {
namespace {

Matrix pairwise_distances(const Matrix& points) {
  const auto n = points.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
  }
  return d;
}

Projection to_projection(ProjectionMethod method, std::span<const EvaluatedModel* const> models, const Matrix& coords) {
  Projection p;
  p.method = method;
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    p.model_ids.push_back(models[static_cast<std::size_t>(i)]->id());
    p.coords.push_back({coords(i, 0), coords(i, 1)});
  }
  return p;
}

}  // namespace

std::string_view to_string(ProjectionMethod m) { return m == ProjectionMethod::MDS ? "mds" : "tsne"; }

std::optional<ProjectionMethod> projection_from_string(std::string_view name) {
  if (name == "mds") return ProjectionMethod::MDS;
  if (name == "tsne") return ProjectionMethod::TSNE;
  return std::nullopt;
}

Matrix metric_vectors(std::span<const EvaluatedModel* const> models, std::span<const MetricId> selected) {
  Matrix out(static_cast<Eigen::Index>(models.size()), static_cast<Eigen::Index>(selected.size()));
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = 0; j < selected.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          normalize(selected[j], models[i]->metric_scores.at(selected[j]));
    }
  }
  return out;
}

MdsResult classical_mds_from_distances(const Matrix& distances) {
  const auto n = distances.rows();
  if (n != distances.cols()) throw Error(ErrorCode::ShapeMismatch, "distance matrix must be square");
  if (n < 1) throw Error(ErrorCode::TooFewPoints, "MDS needs at least one point");
  const Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix gram = -0.5 * centering * distances.array().square().matrix() * centering;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigendecomposition failed");

  MdsResult result;
  result.eigenvalues = solver.eigenvalues().reverse();
  const double scale = std::max(1.0, std::abs(result.eigenvalues(0)));
  result.coords = Matrix::Zero(n, 2);
  int positive = 0;
  for (int axis = 0; axis < 2 && axis < n; ++axis) {
    const double lambda = result.eigenvalues(axis);
    if (!(lambda > 1e-12 * scale)) break;
    ++positive;
    Vector v = solver.eigenvectors().col(n - 1 - axis);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    result.coords.col(axis) = v * std::sqrt(lambda);
  }
  result.degenerate = positive < 2;

  const Matrix embedded = pairwise_distances(result.coords);
  const double num = (distances - embedded).squaredNorm();
  const double den = distances.squaredNorm();
  result.stress = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return result;
}

MdsResult classical_mds(const Matrix& points) { return classical_mds_from_distances(pairwise_distances(points)); }

PerplexityCalibration calibrate_perplexity(std::span<const double> squared_distances, double perplexity) {
  if (!(perplexity > 0.0)) throw Error(ErrorCode::InvalidArgument, "perplexity must be positive");
  if (squared_distances.empty()) throw Error(ErrorCode::TooFewPoints, "no neighbours to calibrate");
  const double target = std::log(perplexity);
  PerplexityCalibration cal;
  cal.probabilities.resize(squared_distances.size());
  const double d_min = *std::min_element(squared_distances.begin(), squared_distances.end());

  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double beta = 1.0;
  auto evaluate = [&](double b) {
    // Shift by the nearest distance so exp() cannot underflow to all zeros.
    double sum = 0.0, weighted = 0.0;
    for (std::size_t j = 0; j < squared_distances.size(); ++j) {
      const double p = std::exp(-b * (squared_distances[j] - d_min));
      cal.probabilities[j] = p;
      sum += p;
      weighted += p * (squared_distances[j] - d_min);
    }
    for (auto& p : cal.probabilities) p /= sum;
    return std::log(sum) + b * weighted / sum;
  };
  double entropy = evaluate(beta);
  for (int it = 0; it < 500 && std::abs(entropy - target) > 1e-10; ++it) {
    if (entropy > target) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = (beta + lo) / 2.0;
    }
    entropy = evaluate(beta);
  }
  cal.beta = beta;
  cal.entropy = entropy;
  return cal;
}

TsneResult tsne(const Matrix& points, const TsneOptions& options) {
  const auto n = points.rows();
  if (static_cast<double>(n) < 3.0 * options.perplexity) {
    throw Error(ErrorCode::TooFewPoints, "t-SNE needs at least 3*perplexity points; have " + std::to_string(n));
  }
  TsneResult result;

  Matrix P = Matrix::Zero(n, n);
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t at = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row[at++] = (points.row(i) - points.row(j)).squaredNorm();
    }
    const auto cal = calibrate_perplexity(row, options.perplexity);
    result.max_entropy_error = std::max(result.max_entropy_error, std::abs(cal.entropy - std::log(options.perplexity)));
    at = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) P(i, j) = cal.probabilities[at++];
    }
  }
  P = (P + P.transpose()) / (2.0 * static_cast<double>(n));
  P = P.cwiseMax(1e-12);
  P.diagonal().setZero();

  Rng rng(options.seed);
  std::normal_distribution<double> init(0.0, 1e-4);
  Matrix Y(n, 2);
  for (Eigen::Index i = 0; i < Y.size(); ++i) Y.data()[i] = init(rng);
  Matrix velocity = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);
  Matrix num(n, n);
  Matrix grad(n, 2);
  const double learning_rate = options.learning_rate > 0.0
                                   ? options.learning_rate
                                   : std::max(static_cast<double>(n) / options.early_exaggeration / 4.0, 50.0);

  for (int it = 0; it < options.iterations; ++it) {
    const double exaggeration = it < options.exaggeration_iterations ? options.early_exaggeration : 1.0;
    const double momentum = it < options.exaggeration_iterations ? 0.5 : 0.8;
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double q = 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
        num(i, j) = num(j, i) = q;
        z += 2.0 * q;
      }
    }
    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double coeff = (exaggeration * P(i, j) - num(i, j) / z) * num(i, j);
        grad.row(i) += 4.0 * coeff * (Y.row(i) - Y.row(j));
      }
    }
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
      double& g = gains.data()[i];
      const bool same_sign = (grad.data()[i] > 0.0) == (velocity.data()[i] > 0.0);
      g = same_sign ? g * 0.8 : g + 0.2;
      g = std::max(g, 0.01);
      velocity.data()[i] = momentum * velocity.data()[i] - learning_rate * g * grad.data()[i];
      Y.data()[i] += velocity.data()[i];
    }
    Y.rowwise() -= Y.colwise().mean();
  }

  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) z += 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
    }
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = std::max(1e-300, 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm()) / z);
      kl += P(i, j) * std::log(P(i, j) / q);
    }
  }
  result.coords = std::move(Y);
  result.kl_divergence = kl;
  return result;
}

Projection project_mds(std::span<const EvaluatedModel* const> models, std::span<const MetricId> selected) {
  if (models.size() < 3) throw Error(ErrorCode::TooFewPoints, "projection needs at least 3 models");
  const auto mds = classical_mds(metric_vectors(models, selected));
  auto p = to_projection(ProjectionMethod::MDS, models, mds.coords);
  p.diagnostic = mds.stress;
  p.degenerate = mds.degenerate;
  return p;
}

Projection project_tsne(std::span<const EvaluatedModel* const> models, std::span<const MetricId> selected,
                        double perplexity, int iterations, std::uint64_t seed) {
  TsneOptions options;
  options.perplexity = perplexity;
  options.iterations = iterations;
  options.seed = seed;
  const auto result = tsne(metric_vectors(models, selected), options);
  auto p = to_projection(ProjectionMethod::TSNE, models, result.coords);
  p.diagnostic = result.kl_divergence;
  return p;
}

}  // namespace evoml
