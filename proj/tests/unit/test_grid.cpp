#include <doctest.h>

#include <cmath>
#include <random>

#include "evoml/analytics.hpp"
#include "evoml/error.hpp"
#include "support.hpp"

using namespace evoml;
using namespace evoml::testing;

namespace {

const std::vector<MetricId> kBalanced = metrics_in(MetricGroup::Balanced);

std::vector<const EvaluatedModel*> ptrs(const std::vector<EvaluatedModel>& models) {
  std::vector<const EvaluatedModel*> out;
  for (const auto& m : models) out.push_back(&m);
  return out;
}

std::vector<EvaluatedModel> random_models(const Dataset& d, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EvaluatedModel> out;
  for (int i = 0; i < count; ++i) {
    const auto a = kAllAlgorithms[static_cast<std::size_t>(i) % kAllAlgorithms.size()];
    out.push_back(model_with(std::string(to_string(a)) + std::to_string(i), a, random_proba(d.size(), rng), d.labels, kBalanced));
  }
  return out;
}

double objective(const Matrix& pts, const Matrix& centroids, const std::vector<int>& assignment) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) total += (pts.row(i) - centroids.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

}  // namespace

TEST_CASE("k-means objective never increases") {
  Rng rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix pts(80, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      for (Eigen::Index c = 0; c < 3; ++c) pts(i, c) = g(rng) + (i % 4) * 2.0;
    }
    const auto r = kmeans(pts, 6, static_cast<std::uint64_t>(trial));
    REQUIRE_FALSE(r.objective_history.empty());
    for (std::size_t s = 1; s < r.objective_history.size(); ++s) {
      CHECK(r.objective_history[s] <= r.objective_history[s - 1] + 1e-9);
    }
    REQUIRE(r.assignment.size() == 80);
    for (int a : r.assignment) CHECK((a >= 0 && a < 6));
    // Every point sits with its nearest centroid.
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double own = (pts.row(i) - r.centroids.row(r.assignment[static_cast<std::size_t>(i)])).squaredNorm();
      for (Eigen::Index c = 0; c < 6; ++c) CHECK(own <= (pts.row(i) - r.centroids.row(c)).squaredNorm() + 1e-9);
    }
    CHECK(objective(pts, r.centroids, r.assignment) == doctest::Approx(r.objective_history.back()));
    CHECK(kmeans(pts, 6, static_cast<std::uint64_t>(trial)).assignment == r.assignment);
  }
}

TEST_CASE("k-means edge cases") {
  Matrix pts(5, 2);
  pts << 0, 0, 1, 0, 0, 1, 1, 1, 5, 5;
  CHECK_THROWS_AS(kmeans(pts, 6, 0), Error);
  CHECK_THROWS_AS(kmeans(pts, 0, 0), Error);
  const auto full = kmeans(pts, 5, 0);
  CHECK(full.objective_history.back() == doctest::Approx(0.0));
  // Three distinct locations cannot fill five clusters without reseeding.
  Matrix dup(9, 2);
  for (Eigen::Index i = 0; i < 9; ++i) dup.row(i) << static_cast<double>(i % 3), 0.0;
  const auto r = kmeans(dup, 5, 3);
  CHECK(r.objective_history.back() == doctest::Approx(0.0));
  for (int a : r.assignment) CHECK((a >= 0 && a < 5));
}

TEST_CASE("clustering threshold") {
  CHECK_FALSE(grid_needs_clustering(blobs(168, 100, 2, 2.0, 1)));
  CHECK(grid_needs_clustering(blobs(169, 10, 2, 2.0, 1)));
  CHECK(grid_needs_clustering(blobs(10, 169, 2, 2.0, 1)));
}

TEST_CASE("small datasets get one cell per instance") {
  const auto d = blobs(168, 40, 3, 2.0, 2);
  const auto models = random_models(d, 8, 3);
  const auto all = ptrs(models);
  const auto g = build_grid(d, all, all, 0);
  CHECK_FALSE(g.clustered);
  REQUIRE(g.cell_count() == d.size());
  const auto power = predictive_power(std::span<const EvaluatedModel* const>(all), d);
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const auto& cell = g.cells[c];
    REQUIRE(cell.members.size() == 1);
    const auto i = cell.members[0];
    CHECK(cell.class_label == d.labels[i]);
    CHECK(g.assignment[i] == static_cast<int>(c));
    CHECK(*cell.power.at("all") == doctest::Approx(power[i]));
    for (const auto& [key, diff] : cell.difference) CHECK(std::abs(*diff) < 1e-15);
  }
  // Class 0 first, each class by descending pooled power.
  for (std::size_t c = 1; c < g.cells.size(); ++c) {
    const auto& prev = g.cells[c - 1];
    const auto& cur = g.cells[c];
    CHECK(prev.class_label <= cur.class_label);
    if (prev.class_label == cur.class_label) CHECK(*prev.power.at("all") >= *cur.power.at("all"));
  }
}

TEST_CASE("large datasets are clustered into a hundred cells") {
  const auto d = blobs(169, 60, 3, 2.0, 4);
  const auto models = random_models(d, 6, 5);
  const auto all = ptrs(models);
  const std::vector<const EvaluatedModel*> sel{all[0]};
  const auto g = build_grid(d, all, sel, 7);
  CHECK(g.clustered);
  REQUIRE(g.cell_count() == 100);
  std::size_t members = 0;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const auto& cell = g.cells[c];
    members += cell.members.size();
    CHECK(cell.class_counts[0] + cell.class_counts[1] == cell.members.size());
    for (auto i : cell.members) CHECK(g.assignment[i] == static_cast<int>(c));
    if (cell.members.empty()) continue;
    for (const auto& [key, diff] : cell.difference) {
      if (!diff) continue;
      CHECK(*diff >= -1.0);
      CHECK(*diff <= 1.0);
      CHECK(*diff == doctest::Approx(*cell.selected_power.at(key) - *cell.power.at(key)));
    }
  }
  CHECK(members == d.size());
  for (std::size_t c = 1; c < g.cells.size(); ++c) {
    const auto& a = g.cells[c - 1].power.at("all");
    const auto& b = g.cells[c].power.at("all");
    if (a && b) CHECK(*a >= *b);
    if (!a) CHECK_FALSE(b.has_value());
  }
  CHECK(build_grid(d, all, sel, 7).assignment == g.assignment);
}

TEST_CASE("heart data fits without clustering") {
  const auto d = load_csv(heart_path(), "target");
  const auto models = random_models(d, 3, 9);
  const auto all = ptrs(models);
  const auto g = build_grid(d, all, all, 0);
  CHECK_FALSE(g.clustered);
  CHECK(g.cell_count() == 303);
}

TEST_CASE("grid without models") {
  const auto d = blobs(10, 10, 2, 2.0, 1);
  CHECK_THROWS_AS(build_grid(d, {}, {}, 0), Error);
}

TEST_CASE("panels average the selection") {
  const auto d = blobs(20, 20, 2, 2.0, 1);
  auto models = random_models(d, 6, 11);
  models[0].metric_scores[MetricId::Accuracy] = 0.8;
  models[1].metric_scores[MetricId::Accuracy] = 0.9;
  const auto all = ptrs(models);
  const std::vector<const EvaluatedModel*> pair{all[0], all[1]};
  const auto p = aggregate_panels(all, pair, kBalanced);
  REQUIRE(p.beans.size() == kBalanced.size());
  const auto& acc = p.beans[0];
  CHECK(acc.metric == MetricId::Accuracy);
  CHECK(acc.all_values.size() == 6);
  CHECK(*acc.selection_mean == doctest::Approx(0.85));

  const auto same = aggregate_panels(all, all, kBalanced);
  for (const auto& b : same.beans) CHECK(*b.selection_mean == doctest::Approx(b.all_mean));
  const auto none = aggregate_panels(all, {}, kBalanced);
  for (const auto& b : none.beans) CHECK_FALSE(b.selection_mean.has_value());

  std::size_t dots = 0;
  for (const auto& [alg, entries] : p.beeswarm) {
    dots += entries.size();
    for (std::size_t i = 1; i < entries.size(); ++i) CHECK(entries[i - 1].second >= entries[i].second);
  }
  CHECK(dots == 6);
}
