#pragma once

#include <random>
#include <string>
#include <vector>

#include "evoml/dataset.hpp"
#include "evoml/evaluator.hpp"
#include "evoml/random.hpp"

namespace evoml::testing {

// Two Gaussian blobs in `features` dimensions; class c centred at c * separation.
inline Dataset blobs(std::size_t per_class0, std::size_t per_class1, int features, double separation,
                     std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  const auto n = per_class0 + per_class1;
  d.features.resize(static_cast<Eigen::Index>(n), features);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = i < per_class0 ? 0 : 1;
    d.labels.push_back(cls);
    for (int f = 0; f < features; ++f) {
      d.features(static_cast<Eigen::Index>(i), f) = cls * separation + noise(rng);
    }
  }
  d.class_names = {"neg", "pos"};
  for (int f = 0; f < features; ++f) d.feature_names.push_back("x" + std::to_string(f));
  d.label_name = "y";
  return d;
}

inline ProbaMatrix random_proba(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProbaMatrix p(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = u(rng);
    p(static_cast<Eigen::Index>(i), 0) = 1.0 - p1;
    p(static_cast<Eigen::Index>(i), 1) = p1;
  }
  return p;
}

inline std::vector<int> random_labels(std::size_t n, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> y(n);
  for (auto& v : y) v = coin(rng) ? 1 : 0;
  return y;
}

// An evaluated model assembled directly from its out-of-fold matrix.
inline EvaluatedModel model_with(const std::string& id, Algorithm a, const ProbaMatrix& proba,
                                 const std::vector<int>& labels, std::span<const MetricId> selected) {
  EvaluatedModel m;
  m.config.id = id;
  m.config.algorithm = a;
  m.oof_proba = proba;
  m.metric_scores = score_all(labels, proba);
  m.overall = overall_performance(m.metric_scores, selected);
  return m;
}

inline std::string heart_path() { return std::string(EVOML_TEST_DATA) + "/heart.csv"; }

}  // namespace evoml::testing
