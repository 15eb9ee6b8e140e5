#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "evoml/dataset.hpp"
#include "evoml/hyperparams.hpp"
#include "evoml/metrics.hpp"

namespace evoml {

using MetricScores = std::map<MetricId, double>;

struct EvaluatedModel {
  ModelConfig config;
  MetricScores metric_scores;  // all eight metrics on the pooled out-of-fold predictions
  ProbaMatrix oof_proba;       // one row per dataset instance
  double overall = 0.0;        // over the selected metrics

  const std::string& id() const { return config.id; }
};

// Mean over `selected` of the normalized scores. Throws EmptySelection.
double overall_performance(const MetricScores& scores, std::span<const MetricId> selected);

// Throws InvalidArgument unless `selected` is non-empty, duplicate free and
// drawn from a single metric group.
void validate_selection(std::span<const MetricId> selected);

MetricScores score_all(std::span<const int> y_true, const ProbaMatrix& proba);

// k-fold cross-validation; fold f's model is trained on every instance outside
// f with seed derive_seed(seed, f). Training failures surface as
// EvaluationFailed naming the fold.
EvaluatedModel evaluate(const ModelConfig& config, const Dataset& d, const Folds& folds,
                        std::span<const MetricId> selected, std::uint64_t seed);

// power(i) = mean over models of oof_proba[i][true class]. Throws EmptySet.
std::vector<double> predictive_power(std::span<const EvaluatedModel* const> models, const Dataset& d);
std::vector<double> predictive_power(std::span<const EvaluatedModel> models, const Dataset& d);

}  // namespace evoml
