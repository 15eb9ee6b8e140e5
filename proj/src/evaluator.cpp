#include "evoml/evaluator.hpp"

#include <algorithm>
#include <set>

#include "evoml/error.hpp"
#include "evoml/learners.hpp"
#include "evoml/random.hpp"

namespace evoml {

double overall_performance(const MetricScores& scores, std::span<const MetricId> selected) {
  if (selected.empty()) throw Error(ErrorCode::EmptySelection, "no metrics selected");
  double total = 0.0;
  for (auto m : selected) {
    auto it = scores.find(m);
    if (it == scores.end()) {
      throw Error(ErrorCode::InvalidArgument, "missing score for " + std::string(to_string(m)));
    }
    total += normalize(m, it->second);
  }
  return total / static_cast<double>(selected.size());
}

void validate_selection(std::span<const MetricId> selected) {
  if (selected.empty()) throw Error(ErrorCode::EmptySelection, "select at least one metric");
  std::set<MetricId> unique(selected.begin(), selected.end());
  if (unique.size() != selected.size()) throw Error(ErrorCode::InvalidArgument, "duplicate metric in selection");
  const auto group = group_of(selected.front());
  for (auto m : selected) {
    if (group_of(m) != group) throw Error(ErrorCode::InvalidArgument, "metrics must come from one group");
  }
}

MetricScores score_all(std::span<const int> y_true, const ProbaMatrix& proba) {
  const auto pred = threshold_predictions(proba);
  MetricScores out;
  for (auto m : kAllMetrics) out[m] = score_with_labels(m, y_true, pred, proba);
  return out;
}

EvaluatedModel evaluate(const ModelConfig& config, const Dataset& d, const Folds& folds,
                        std::span<const MetricId> selected, std::uint64_t seed) {
  validate_selection(selected);
  if (folds.assignment.size() != d.size()) throw Error(ErrorCode::ShapeMismatch, "folds do not match dataset");
  EvaluatedModel result;
  result.config = config;
  result.oof_proba = ProbaMatrix::Constant(static_cast<Eigen::Index>(d.size()), 2, -1.0);
  for (int f = 0; f < folds.k; ++f) {
    const auto train_rows = folds.train_indices(f);
    const auto test_rows = folds.test_indices(f);
    if (test_rows.empty()) continue;
    try {
      const Matrix X = take_rows(d.features, train_rows);
      const auto y = take(d.labels, train_rows);
      const auto model = train(config, X, y, derive_seed(seed, static_cast<std::uint64_t>(f)));
      const ProbaMatrix p = model->predict_proba(take_rows(d.features, test_rows));
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        result.oof_proba.row(static_cast<Eigen::Index>(test_rows[i])) = p.row(static_cast<Eigen::Index>(i));
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::EvaluationFailed,
                  config.id + " fold " + std::to_string(f) + ": " + e.what());
    }
  }
  result.metric_scores = score_all(d.labels, result.oof_proba);
  result.overall = overall_performance(result.metric_scores, selected);
  return result;
}

std::vector<double> predictive_power(std::span<const EvaluatedModel* const> models, const Dataset& d) {
  if (models.empty()) throw Error(ErrorCode::EmptySet, "no models for predictive power");
  std::vector<double> power(d.size(), 0.0);
  for (const auto* m : models) {
    for (std::size_t i = 0; i < d.size(); ++i) power[i] += m->oof_proba(static_cast<Eigen::Index>(i), d.labels[i]);
  }
  for (auto& p : power) p /= static_cast<double>(models.size());
  return power;
}

std::vector<double> predictive_power(std::span<const EvaluatedModel> models, const Dataset& d) {
  std::vector<const EvaluatedModel*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  return predictive_power(std::span<const EvaluatedModel* const>(ptrs), d);
}

}  // namespace evoml
