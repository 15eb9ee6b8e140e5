#include "evoml/ensemble.hpp"

#include <algorithm>
#include <limits>

#include "evoml/error.hpp"

namespace evoml {
namespace {

std::vector<int> argmax_labels(const ProbaMatrix& p) {
  std::vector<int> labels(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) labels[static_cast<std::size_t>(i)] = p(i, 1) > p(i, 0) ? 1 : 0;
  return labels;
}

double overall_for(const ProbaMatrix& averaged, const Dataset& d, std::span<const MetricId> selected) {
  const auto labels = argmax_labels(averaged);
  MetricScores scores;
  for (auto m : selected) scores[m] = score_with_labels(m, d.labels, labels, averaged);
  return overall_performance(scores, selected);
}

}  // namespace

std::vector<const EvaluatedModel*> resolve_ids(std::span<const std::string> ids, const ModelIndex& index) {
  std::vector<const EvaluatedModel*> out;
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::UnknownModelId, id);
    out.push_back(it->second);
  }
  return out;
}

SoftVote soft_vote(std::span<const EvaluatedModel* const> members) {
  if (members.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble has no members");
  SoftVote vote;
  vote.averaged = ProbaMatrix::Zero(members.front()->oof_proba.rows(), 2);
  for (const auto* m : members) {
    if (m->oof_proba.rows() != vote.averaged.rows()) {
      throw Error(ErrorCode::ShapeMismatch, m->id() + " was evaluated on a different dataset");
    }
    vote.averaged += m->oof_proba;
  }
  vote.averaged /= static_cast<double>(members.size());
  vote.labels = argmax_labels(vote.averaged);
  return vote;
}

EnsembleSpec evaluate_ensemble(std::span<const EvaluatedModel* const> members, const Dataset& d,
                               std::span<const MetricId> selected) {
  const auto vote = soft_vote(members);
  if (static_cast<std::size_t>(vote.averaged.rows()) != d.size()) {
    throw Error(ErrorCode::ShapeMismatch, "ensemble members do not match dataset size");
  }
  EnsembleSpec spec;
  for (const auto* m : members) spec.model_ids.push_back(m->id());
  for (auto m : kAllMetrics) {
    spec.pooled_scores[m] = score_with_labels(m, d.labels, vote.labels, vote.averaged);
    spec.per_class_scores[m] = {score_for_class(m, 0, d.labels, vote.labels, vote.averaged),
                                score_for_class(m, 1, d.labels, vote.labels, vote.averaged)};
  }
  spec.overall = overall_performance(spec.pooled_scores, selected);
  return spec;
}

EnsembleSpec evaluate_ensemble(std::span<const std::string> ids, const ModelIndex& index, const Dataset& d,
                               std::span<const MetricId> selected) {
  const auto members = resolve_ids(ids, index);
  return evaluate_ensemble(members, d, selected);
}

BestEnsembleRecord update_best(const EnsembleSpec& active, int ordinal, const std::optional<BestEnsembleRecord>& best) {
  if (!best || active.overall > best->spec.overall) return {active, ordinal};
  return *best;
}

GreedyResult greedy_auto_compose(std::span<const EvaluatedModel* const> candidates, std::size_t max_size,
                                 const Dataset& d, std::span<const MetricId> selected) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyEnsemble, "no candidates");
  if (max_size < 1) throw Error(ErrorCode::InvalidArgument, "max_size must be >= 1");
  validate_selection(selected);

  std::vector<const EvaluatedModel*> chosen;
  std::vector<bool> used(candidates.size(), false);
  ProbaMatrix sum = ProbaMatrix::Zero(static_cast<Eigen::Index>(d.size()), 2);
  double current = -std::numeric_limits<double>::infinity();
  GreedyResult result;

  while (chosen.size() < max_size) {
    std::optional<std::size_t> pick;
    double pick_overall = current;
    const double k = static_cast<double>(chosen.size() + 1);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      const ProbaMatrix averaged = (sum + candidates[c]->oof_proba) / k;
      const double value = overall_for(averaged, d, selected);
      if (value > pick_overall) {
        pick_overall = value;
        pick = c;
      }
    }
    if (!pick) break;
    used[*pick] = true;
    chosen.push_back(candidates[*pick]);
    sum += candidates[*pick]->oof_proba;
    current = pick_overall;
    result.steps.push_back(evaluate_ensemble(chosen, d, selected));
  }
  result.spec = result.steps.back();
  return result;
}

}  // namespace evoml
