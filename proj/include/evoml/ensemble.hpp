#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoml/evaluator.hpp"

namespace evoml {

using ModelIndex = std::map<std::string, const EvaluatedModel*>;

// Throws UnknownModelId.
std::vector<const EvaluatedModel*> resolve_ids(std::span<const std::string> ids, const ModelIndex& index);

struct SoftVote {
  ProbaMatrix averaged;
  std::vector<int> labels;  // argmax; an exact 0.5 tie goes to class 0
};

// Throws EmptyEnsemble, or ShapeMismatch when members disagree on instance count.
SoftVote soft_vote(std::span<const EvaluatedModel* const> members);

struct EnsembleSpec {
  std::vector<std::string> model_ids;
  MetricScores pooled_scores;
  std::map<MetricId, std::array<double, 2>> per_class_scores;  // [class 0, class 1]
  double overall = 0.0;
};

EnsembleSpec evaluate_ensemble(std::span<const EvaluatedModel* const> members, const Dataset& d,
                               std::span<const MetricId> selected);
EnsembleSpec evaluate_ensemble(std::span<const std::string> ids, const ModelIndex& index, const Dataset& d,
                               std::span<const MetricId> selected);

struct BestEnsembleRecord {
  EnsembleSpec spec;
  int ordinal = 0;  // position in the session's ensemble history
};

// Replaces the record only on strict improvement of overall; an empty record
// always takes the active ensemble.
BestEnsembleRecord update_best(const EnsembleSpec& active, int ordinal, const std::optional<BestEnsembleRecord>& best);

struct GreedyResult {
  EnsembleSpec spec;
  std::vector<EnsembleSpec> steps;  // one per accepted member, in order
};

// Forward selection from the best singleton, adding whichever candidate most
// improves overall until max_size or no strict improvement remains.
GreedyResult greedy_auto_compose(std::span<const EvaluatedModel* const> candidates, std::size_t max_size,
                                 const Dataset& d, std::span<const MetricId> selected);

}  // namespace evoml
