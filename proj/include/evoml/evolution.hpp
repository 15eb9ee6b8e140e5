#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoml/evaluator.hpp"
#include "evoml/hyperparams.hpp"

namespace evoml {

inline constexpr int kMinModelsPerAlgorithm = 50;
inline constexpr int kMaxModelsPerAlgorithm = 300;
inline constexpr double kExploredTolerance = 1e-6;
inline constexpr int kMutationAttempts = 100;

// Primary-hyperparameter values already used, per algorithm.
class ExploredValues {
 public:
  // Reals match within kExploredTolerance; everything else exactly.
  bool contains(Algorithm a, const ParamValue& v) const;
  void add(Algorithm a, const ParamValue& v);
  const std::vector<ParamValue>& values(Algorithm a) const;

  static ExploredValues from_configs(std::span<const ModelConfig> configs);

  bool operator==(const ExploredValues&) const = default;

 private:
  std::map<Algorithm, std::vector<ParamValue>> values_;
};

struct StagePlan {
  int stage = 1;
  std::map<Algorithm, int> crossover_count;
  std::map<Algorithm, int> mutation_count;

  // Both counts default to n/2 for every algorithm.
  static StagePlan defaults(int stage, int n);
  // Throws InvalidArgument when a count leaves [0, n/2].
  void validate(int n) const;
  int crossover(Algorithm a) const;
  int mutation(Algorithm a) const;
};

enum class PathDirection { Over, Under };

struct PathStat {
  int better = 0;  // overperformers for Over, underperformers for Under
  int total = 0;
  PathDirection direction = PathDirection::Under;

  double fraction() const { return total == 0 ? 0.0 : static_cast<double>(better) / total; }
};

struct StageRecord {
  StagePlan plan;
  std::map<Algorithm, std::vector<std::string>> parent_ids;
  std::map<Algorithm, std::map<Origin, std::vector<std::string>>> child_ids;
  std::map<Algorithm, std::map<Origin, PathStat>> path_stats;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
};

// Fraction in [0,1] of the current job's evaluations that have finished.
using ProgressFn = std::function<void(double)>;

struct SearchContext {
  const Dataset& data;
  const Folds& folds;
  std::vector<MetricId> selected;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  ProgressFn progress;
};

struct EvaluationBatch {
  std::vector<EvaluatedModel> models;  // successful, in config order
  std::vector<std::string> failures;   // "id: reason"
};

// Evaluates configs with per-model seeds derive_seed(master, id). Failed
// models are recorded and skipped.
EvaluationBatch evaluate_batch(std::span<const ModelConfig> configs, const SearchContext& ctx);

struct RandomSearchResult {
  EvaluationBatch batch;
  ExploredValues explored;
  std::int64_t next_serial = 0;
};

// Stage S0: n configs per algorithm, ids serial from `first_serial` in
// algorithm order (KNN0..KNN{n-1}, LR{n}.., ...).
std::vector<ModelConfig> sample_random_search(int n, std::uint64_t master_seed, std::int64_t first_serial = 0);
RandomSearchResult run_random_search(int n, const SearchContext& ctx);

// Categorical dimensions copy one parent, chosen uniformly; numeric ones blend
// lambda*a + (1-lambda)*b with lambda ~ U[0,1] per dimension (or the forced
// value) and round into the domain.
ModelConfig crossover(const ModelConfig& a, const ModelConfig& b, Rng& rng, int stage, std::string id,
                      std::optional<double> forced_lambda = std::nullopt);

// Replaces the primary dimension with an unexplored value and records it.
// Throws SpaceExhausted.
ModelConfig mutate(const ModelConfig& parent, ExploredValues& explored, Rng& rng, int stage, std::string id);

struct StageOutcome {
  StageRecord record;
  std::vector<EvaluatedModel> models;
};

// Generates children per algorithm (crossover first, then mutation) from
// `pool`, evaluates them, and scores each path against the pool's
// same-algorithm overall range. Throws InsufficientParents.
StageOutcome run_stage(const StagePlan& plan, std::span<const EvaluatedModel> pool, ExploredValues& explored,
                       std::int64_t& next_serial, const SearchContext& ctx);

// Child generation only, without evaluation.
struct StageDraft {
  StageRecord record;
  std::vector<ModelConfig> children;
};
StageDraft draft_stage(const StagePlan& plan, std::span<const EvaluatedModel> pool, ExploredValues& explored,
                       std::int64_t& next_serial, std::uint64_t master_seed);

PathStat path_stat(std::span<const double> child_overall, double reference_max, double reference_min);

}  // namespace evoml
