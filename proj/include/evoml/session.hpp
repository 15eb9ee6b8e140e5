#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evoml/ensemble.hpp"
#include "evoml/evolution.hpp"

namespace evoml {

inline constexpr std::string_view kSessionSchema = "evoml.session/1";

struct SessionSettings {
  std::vector<MetricId> metrics;
  int n = 100;
  int k = 10;
  std::uint64_t seed = 0;

  MetricGroup group() const;
  // Throws EmptySelection, or InvalidArgument for duplicate metrics, n or k.
  void validate() const;
  bool operator==(const SessionSettings&) const = default;
};

// Every metric of the group recommended by the class balance.
SessionSettings default_settings(const Dataset& d);

enum class ActionKind { Settings, Search, Stage, Bucket, Ensemble, AutoEnsemble };

std::string_view to_string(ActionKind k);
std::optional<ActionKind> action_from_string(std::string_view name);

// One recorded mutation. Only the fields of its kind are meaningful.
struct SessionAction {
  ActionKind kind = ActionKind::Search;
  std::optional<SessionSettings> settings;
  std::optional<StagePlan> plan;
  std::vector<std::string> ids;      // bucket additions or ensemble members
  std::vector<std::string> removed;  // bucket removals
  std::size_t max_size = 0;          // auto ensemble bound
};

struct EnsembleOutcome {
  EnsembleSpec spec;
  BestEnsembleRecord best;
};

class Session {
 public:
  Session(std::string id, Dataset data);
  Session(std::string id, Dataset data, const SessionSettings& settings);

  const std::string& id() const { return id_; }
  const Dataset& dataset() const { return data_; }
  const SessionSettings& settings() const { return settings_; }
  const Folds& folds() const { return folds_; }
  const std::vector<EvaluatedModel>& models() const { return models_; }
  const ExploredValues& explored() const { return explored_; }
  const std::vector<StageRecord>& stages() const { return stages_; }
  const std::vector<std::string>& bucket() const { return bucket_; }
  const std::vector<EnsembleSpec>& ensembles() const { return ensembles_; }
  const std::optional<BestEnsembleRecord>& best() const { return best_; }
  const std::vector<SessionAction>& actions() const { return actions_; }
  const std::vector<std::string>& search_failures() const { return search_failures_; }
  std::int64_t next_serial() const { return next_serial_; }
  bool searched() const { return searched_; }

  // Metric changes rescore every model and ensemble. n, k and seed are fixed
  // once the random search has run (Conflict).
  void configure(const SessionSettings& settings);

  // Stage S0. Conflict when already run.
  void run_search(unsigned workers, const ProgressFn& progress = {});

  // Next evolution stage; the plan's stage number is assigned here.
  const StageRecord& run_stage(StagePlan plan, unsigned workers, const ProgressFn& progress = {});
  int next_stage() const { return static_cast<int>(stages_.size()) + 1; }
  StagePlan default_plan() const { return StagePlan::defaults(next_stage(), settings_.n); }

  // Models of the latest stage that are not in the voting bucket.
  std::vector<EvaluatedModel> stage_pool() const;

  // Throws UnknownModelId; additions keep first-insertion order.
  void update_bucket(std::span<const std::string> add, std::span<const std::string> remove);

  EnsembleOutcome evaluate_ensemble(std::span<const std::string> ids);
  // Greedy composition over the whole pool; every accepted step is recorded
  // in the ensemble history.
  GreedyResult auto_ensemble(std::size_t max_size);

  const EvaluatedModel* find(const std::string& model_id) const;
  // Throws UnknownModelId.
  std::vector<const EvaluatedModel*> resolve(std::span<const std::string> ids) const;
  std::vector<const EvaluatedModel*> all_models() const;
  // Models generated in `stage` (0 = random search), or all when empty.
  std::vector<const EvaluatedModel*> models_at(std::optional<int> stage) const;
  ModelIndex index() const;

  void apply(const SessionAction& action, unsigned workers, const ProgressFn& progress = {});

  friend std::string save_session(const Session& s);
  friend Session load_session(std::string_view document);

 private:
  void rebuild_index();
  void record_ensemble(const EnsembleSpec& spec);

  std::string id_;
  Dataset data_;
  SessionSettings settings_;
  Folds folds_;
  std::vector<EvaluatedModel> models_;
  std::map<std::string, std::size_t> positions_;
  ExploredValues explored_;
  std::int64_t next_serial_ = 0;
  bool searched_ = false;
  std::vector<std::string> search_failures_;
  std::vector<StageRecord> stages_;
  std::vector<std::string> bucket_;
  std::vector<EnsembleSpec> ensembles_;
  std::optional<BestEnsembleRecord> best_;
  std::vector<SessionAction> actions_;
};

// Compact JSON terminated by a newline. save(load(save(s))) == save(s).
std::string save_session(const Session& s);
// Throws ParseError (with line and column) or VersionMismatch.
Session load_session(std::string_view document);

using ReplayObserver = std::function<void(const Session&, const SessionAction&)>;

// Re-executes the recorded actions on a fresh session over the same data.
Session replay(const Session& s, unsigned workers, const ReplayObserver& observer = {});

}  // namespace evoml
