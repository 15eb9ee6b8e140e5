#include "evoml/session.hpp"

#include <algorithm>

#include "evoml/error.hpp"
#include "evoml/wire.hpp"

namespace evoml {

MetricGroup SessionSettings::group() const {
  return metrics.empty() ? MetricGroup::Balanced : group_of(metrics.front());
}

void SessionSettings::validate() const {
  validate_selection(metrics);
  if (n < kMinModelsPerAlgorithm || n > kMaxModelsPerAlgorithm) {
    throw Error(ErrorCode::InvalidArgument, "n must lie in [50, 300]; got " + std::to_string(n));
  }
  if (!is_allowed_fold_count(k)) {
    throw Error(ErrorCode::InvalidArgument, "k must be 5, 10 or 15; got " + std::to_string(k));
  }
}

SessionSettings default_settings(const Dataset& d) {
  SessionSettings s;
  s.metrics = metrics_in(class_balance(d).recommended_group);
  return s;
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Settings: return "settings";
    case ActionKind::Search: return "search";
    case ActionKind::Stage: return "stage";
    case ActionKind::Bucket: return "bucket";
    case ActionKind::Ensemble: return "ensemble";
    case ActionKind::AutoEnsemble: return "auto_ensemble";
  }
  return "search";
}

std::optional<ActionKind> action_from_string(std::string_view name) {
  for (auto k : {ActionKind::Settings, ActionKind::Search, ActionKind::Stage, ActionKind::Bucket, ActionKind::Ensemble,
                 ActionKind::AutoEnsemble}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Session::Session(std::string id, Dataset data) : id_(std::move(id)), data_(std::move(data)) {
  data_.validate();
  settings_ = default_settings(data_);
  folds_ = stratified_kfold(data_, settings_.k, settings_.seed);
}

Session::Session(std::string id, Dataset data, const SessionSettings& settings) : Session(std::move(id), std::move(data)) {
  configure(settings);
}

void Session::configure(const SessionSettings& settings) {
  settings.validate();
  const bool locked_changed =
      settings.n != settings_.n || settings.k != settings_.k || settings.seed != settings_.seed;
  if (searched_ && locked_changed) {
    throw Error(ErrorCode::Conflict, "n, k and seed cannot change after the random search");
  }
  if (settings.k != settings_.k || settings.seed != settings_.seed) {
    folds_ = stratified_kfold(data_, settings.k, settings.seed);
  }
  settings_ = settings;
  for (auto& m : models_) m.overall = overall_performance(m.metric_scores, settings_.metrics);
  best_.reset();
  for (std::size_t i = 0; i < ensembles_.size(); ++i) {
    ensembles_[i].overall = overall_performance(ensembles_[i].pooled_scores, settings_.metrics);
    best_ = update_best(ensembles_[i], static_cast<int>(i), best_);
  }
  SessionAction action;
  action.kind = ActionKind::Settings;
  action.settings = settings_;
  actions_.push_back(std::move(action));
}

void Session::run_search(unsigned workers, const ProgressFn& progress) {
  if (searched_) throw Error(ErrorCode::Conflict, "the random search has already run");
  SearchContext ctx{data_, folds_, settings_.metrics, settings_.seed, workers, progress};
  auto result = run_random_search(settings_.n, ctx);
  models_ = std::move(result.batch.models);
  search_failures_ = std::move(result.batch.failures);
  explored_ = std::move(result.explored);
  next_serial_ = result.next_serial;
  searched_ = true;
  rebuild_index();
  actions_.push_back({ActionKind::Search, {}, {}, {}, {}, 0});
}

std::vector<EvaluatedModel> Session::stage_pool() const {
  const int latest = static_cast<int>(stages_.size());
  std::vector<EvaluatedModel> pool;
  for (const auto& m : models_) {
    if (m.config.stage != latest) continue;
    if (std::find(bucket_.begin(), bucket_.end(), m.id()) != bucket_.end()) continue;
    pool.push_back(m);
  }
  return pool;
}

const StageRecord& Session::run_stage(StagePlan plan, unsigned workers, const ProgressFn& progress) {
  if (!searched_) throw Error(ErrorCode::Conflict, "run the random search before an evolution stage");
  plan.stage = next_stage();
  plan.validate(settings_.n);
  const auto pool = stage_pool();
  SearchContext ctx{data_, folds_, settings_.metrics, settings_.seed, workers, progress};
  auto explored = explored_;
  auto serial = next_serial_;
  auto outcome = evoml::run_stage(plan, pool, explored, serial, ctx);
  explored_ = std::move(explored);
  next_serial_ = serial;
  for (auto& m : outcome.models) models_.push_back(std::move(m));
  stages_.push_back(std::move(outcome.record));
  rebuild_index();
  SessionAction action;
  action.kind = ActionKind::Stage;
  action.plan = plan;
  actions_.push_back(std::move(action));
  return stages_.back();
}

void Session::update_bucket(std::span<const std::string> add, std::span<const std::string> remove) {
  for (const auto& id : add) {
    if (!find(id)) throw Error(ErrorCode::UnknownModelId, "unknown model id '" + id + "'");
  }
  for (const auto& id : remove) {
    if (!find(id)) throw Error(ErrorCode::UnknownModelId, "unknown model id '" + id + "'");
  }
  for (const auto& id : add) {
    if (std::find(bucket_.begin(), bucket_.end(), id) == bucket_.end()) bucket_.push_back(id);
  }
  for (const auto& id : remove) std::erase(bucket_, id);
  SessionAction action;
  action.kind = ActionKind::Bucket;
  action.ids.assign(add.begin(), add.end());
  action.removed.assign(remove.begin(), remove.end());
  actions_.push_back(std::move(action));
}

void Session::record_ensemble(const EnsembleSpec& spec) {
  best_ = update_best(spec, static_cast<int>(ensembles_.size()), best_);
  ensembles_.push_back(spec);
}

EnsembleOutcome Session::evaluate_ensemble(std::span<const std::string> ids) {
  const auto members = resolve(ids);
  auto spec = evoml::evaluate_ensemble(members, data_, settings_.metrics);
  record_ensemble(spec);
  SessionAction action;
  action.kind = ActionKind::Ensemble;
  action.ids.assign(ids.begin(), ids.end());
  actions_.push_back(std::move(action));
  return {std::move(spec), *best_};
}

GreedyResult Session::auto_ensemble(std::size_t max_size) {
  if (models_.empty()) throw Error(ErrorCode::NoModels, "no evaluated models to compose");
  const auto candidates = all_models();
  auto result = greedy_auto_compose(candidates, max_size, data_, settings_.metrics);
  for (const auto& step : result.steps) record_ensemble(step);
  SessionAction action;
  action.kind = ActionKind::AutoEnsemble;
  action.max_size = max_size;
  actions_.push_back(std::move(action));
  return result;
}

const EvaluatedModel* Session::find(const std::string& model_id) const {
  auto it = positions_.find(model_id);
  return it == positions_.end() ? nullptr : &models_[it->second];
}

std::vector<const EvaluatedModel*> Session::resolve(std::span<const std::string> ids) const {
  std::vector<const EvaluatedModel*> out;
  for (const auto& id : ids) {
    const auto* m = find(id);
    if (!m) throw Error(ErrorCode::UnknownModelId, "unknown model id '" + id + "'");
    out.push_back(m);
  }
  return out;
}

std::vector<const EvaluatedModel*> Session::all_models() const { return models_at(std::nullopt); }

std::vector<const EvaluatedModel*> Session::models_at(std::optional<int> stage) const {
  std::vector<const EvaluatedModel*> out;
  for (const auto& m : models_) {
    if (!stage || m.config.stage == *stage) out.push_back(&m);
  }
  return out;
}

ModelIndex Session::index() const {
  ModelIndex idx;
  for (const auto& m : models_) idx[m.id()] = &m;
  return idx;
}

void Session::rebuild_index() {
  positions_.clear();
  for (std::size_t i = 0; i < models_.size(); ++i) positions_[models_[i].id()] = i;
}

void Session::apply(const SessionAction& action, unsigned workers, const ProgressFn& progress) {
  switch (action.kind) {
    case ActionKind::Settings:
      if (!action.settings) throw Error(ErrorCode::InvalidArgument, "settings action without settings");
      configure(*action.settings);
      break;
    case ActionKind::Search:
      run_search(workers, progress);
      break;
    case ActionKind::Stage:
      run_stage(action.plan ? *action.plan : default_plan(), workers, progress);
      break;
    case ActionKind::Bucket:
      update_bucket(action.ids, action.removed);
      break;
    case ActionKind::Ensemble:
      evaluate_ensemble(action.ids);
      break;
    case ActionKind::AutoEnsemble:
      auto_ensemble(action.max_size);
      break;
  }
}

namespace {

Json settings_json(const SessionSettings& s) {
  return {{"metrics", to_json(std::span<const MetricId>(s.metrics))},
          {"group", to_string(s.group())},
          {"n", s.n},
          {"k", s.k},
          {"seed", s.seed}};
}

SessionSettings settings_from(const Json& j) {
  SessionSettings s;
  s.metrics = metrics_from_json(require(j, "metrics"));
  s.n = require(j, "n").get<int>();
  s.k = require(j, "k").get<int>();
  s.seed = require(j, "seed").get<std::uint64_t>();
  return s;
}

Json action_json(const SessionAction& a) {
  Json out = {{"type", to_string(a.kind)}};
  switch (a.kind) {
    case ActionKind::Settings: out["settings"] = settings_json(*a.settings); break;
    case ActionKind::Stage: out["plan"] = to_json(*a.plan); break;
    case ActionKind::Bucket: out["add"] = a.ids; out["remove"] = a.removed; break;
    case ActionKind::Ensemble: out["ids"] = a.ids; break;
    case ActionKind::AutoEnsemble: out["max_size"] = a.max_size; break;
    case ActionKind::Search: break;
  }
  return out;
}

SessionAction action_from(const Json& j) {
  SessionAction a;
  const auto type = require(j, "type").get<std::string>();
  const auto kind = action_from_string(type);
  if (!kind) throw Error(ErrorCode::ParseError, "unknown action '" + type + "'");
  a.kind = *kind;
  switch (a.kind) {
    case ActionKind::Settings: a.settings = settings_from(require(j, "settings")); break;
    case ActionKind::Stage: a.plan = plan_from_json(require(j, "plan")); break;
    case ActionKind::Bucket:
      a.ids = string_list(require(j, "add"));
      a.removed = string_list(require(j, "remove"));
      break;
    case ActionKind::Ensemble: a.ids = string_list(require(j, "ids")); break;
    case ActionKind::AutoEnsemble: a.max_size = require(j, "max_size").get<std::size_t>(); break;
    case ActionKind::Search: break;
  }
  return a;
}

// 1-based line and column of a byte offset.
std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::string save_session(const Session& s) {
  Json doc = {{"schema", kSessionSchema}, {"id", s.id_}, {"dataset", to_json(s.data_)}, {"settings", settings_json(s.settings_)}};
  if (s.searched_) {
    Json models = Json::array();
    for (const auto& m : s.models_) models.push_back(to_json(m));
    doc["models"] = std::move(models);
    doc["explored"] = to_json(s.explored_);
    doc["next_serial"] = s.next_serial_;
    doc["search_failures"] = s.search_failures_;
  }
  if (!s.stages_.empty()) {
    Json stages = Json::array();
    for (const auto& r : s.stages_) stages.push_back(to_json(r));
    doc["stages"] = std::move(stages);
  }
  if (!s.bucket_.empty()) doc["bucket"] = s.bucket_;
  if (!s.ensembles_.empty()) {
    Json history = Json::array();
    for (const auto& e : s.ensembles_) history.push_back(to_json(e));
    doc["ensembles"] = {{"history", history}, {"best", to_json(*s.best_)}};
  }
  if (!s.actions_.empty()) {
    Json actions = Json::array();
    for (const auto& a : s.actions_) actions.push_back(action_json(a));
    doc["actions"] = std::move(actions);
  }
  return doc.dump() + "\n";
}

Session load_session(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "malformed session document at " + location(document, e.byte));
  }
  try {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "session document must be an object");
    const auto& schema = require(doc, "schema");
    if (!schema.is_string() || schema.get<std::string>() != kSessionSchema) {
      throw Error(ErrorCode::VersionMismatch,
                  "expected schema " + std::string(kSessionSchema) + ", found " + schema.dump());
    }
    Session s(require(doc, "id").get<std::string>(), dataset_from_json(require(doc, "dataset")));
    s.actions_.clear();
    s.settings_ = settings_from(require(doc, "settings"));
    s.settings_.validate();
    s.folds_ = stratified_kfold(s.data_, s.settings_.k, s.settings_.seed);
    if (auto it = doc.find("models"); it != doc.end()) {
      s.searched_ = true;
      for (const auto& m : *it) s.models_.push_back(model_from_json(m));
      for (const auto& m : s.models_) {
        if (static_cast<std::size_t>(m.oof_proba.rows()) != s.data_.size()) {
          throw Error(ErrorCode::ParseError, "model " + m.id() + " does not cover every instance");
        }
      }
      s.explored_ = explored_from_json(require(doc, "explored"));
      s.next_serial_ = require(doc, "next_serial").get<std::int64_t>();
      s.search_failures_ = string_list(require(doc, "search_failures"));
      s.rebuild_index();
      if (s.positions_.size() != s.models_.size()) throw Error(ErrorCode::ParseError, "duplicate model ids");
    }
    if (auto it = doc.find("stages"); it != doc.end()) {
      for (const auto& r : *it) s.stages_.push_back(stage_record_from_json(r));
    }
    if (auto it = doc.find("bucket"); it != doc.end()) {
      s.bucket_ = string_list(*it);
      s.resolve(s.bucket_);
    }
    if (auto it = doc.find("ensembles"); it != doc.end()) {
      for (const auto& e : require(*it, "history")) s.ensembles_.push_back(ensemble_from_json(e));
      s.best_ = best_from_json(require(*it, "best"));
    }
    if (auto it = doc.find("actions"); it != doc.end()) {
      for (const auto& a : *it) s.actions_.push_back(action_from(a));
    }
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid session document: ") + e.what());
  }
}

Session replay(const Session& s, unsigned workers, const ReplayObserver& observer) {
  Session fresh(s.id(), s.dataset());
  for (const auto& action : s.actions()) {
    fresh.apply(action, workers);
    if (observer) observer(fresh, action);
  }
  return fresh;
}

}  // namespace evoml
