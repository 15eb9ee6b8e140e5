#include "evoml/wire.hpp"

#include "evoml/error.hpp"

namespace evoml {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

Algorithm algorithm_of(const Json& j) {
  auto a = algorithm_from_string(j.get<std::string>());
  if (!a) bad("unknown algorithm '" + j.get<std::string>() + "'");
  return *a;
}

Algorithm algorithm_key(const std::string& key) {
  auto a = algorithm_from_string(key);
  if (!a) bad("unknown algorithm '" + key + "'");
  return *a;
}

Origin origin_key(const std::string& key) {
  auto o = origin_from_string(key);
  if (!o) bad("unknown origin '" + key + "'");
  return *o;
}

MetricId metric_key(const std::string& key) {
  auto m = metric_from_string(key);
  if (!m) bad("unknown metric '" + key + "'");
  return *m;
}

Json to_json(const Domain& d) {
  return std::visit(
      [](const auto& dom) -> Json {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, IntRange>) {
          return {{"type", "int"}, {"low", dom.lo}, {"high", dom.hi}};
        } else if constexpr (std::is_same_v<T, IntChoice>) {
          return {{"type", "int_choice"}, {"values", dom.values}};
        } else if constexpr (std::is_same_v<T, RealRange>) {
          return {{"type", "real"}, {"low", dom.lo}, {"high", dom.hi}, {"log_scale", dom.log_scale}};
        } else {
          return {{"type", "categorical"}, {"values", dom.values}};
        }
      },
      d);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json optional_map(const std::map<std::string, std::optional<double>>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = optional_number(v);
  return out;
}

}  // namespace

const Json& require(const Json& j, std::string_view key) {
  if (!j.is_object()) bad("expected an object holding '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) bad("missing field '" + std::string(key) + "'");
  return *it;
}

std::vector<std::string> string_list(const Json& j) {
  if (!j.is_array()) bad("expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) bad("expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Json to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

ParamValue param_from_json(const Json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  bad("hyperparameter values must be numbers or strings");
}

Json to_json(const HyperparameterSpace& space) {
  Json dims = Json::array();
  for (const auto& d : space.dimensions) {
    dims.push_back({{"name", d.name}, {"domain", to_json(d.domain)}, {"primary", d.primary}});
  }
  return {{"algorithm", to_string(space.algorithm)}, {"dimensions", dims}};
}

Json space_document() {
  Json out = Json::object();
  for (auto a : kAllAlgorithms) out[std::string(to_string(a))] = to_json(space_for(a));
  return out;
}

Json to_json(const ModelConfig& c) {
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = to_json(v);
  Json out = {{"id", c.id},
              {"algorithm", to_string(c.algorithm)},
              {"params", params},
              {"stage", c.stage},
              {"origin", to_string(c.origin)}};
  if (!c.parents.empty()) out["parents"] = c.parents;
  return out;
}

ModelConfig config_from_json(const Json& j) {
  ModelConfig c;
  c.id = require(j, "id").get<std::string>();
  c.algorithm = algorithm_of(require(j, "algorithm"));
  for (const auto& [k, v] : require(j, "params").items()) c.params[k] = param_from_json(v);
  c.stage = require(j, "stage").get<int>();
  c.origin = origin_key(require(j, "origin").get<std::string>());
  if (auto it = j.find("parents"); it != j.end()) c.parents = string_list(*it);
  return c;
}

Json to_json(const MetricScores& s) {
  Json out = Json::object();
  for (const auto& [m, v] : s) out[std::string(to_string(m))] = v;
  return out;
}

MetricScores scores_from_json(const Json& j) {
  MetricScores s;
  for (const auto& [k, v] : j.items()) s[metric_key(k)] = v.get<double>();
  return s;
}

Json to_json(std::span<const MetricId> metrics) {
  Json out = Json::array();
  for (auto m : metrics) out.push_back(to_string(m));
  return out;
}

std::vector<MetricId> metrics_from_json(const Json& j) {
  std::vector<MetricId> out;
  for (const auto& name : string_list(j)) out.push_back(metric_key(name));
  return out;
}

Json to_json(const EvaluatedModel& m, bool include_oof) {
  Json out = {{"config", to_json(m.config)}, {"metric_scores", to_json(m.metric_scores)}, {"overall", m.overall}};
  if (include_oof) {
    std::vector<double> flat(m.oof_proba.data(), m.oof_proba.data() + m.oof_proba.size());
    out["oof_proba"] = flat;
  }
  return out;
}

EvaluatedModel model_from_json(const Json& j) {
  EvaluatedModel m;
  m.config = config_from_json(require(j, "config"));
  m.metric_scores = scores_from_json(require(j, "metric_scores"));
  m.overall = require(j, "overall").get<double>();
  const auto flat = require(j, "oof_proba").get<std::vector<double>>();
  if (flat.size() % 2 != 0) bad("oof_proba of model " + m.config.id + " has odd length");
  m.oof_proba.resize(static_cast<Eigen::Index>(flat.size() / 2), 2);
  std::copy(flat.begin(), flat.end(), m.oof_proba.data());
  return m;
}

Json to_json(const StagePlan& p) {
  Json cross = Json::object(), mut = Json::object();
  for (const auto& [a, n] : p.crossover_count) cross[std::string(to_string(a))] = n;
  for (const auto& [a, n] : p.mutation_count) mut[std::string(to_string(a))] = n;
  return {{"stage", p.stage}, {"crossover", cross}, {"mutation", mut}};
}

StagePlan plan_from_json(const Json& j) {
  StagePlan p;
  p.stage = require(j, "stage").get<int>();
  for (const auto& [k, v] : require(j, "crossover").items()) p.crossover_count[algorithm_key(k)] = v.get<int>();
  for (const auto& [k, v] : require(j, "mutation").items()) p.mutation_count[algorithm_key(k)] = v.get<int>();
  return p;
}

StagePlan plan_from_request(const Json& j, int stage, int n) {
  StagePlan p = StagePlan::defaults(stage, n);
  if (j.is_null()) return p;
  if (!j.is_object()) bad("stage request must be an object");
  if (auto it = j.find("crossover"); it != j.end()) {
    for (const auto& [k, v] : it->items()) p.crossover_count[algorithm_key(k)] = v.get<int>();
  }
  if (auto it = j.find("mutation"); it != j.end()) {
    for (const auto& [k, v] : it->items()) p.mutation_count[algorithm_key(k)] = v.get<int>();
  }
  return p;
}

Json to_json(const StageRecord& r) {
  Json parents = Json::object(), children = Json::object(), stats = Json::object();
  for (const auto& [a, ids] : r.parent_ids) parents[std::string(to_string(a))] = ids;
  for (const auto& [a, by_origin] : r.child_ids) {
    Json row = Json::object();
    for (const auto& [o, ids] : by_origin) row[std::string(to_string(o))] = ids;
    children[std::string(to_string(a))] = row;
  }
  for (const auto& [a, by_origin] : r.path_stats) {
    Json row = Json::object();
    for (const auto& [o, s] : by_origin) {
      row[std::string(to_string(o))] = {{"better", s.better},
                                        {"total", s.total},
                                        {"direction", s.direction == PathDirection::Over ? "over" : "under"}};
    }
    stats[std::string(to_string(a))] = row;
  }
  return {{"plan", to_json(r.plan)},         {"parent_ids", parents}, {"child_ids", children},
          {"path_stats", stats},             {"warnings", r.warnings}, {"failures", r.failures}};
}

StageRecord stage_record_from_json(const Json& j) {
  StageRecord r;
  r.plan = plan_from_json(require(j, "plan"));
  for (const auto& [k, v] : require(j, "parent_ids").items()) r.parent_ids[algorithm_key(k)] = string_list(v);
  for (const auto& [k, row] : require(j, "child_ids").items()) {
    for (const auto& [o, ids] : row.items()) r.child_ids[algorithm_key(k)][origin_key(o)] = string_list(ids);
  }
  for (const auto& [k, row] : require(j, "path_stats").items()) {
    for (const auto& [o, s] : row.items()) {
      PathStat ps;
      ps.better = require(s, "better").get<int>();
      ps.total = require(s, "total").get<int>();
      const auto dir = require(s, "direction").get<std::string>();
      if (dir != "over" && dir != "under") bad("unknown path direction '" + dir + "'");
      ps.direction = dir == "over" ? PathDirection::Over : PathDirection::Under;
      r.path_stats[algorithm_key(k)][origin_key(o)] = ps;
    }
  }
  r.warnings = string_list(require(j, "warnings"));
  r.failures = string_list(require(j, "failures"));
  return r;
}

Json to_json(const EnsembleSpec& s) {
  Json per_class = Json::object();
  for (const auto& [m, v] : s.per_class_scores) per_class[std::string(to_string(m))] = {v[0], v[1]};
  return {{"model_ids", s.model_ids},
          {"pooled_scores", to_json(s.pooled_scores)},
          {"per_class_scores", per_class},
          {"overall", s.overall}};
}

EnsembleSpec ensemble_from_json(const Json& j) {
  EnsembleSpec s;
  s.model_ids = string_list(require(j, "model_ids"));
  s.pooled_scores = scores_from_json(require(j, "pooled_scores"));
  for (const auto& [k, v] : require(j, "per_class_scores").items()) {
    if (!v.is_array() || v.size() != 2) bad("per-class score for '" + k + "' must hold two numbers");
    s.per_class_scores[metric_key(k)] = {v[0].get<double>(), v[1].get<double>()};
  }
  s.overall = require(j, "overall").get<double>();
  return s;
}

Json to_json(const BestEnsembleRecord& b) { return {{"spec", to_json(b.spec)}, {"ordinal", b.ordinal}}; }

BestEnsembleRecord best_from_json(const Json& j) {
  return {ensemble_from_json(require(j, "spec")), require(j, "ordinal").get<int>()};
}

Json to_json(const GreedyResult& g) {
  Json steps = Json::array();
  for (const auto& s : g.steps) steps.push_back(to_json(s));
  return {{"spec", to_json(g.spec)}, {"steps", steps}};
}

Json to_json(const ExploredValues& e) {
  Json out = Json::object();
  for (auto a : kAllAlgorithms) {
    const auto& values = e.values(a);
    if (values.empty()) continue;
    Json row = Json::array();
    for (const auto& v : values) row.push_back(to_json(v));
    out[std::string(to_string(a))] = row;
  }
  return out;
}

ExploredValues explored_from_json(const Json& j) {
  ExploredValues e;
  for (const auto& [k, row] : j.items()) {
    const auto a = algorithm_key(k);
    for (const auto& v : row) e.add(a, param_from_json(v));
  }
  return e;
}

Json to_json(const Dataset& d) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < d.features.cols(); ++c) row.push_back(d.features(i, c));
    rows.push_back(std::move(row));
  }
  return {{"label_column", d.label_name},
          {"class_names", {d.class_names[0], d.class_names[1]}},
          {"feature_names", d.feature_names},
          {"features", rows},
          {"labels", d.labels}};
}

Dataset dataset_from_json(const Json& j) {
  Dataset d;
  d.label_name = require(j, "label_column").get<std::string>();
  const auto names = string_list(require(j, "class_names"));
  if (names.size() != 2) bad("class_names must hold two entries");
  d.class_names = {names[0], names[1]};
  d.feature_names = string_list(require(j, "feature_names"));
  d.labels = require(j, "labels").get<std::vector<int>>();
  const auto& rows = require(j, "features");
  d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d.feature_names.size()) bad("feature row " + std::to_string(i) + " has the wrong width");
    for (std::size_t c = 0; c < d.feature_names.size(); ++c) {
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c].get<double>();
    }
  }
  d.validate();
  return d;
}

Json to_json(const Projection& p) {
  Json coords = Json::array();
  for (const auto& xy : p.coords) coords.push_back({xy[0], xy[1]});
  return {{"schema", kAnalyticsSchema},
          {"method", to_string(p.method)},
          {"model_ids", p.model_ids},
          {"coords", coords},
          {"diagnostic", p.diagnostic},
          {"degenerate", p.degenerate}};
}

Json to_json(const InstanceGrid& g) {
  Json cells = Json::array();
  for (const auto& c : g.cells) {
    cells.push_back({{"members", c.members},
                     {"class_counts", {c.class_counts[0], c.class_counts[1]}},
                     {"class_label", c.class_label},
                     {"power", optional_map(c.power)},
                     {"selected_power", optional_map(c.selected_power)},
                     {"difference", optional_map(c.difference)}});
  }
  return {{"schema", kAnalyticsSchema}, {"clustered", g.clustered}, {"assignment", g.assignment}, {"cells", cells}};
}

Json to_json(const Panels& p) {
  Json swarm = Json::object();
  for (const auto& [a, series] : p.beeswarm) {
    Json row = Json::array();
    for (const auto& [id, overall] : series) row.push_back({{"id", id}, {"overall", overall}});
    swarm[std::string(to_string(a))] = row;
  }
  Json beans = Json::array();
  for (const auto& b : p.beans) {
    beans.push_back({{"metric", to_string(b.metric)},
                     {"all_values", b.all_values},
                     {"selection_values", b.selection_values},
                     {"all_mean", b.all_mean},
                     {"selection_mean", optional_number(b.selection_mean)}});
  }
  return {{"schema", kAnalyticsSchema}, {"beeswarm", swarm}, {"beans", beans}};
}

}  // namespace evoml
