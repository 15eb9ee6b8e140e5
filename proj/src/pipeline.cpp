#include "evoml/pipeline.hpp"

#include <chrono>

#include "evoml/error.hpp"

namespace evoml {
namespace {

Json model_summary(const EvaluatedModel& m) {
  return {{"id", m.id()},
          {"algorithm", to_string(m.config.algorithm)},
          {"stage", m.config.stage},
          {"overall", m.overall},
          {"accuracy", m.metric_scores.at(MetricId::Accuracy)},
          {"metric_scores", to_json(m.metric_scores)}};
}

// Highest overall, earliest id on ties.
const EvaluatedModel* best_by(std::span<const EvaluatedModel* const> models, auto key) {
  const EvaluatedModel* best = nullptr;
  for (const auto* m : models) {
    if (!best || key(*m) > key(*best)) best = m;
  }
  return best;
}

}  // namespace

std::vector<MetricId> parse_metric_list(std::string_view text) {
  if (auto group = group_from_string(text)) return metrics_in(*group);
  std::vector<MetricId> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto name = text.substr(start, end - start);
    auto m = metric_from_string(name);
    if (!m) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
    out.push_back(*m);
    start = end + 1;
  }
  validate_selection(out);
  return out;
}

RunResult run_pipeline(const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  auto say = [&](const std::string& line) {
    if (options.log) *options.log << line << std::endl;
  };
  if (options.stages < 0) throw Error(ErrorCode::InvalidArgument, "stage count must be non-negative");

  auto data = load_csv(options.data, options.label);
  SessionSettings settings;
  settings.metrics = parse_metric_list(options.metrics);
  settings.n = options.n;
  settings.k = options.k;
  settings.seed = options.seed;
  Session session("run-" + std::to_string(options.seed), std::move(data), settings);

  say("stage 0: random search over " + std::to_string(5 * options.n) + " models");
  session.run_search(options.workers);
  Json stages = Json::array();
  stages.push_back({{"stage", 0},
                    {"models", session.models_at(0).size()},
                    {"failures", session.search_failures()}});
  for (int s = 1; s <= options.stages; ++s) {
    say("stage " + std::to_string(s) + ": evolution");
    const auto& record = session.run_stage(session.default_plan(), options.workers);
    auto row = to_json(record);
    row.erase("parent_ids");
    row.erase("child_ids");
    row["stage"] = s;
    row["models"] = session.models_at(s).size();
    stages.push_back(std::move(row));
  }

  say("composing ensemble of at most " + std::to_string(options.auto_ensemble) + " models");
  auto ensemble = session.auto_ensemble(options.auto_ensemble);

  const auto models = session.all_models();
  Json per_algorithm = Json::object();
  for (auto a : kAllAlgorithms) {
    std::vector<const EvaluatedModel*> subset;
    for (const auto* m : models) {
      if (m->config.algorithm == a) subset.push_back(m);
    }
    if (const auto* b = best_by(subset, [](const EvaluatedModel& m) { return m.overall; })) {
      per_algorithm[std::string(to_string(a))] = model_summary(*b);
    }
  }
  const auto* best_overall = best_by(models, [](const EvaluatedModel& m) { return m.overall; });
  const auto* best_accuracy =
      best_by(models, [](const EvaluatedModel& m) { return m.metric_scores.at(MetricId::Accuracy); });
  const auto& d = session.dataset();
  const auto balance = class_balance(d);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  Json report = {
      {"schema", kReportSchema},
      {"dataset",
       {{"path", options.data.string()},
        {"label_column", d.label_name},
        {"instances", d.size()},
        {"features", d.feature_count()},
        {"class_names", {d.class_names[0], d.class_names[1]}},
        {"class_counts", {balance.count_per_class[0], balance.count_per_class[1]}},
        {"recommended_group", to_string(balance.recommended_group)}}},
      {"settings",
       {{"metrics", to_json(std::span<const MetricId>(session.settings().metrics))},
        {"n", options.n},
        {"k", options.k},
        {"stages", options.stages},
        {"auto_ensemble", options.auto_ensemble},
        {"seed", options.seed}}},
      {"model_count", models.size()},
      {"stages", stages},
      {"best_single", model_summary(*best_overall)},
      {"most_accurate_single", model_summary(*best_accuracy)},
      {"best_per_algorithm", per_algorithm},
      {"ensemble", to_json(ensemble)},
      {"runtime_seconds", seconds}};
  say("done in " + std::to_string(seconds) + " s");
  return {std::move(session), std::move(ensemble), std::move(report)};
}

}  // namespace evoml
