#pragma once

// JSON forms shared by the session document and the HTTP API.

#include <json.hpp>

#include "evoml/analytics.hpp"
#include "evoml/ensemble.hpp"
#include "evoml/evolution.hpp"

namespace evoml {

using Json = nlohmann::json;

Json to_json(const ParamValue& v);
ParamValue param_from_json(const Json& j);

Json to_json(const HyperparameterSpace& space);
// Every algorithm's space, keyed by algorithm name.
Json space_document();

Json to_json(const ModelConfig& c);
ModelConfig config_from_json(const Json& j);

Json to_json(const MetricScores& s);
MetricScores scores_from_json(const Json& j);

Json to_json(std::span<const MetricId> metrics);
std::vector<MetricId> metrics_from_json(const Json& j);

// oof_proba is written row-major as [p0, p1, p0, p1, ...].
Json to_json(const EvaluatedModel& m, bool include_oof = true);
EvaluatedModel model_from_json(const Json& j);

Json to_json(const StagePlan& p);
StagePlan plan_from_json(const Json& j);
// Request bodies may name only some algorithms; the rest keep n/2.
StagePlan plan_from_request(const Json& j, int stage, int n);

Json to_json(const StageRecord& r);
StageRecord stage_record_from_json(const Json& j);

Json to_json(const EnsembleSpec& s);
EnsembleSpec ensemble_from_json(const Json& j);
Json to_json(const BestEnsembleRecord& b);
BestEnsembleRecord best_from_json(const Json& j);
Json to_json(const GreedyResult& g);

Json to_json(const ExploredValues& e);
ExploredValues explored_from_json(const Json& j);

Json to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

Json to_json(const Projection& p);
Json to_json(const InstanceGrid& g);
Json to_json(const Panels& p);

// Typed field access raising ParseError with the offending key.
const Json& require(const Json& j, std::string_view key);
std::vector<std::string> string_list(const Json& j);

}  // namespace evoml
