#include "evoml/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "evoml/error.hpp"
#include "evoml/parallel.hpp"

namespace evoml {
namespace {

const std::vector<ParamValue> kNoValues;

}  // namespace

bool ExploredValues::contains(Algorithm a, const ParamValue& v) const {
  auto it = values_.find(a);
  if (it == values_.end()) return false;
  if (const auto* real = std::get_if<double>(&v)) {
    return std::any_of(it->second.begin(), it->second.end(), [&](const ParamValue& e) {
      const auto* x = std::get_if<double>(&e);
      return x && std::abs(*x - *real) <= kExploredTolerance;
    });
  }
  return std::find(it->second.begin(), it->second.end(), v) != it->second.end();
}

void ExploredValues::add(Algorithm a, const ParamValue& v) {
  if (std::holds_alternative<double>(v)) {
    // Reals are kept verbatim so distinct nearby draws stay distinguishable.
    auto& list = values_[a];
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    return;
  }
  if (!contains(a, v)) values_[a].push_back(v);
}

const std::vector<ParamValue>& ExploredValues::values(Algorithm a) const {
  auto it = values_.find(a);
  return it == values_.end() ? kNoValues : it->second;
}

ExploredValues ExploredValues::from_configs(std::span<const ModelConfig> configs) {
  ExploredValues out;
  for (const auto& c : configs) out.add(c.algorithm, c.at(space_for(c.algorithm).primary().name));
  return out;
}

StagePlan StagePlan::defaults(int stage, int n) {
  StagePlan plan;
  plan.stage = stage;
  for (auto a : kAllAlgorithms) {
    plan.crossover_count[a] = n / 2;
    plan.mutation_count[a] = n / 2;
  }
  return plan;
}

int StagePlan::crossover(Algorithm a) const {
  auto it = crossover_count.find(a);
  return it == crossover_count.end() ? 0 : it->second;
}

int StagePlan::mutation(Algorithm a) const {
  auto it = mutation_count.find(a);
  return it == mutation_count.end() ? 0 : it->second;
}

void StagePlan::validate(int n) const {
  if (stage < 1) throw Error(ErrorCode::InvalidArgument, "stage index must be >= 1");
  for (auto a : kAllAlgorithms) {
    for (int count : {crossover(a), mutation(a)}) {
      if (count < 0 || count > n / 2) {
        throw Error(ErrorCode::InvalidArgument, std::string(to_string(a)) + " count " + std::to_string(count) +
                                                    " outside [0, " + std::to_string(n / 2) + "]");
      }
    }
  }
}

EvaluationBatch evaluate_batch(std::span<const ModelConfig> configs, const SearchContext& ctx) {
  std::vector<std::optional<EvaluatedModel>> slots(configs.size());
  std::vector<std::string> errors(configs.size());
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(configs.size(), ctx.workers, [&](std::size_t i) {
    try {
      slots[i] = evaluate(configs[i], ctx.data, ctx.folds, ctx.selected, derive_seed(ctx.master_seed, configs[i].id));
    } catch (const Error& e) {
      errors[i] = configs[i].id + ": " + e.what();
    }
    if (ctx.progress) {
      std::lock_guard lock(progress_mutex);
      ++done;
      ctx.progress(static_cast<double>(done) / static_cast<double>(configs.size()));
    }
  });
  EvaluationBatch batch;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (slots[i]) batch.models.push_back(std::move(*slots[i]));
    else batch.failures.push_back(errors[i]);
  }
  return batch;
}

std::vector<ModelConfig> sample_random_search(int n, std::uint64_t master_seed, std::int64_t first_serial) {
  if (n < kMinModelsPerAlgorithm || n > kMaxModelsPerAlgorithm) {
    throw Error(ErrorCode::InvalidArgument, "models per algorithm must lie in [50, 300]; got " + std::to_string(n));
  }
  Rng rng(derive_seed(master_seed, "random-search"));
  std::vector<ModelConfig> configs;
  std::int64_t serial = first_serial;
  for (auto a : kAllAlgorithms) {
    for (int i = 0; i < n; ++i) configs.push_back(sample_random_config(a, rng, serial++));
  }
  return configs;
}

RandomSearchResult run_random_search(int n, const SearchContext& ctx) {
  const auto configs = sample_random_search(n, ctx.master_seed);
  RandomSearchResult result;
  result.explored = ExploredValues::from_configs(configs);
  result.next_serial = static_cast<std::int64_t>(configs.size());
  result.batch = evaluate_batch(configs, ctx);
  return result;
}

ModelConfig crossover(const ModelConfig& a, const ModelConfig& b, Rng& rng, int stage, std::string id,
                      std::optional<double> forced_lambda) {
  if (a.algorithm != b.algorithm) throw Error(ErrorCode::AlgorithmMismatch, a.id + " vs " + b.id);
  if (a.id == b.id) throw Error(ErrorCode::InvalidArgument, "crossover needs two distinct parents");
  ModelConfig child;
  child.id = std::move(id);
  child.algorithm = a.algorithm;
  child.stage = stage;
  child.origin = Origin::Crossover;
  child.parents = {a.id, b.id};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& dim : space_for(a.algorithm).dimensions) {
    const auto& va = a.at(dim.name);
    const auto& vb = b.at(dim.name);
    if (is_numeric(dim.domain)) {
      const double lambda = forced_lambda ? *forced_lambda : unit(rng);
      child.params[dim.name] = round_to_domain(dim.domain, lambda * as_number(va) + (1.0 - lambda) * as_number(vb));
    } else {
      child.params[dim.name] = unit(rng) < 0.5 ? va : vb;
    }
  }
  return child;
}

ModelConfig mutate(const ModelConfig& parent, ExploredValues& explored, Rng& rng, int stage, std::string id) {
  const auto& primary = space_for(parent.algorithm).primary();
  std::optional<ParamValue> chosen;
  if (std::holds_alternative<RealRange>(primary.domain)) {
    for (int attempt = 0; attempt < kMutationAttempts && !chosen; ++attempt) {
      auto v = sample(primary.domain, rng);
      if (!explored.contains(parent.algorithm, v)) chosen = std::move(v);
    }
  } else {
    std::vector<ParamValue> open;
    for (auto& v : enumerate(primary.domain)) {
      if (!explored.contains(parent.algorithm, v)) open.push_back(std::move(v));
    }
    if (!open.empty()) chosen = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
  }
  if (!chosen) {
    throw Error(ErrorCode::SpaceExhausted,
                "no unexplored " + primary.name + " value left for " + std::string(to_string(parent.algorithm)));
  }
  ModelConfig child = parent;
  child.id = std::move(id);
  child.stage = stage;
  child.origin = Origin::Mutation;
  child.parents = {parent.id};
  child.params[primary.name] = *chosen;
  explored.add(parent.algorithm, *chosen);
  return child;
}

PathStat path_stat(std::span<const double> child_overall, double reference_max, double reference_min) {
  PathStat stat;
  stat.total = static_cast<int>(child_overall.size());
  stat.better = static_cast<int>(
      std::count_if(child_overall.begin(), child_overall.end(), [&](double v) { return v > reference_max; }));
  if (stat.better > 0) {
    stat.direction = PathDirection::Over;
  } else {
    stat.direction = PathDirection::Under;
    stat.better = static_cast<int>(
        std::count_if(child_overall.begin(), child_overall.end(), [&](double v) { return v < reference_min; }));
  }
  return stat;
}

StageDraft draft_stage(const StagePlan& plan, std::span<const EvaluatedModel> pool, ExploredValues& explored,
                       std::int64_t& next_serial, std::uint64_t master_seed) {
  StageDraft draft;
  draft.record.plan = plan;
  std::map<Algorithm, std::vector<const EvaluatedModel*>> by_algorithm;
  for (const auto& m : pool) by_algorithm[m.config.algorithm].push_back(&m);

  for (auto a : kAllAlgorithms) {
    const auto& parents = by_algorithm[a];
    if (plan.crossover(a) > 0 && parents.size() < 2) {
      throw Error(ErrorCode::InsufficientParents, std::string(to_string(a)) + " crossover needs 2 parents, pool has " +
                                                      std::to_string(parents.size()));
    }
    if (plan.mutation(a) > 0 && parents.empty()) {
      throw Error(ErrorCode::InsufficientParents, std::string(to_string(a)) + " mutation needs a parent");
    }
  }

  Rng rng(derive_seed(master_seed, "stage-" + std::to_string(plan.stage)));
  for (auto a : kAllAlgorithms) {
    const auto& parents = by_algorithm[a];
    auto& ids = draft.record.parent_ids[a];
    for (const auto* p : parents) ids.push_back(p->id());
    auto& children = draft.record.child_ids[a];
    children[Origin::Crossover];
    children[Origin::Mutation];
    const auto& primary_name = space_for(a).primary().name;

    for (int i = 0; i < plan.crossover(a); ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
      const std::size_t first = pick(rng);
      std::size_t second = std::uniform_int_distribution<std::size_t>(0, parents.size() - 2)(rng);
      if (second >= first) ++second;
      auto child = crossover(parents[first]->config, parents[second]->config, rng, plan.stage,
                             make_model_id(a, next_serial++));
      explored.add(a, child.at(primary_name));
      children[Origin::Crossover].push_back(child.id);
      draft.children.push_back(std::move(child));
    }
    int exhausted = 0;
    for (int i = 0; i < plan.mutation(a); ++i) {
      const auto* parent = parents[std::uniform_int_distribution<std::size_t>(0, parents.size() - 1)(rng)];
      try {
        auto child = mutate(parent->config, explored, rng, plan.stage, make_model_id(a, next_serial));
        ++next_serial;
        children[Origin::Mutation].push_back(child.id);
        draft.children.push_back(std::move(child));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SpaceExhausted) throw;
        ++exhausted;
      }
    }
    if (exhausted > 0) {
      draft.record.warnings.push_back(std::string(to_string(a)) + ": " + std::to_string(exhausted) + " of " +
                                      std::to_string(plan.mutation(a)) +
                                      " mutations skipped, primary hyperparameter space exhausted");
    }
  }
  return draft;
}

StageOutcome run_stage(const StagePlan& plan, std::span<const EvaluatedModel> pool, ExploredValues& explored,
                       std::int64_t& next_serial, const SearchContext& ctx) {
  auto draft = draft_stage(plan, pool, explored, next_serial, ctx.master_seed);
  auto batch = evaluate_batch(draft.children, ctx);

  StageOutcome outcome;
  outcome.record = std::move(draft.record);
  outcome.record.failures = std::move(batch.failures);

  std::map<std::string, double> child_overall;
  for (const auto& m : batch.models) child_overall[m.id()] = m.overall;
  for (auto a : kAllAlgorithms) {
    double ref_max = -std::numeric_limits<double>::infinity();
    double ref_min = std::numeric_limits<double>::infinity();
    for (const auto& m : pool) {
      if (m.config.algorithm != a) continue;
      ref_max = std::max(ref_max, m.overall);
      ref_min = std::min(ref_min, m.overall);
    }
    for (auto& [origin, ids] : outcome.record.child_ids[a]) {
      // Failed children drop out of the record so totals match evaluated models.
      std::vector<double> values;
      std::vector<std::string> kept;
      for (const auto& id : ids) {
        auto it = child_overall.find(id);
        if (it == child_overall.end()) continue;
        values.push_back(it->second);
        kept.push_back(id);
      }
      ids = std::move(kept);
      outcome.record.path_stats[a][origin] = path_stat(values, ref_max, ref_min);
    }
  }
  outcome.models = std::move(batch.models);
  return outcome;
}

}  // namespace evoml
