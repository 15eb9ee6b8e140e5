// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evoml/analytics.hpp"
#include "evoml/ensemble.hpp"
#include "evoml/error.hpp"
#include "evoml/metrics.hpp"
#include "evoml/mlp.hpp"
#include "evoml/session.hpp"
#include "evoml/wire.hpp"
#include "support.hpp"

using namespace evoml;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Config {
  std::string cli;
  std::string data;
  fs::path work_dir;
  std::vector<int> seeds{1, 2, 3, 4, 5};
  unsigned workers = 1;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ProbaMatrix from_p1(const std::vector<double>& p1) {
  ProbaMatrix p(static_cast<Eigen::Index>(p1.size()), 2);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    p(static_cast<Eigen::Index>(i), 0) = 1.0 - p1[i];
    p(static_cast<Eigen::Index>(i), 1) = p1[i];
  }
  return p;
}

// ---------------------------------------------------------------------------
// Brute-force metric definitions

struct Counts {
  double tp = 0, fp = 0, tn = 0, fn = 0;
};

Counts count(const std::vector<int>& y, const std::vector<double>& p1) {
  Counts c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pred = p1[i] >= 0.5;
    if (y[i] == 1) (pred ? c.tp : c.fn) += 1;
    else (pred ? c.fp : c.tn) += 1;
  }
  return c;
}

double ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

double oracle(MetricId m, const std::vector<int>& y, const std::vector<double>& p1) {
  const auto c = count(y, p1);
  const double n = static_cast<double>(y.size());
  switch (m) {
    case MetricId::Accuracy: return ratio(c.tp + c.tn, n);
    case MetricId::Precision: return ratio(c.tp, c.tp + c.fp);
    case MetricId::Recall: return ratio(c.tp, c.tp + c.fn);
    case MetricId::F1: {
      const double p = ratio(c.tp, c.tp + c.fp), r = ratio(c.tp, c.tp + c.fn);
      return ratio(2.0 * p * r, p + r);
    }
    case MetricId::GMean: return std::sqrt(ratio(c.tp, c.tp + c.fn) * ratio(c.tn, c.tn + c.fp));
    case MetricId::MCC: {
      const double den = std::sqrt((c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn));
      return ratio(c.tp * c.tn - c.fp * c.fn, den);
    }
    case MetricId::RocAuc: {
      double wins = 0.0, pairs = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
          if (y[j] != 0) continue;
          pairs += 1.0;
          wins += p1[i] > p1[j] ? 1.0 : (p1[i] == p1[j] ? 0.5 : 0.0);
        }
      }
      return ratio(wins, pairs);
    }
    case MetricId::LogLoss: {
      double total = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = y[i] == 1 ? p1[i] : 1.0 - p1[i];
        total += -std::log(std::min(std::max(p, 1e-15), 1.0 - 1e-15));
      }
      return total / n;
    }
  }
  return 0.0;
}

Outcome metric_oracle() {
  Rng rng(20240601);
  std::uniform_int_distribution<int> length(1, 500);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  std::string worst_metric;
  for (int draw = 0; draw < 1000; ++draw) {
    const auto n = static_cast<std::size_t>(length(rng));
    const double base_rate = draw % 50 == 0 ? 0.0 : (draw % 50 == 1 ? 1.0 : unit(rng));
    const int style = draw % 4;  // continuous, coarse grid with ties, extremes, exact one half
    std::vector<int> y(n);
    std::vector<double> p1(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = unit(rng) < base_rate ? 1 : 0;
      double v = unit(rng);
      if (style == 1) v = std::round(v * 10.0) / 10.0;
      if (style == 2 && unit(rng) < 0.3) v = unit(rng) < 0.5 ? 0.0 : 1.0;
      if (style == 3 && unit(rng) < 0.3) v = 0.5;
      p1[i] = v;
    }
    const auto proba = from_p1(p1);
    for (auto m : kAllMetrics) {
      const double err = std::abs(score(m, y, proba) - oracle(m, y, p1));
      if (err > worst) {
        worst = err;
        worst_metric = std::string(to_string(m));
      }
    }
  }
  return {worst <= 1e-12, "max |error| " + fmt(worst) + (worst_metric.empty() ? "" : " (" + worst_metric + ")") +
                              " over 1000 draws x 8 metrics"};
}

// ---------------------------------------------------------------------------

Outcome soft_vote_oracle() {
  Rng rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = 32;
  std::vector<EvaluatedModel> models(6);
  for (std::size_t m = 0; m < models.size(); ++m) {
    models[m].config.id = "LR" + std::to_string(m);
    std::vector<double> p1(n);
    // Eighths make exact 0.5 averages (ties) common.
    for (std::size_t i = 0; i < n; ++i) p1[i] = i % 2 == 0 ? std::round(unit(rng) * 8.0) / 8.0 : unit(rng);
    models[m].oof_proba = from_p1(p1);
  }
  int subsets = 0, mismatches = 0, ties = 0;
  for (unsigned mask = 1; mask < (1u << models.size()); ++mask) {
    if (std::popcount(mask) > 4) continue;
    std::vector<const EvaluatedModel*> members;
    for (std::size_t m = 0; m < models.size(); ++m) {
      if (mask & (1u << m)) members.push_back(&models[m]);
    }
    ++subsets;
    const auto vote = soft_vote(members);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      double s0 = 0.0, s1 = 0.0;
      for (const auto* m : members) {
        s0 += m->oof_proba(r, 0);
        s1 += m->oof_proba(r, 1);
      }
      const double a0 = s0 / static_cast<double>(members.size());
      const double a1 = s1 / static_cast<double>(members.size());
      const int label = a1 > a0 ? 1 : 0;
      if (a0 == a1) ++ties;
      if (vote.averaged(r, 0) != a0 || vote.averaged(r, 1) != a1 || vote.labels[i] != label) ++mismatches;
    }
  }
  return {mismatches == 0 && subsets == 56, std::to_string(subsets) + " subsets, " + std::to_string(ties) +
                                                 " exact ties, " + std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------

fs::path session_path(const Config& cfg, int seed) {
  return cfg.work_dir / ("heart-seed" + std::to_string(seed) + ".session.json");
}

Outcome heart_end_to_end(const Config& cfg) {
  std::vector<double> best_single, ensemble;
  std::ostringstream per_seed;
  for (int seed : cfg.seeds) {
    const auto report_path = cfg.work_dir / ("heart-seed" + std::to_string(seed) + ".report.json");
    const std::string cmd = "\"" + cfg.cli + "\" run --data \"" + cfg.data +
                            "\" --label target --n 100 --k 10 --stages 2 --auto-ensemble 4 --seed " +
                            std::to_string(seed) + " --workers " + std::to_string(cfg.workers) + " --out \"" +
                            report_path.string() + "\" --session-out \"" + session_path(cfg, seed).string() +
                            "\" --quiet";
    const auto started = std::chrono::steady_clock::now();
    if (std::system(cmd.c_str()) != 0) return {false, "CLI failed for seed " + std::to_string(seed)};
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const auto report = Json::parse(read_text(report_path));
    const double single = report["most_accurate_single"]["accuracy"].get<double>();
    const auto& spec = report["ensemble"]["spec"];
    const double ens = spec["pooled_scores"]["accuracy"].get<double>();
    if (spec["model_ids"].size() > 4) return {false, "seed " + std::to_string(seed) + " ensemble exceeds 4 models"};
    best_single.push_back(single);
    ensemble.push_back(ens);
    per_seed << " s" << seed << "=" << fmt(single) << "/" << fmt(ens) << "(" << spec["model_ids"].size() << " models, "
             << fmt(secs) << "s)";
  }
  const double med_single = median(best_single);
  const double med_ens = median(ensemble);
  const double bar = std::max(0.84, med_single) - 0.005;
  return {med_single >= 0.82 && med_ens >= bar, "median single " + fmt(med_single) + " (>= 0.82), median ensemble " +
                                                    fmt(med_ens) + " (>= " + fmt(bar) + ");" + per_seed.str()};
}

// ---------------------------------------------------------------------------

std::int64_t serial_of(const std::string& id) {
  const auto digits = id.find_first_of("0123456789");
  return std::stoll(id.substr(digits));
}

bool same_value(const ParamValue& a, const ParamValue& b) {
  if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
    return std::abs(std::get<double>(a) - std::get<double>(b)) <= 1e-6;
  }
  return a == b;
}

Outcome evolution_invariants() {
  int repeats = 0, out_of_interval = 0, stat_mismatch = 0, mutations = 0, crossovers = 0, runs = 0;
  for (std::uint64_t run = 0; run < 20; ++run) {
    SessionSettings settings;
    settings.metrics = metrics_in(MetricGroup::Balanced);
    settings.n = 50;
    settings.k = 5;
    settings.seed = run;
    Session s("micro" + std::to_string(run), testing::blobs(30, 30, 3, 1.2, 1000 + run), settings);
    s.run_search(1);
    for (int stage = 1; stage <= 2; ++stage) {
      const auto explored_before = s.explored();
      const auto& rec = s.run_stage(s.default_plan(), 1);
      std::map<std::pair<Algorithm, Origin>, int> generated;
      for (const auto* child : s.models_at(stage)) ++generated[{child->config.algorithm, child->config.origin}];
      for (const auto& [a, by_origin] : rec.child_ids) {
        for (const auto& [origin, ids] : by_origin) {
          const int total = rec.path_stats.at(a).at(origin).total;
          if (total != static_cast<int>(ids.size()) || total != generated[{a, origin}]) ++stat_mismatch;
        }
      }
      for (const auto* child : s.models_at(stage)) {
        const auto& c = child->config;
        const auto& space = space_for(c.algorithm);
        if (c.origin == Origin::Mutation) {
          ++mutations;
          const auto& v = c.at(space.primary().name);
          bool repeated = explored_before.contains(c.algorithm, v);
          for (const auto* other : s.all_models()) {
            if (other->config.algorithm == c.algorithm && serial_of(other->id()) < serial_of(c.id) &&
                same_value(other->config.at(space.primary().name), v)) {
              repeated = true;
            }
          }
          if (repeated) ++repeats;
        } else if (c.origin == Origin::Crossover) {
          ++crossovers;
          const auto* pa = s.find(c.parents.at(0));
          const auto* pb = s.find(c.parents.at(1));
          if (!pa || !pb) {
            ++out_of_interval;
            continue;
          }
          for (const auto& dim : space.dimensions) {
            if (!is_numeric(dim.domain)) continue;
            const double x = as_number(c.at(dim.name));
            const double lo = std::min(as_number(pa->config.at(dim.name)), as_number(pb->config.at(dim.name)));
            const double hi = std::max(as_number(pa->config.at(dim.name)), as_number(pb->config.at(dim.name)));
            const double slack = 1e-12 * std::max(1.0, std::abs(hi));
            if (x < lo - slack || x > hi + slack) ++out_of_interval;
          }
        }
      }
    }
    ++runs;
  }
  return {repeats == 0 && out_of_interval == 0 && stat_mismatch == 0 && mutations > 0 && crossovers > 0,
          std::to_string(runs) + " runs, " + std::to_string(mutations) + " mutation children (" +
              std::to_string(repeats) + " repeats), " + std::to_string(crossovers) + " crossover children (" +
              std::to_string(out_of_interval) + " out of interval), " + std::to_string(stat_mismatch) +
              " path-stat mismatches"};
}

// ---------------------------------------------------------------------------
// Both session criteria share one replay of the seed-1 heart session.

struct HeartReplay {
  bool ready = false;
  std::string error;
  std::string original_doc;
  std::optional<Session> augmented;
  std::optional<Session> replayed;
  int checks = 0;
  int decreases = 0;
};

HeartReplay& heart_replay(const Config& cfg) {
  static HeartReplay h;
  if (h.ready || !h.error.empty()) return h;
  try {
    h.original_doc = read_text(session_path(cfg, cfg.seeds.front()));
    Session s = load_session(h.original_doc);
    // Extra manual activity on top of the recorded greedy build.
    Rng rng(99);
    const auto all = s.all_models();
    for (int i = 0; i < 40; ++i) {
      std::vector<std::string> ids;
      const auto size = 1 + rng() % 6;
      for (std::size_t j = 0; j < size; ++j) ids.push_back(all[rng() % all.size()]->id());
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      if (i % 10 == 0) s.update_bucket(ids, {});
      s.evaluate_ensemble(ids);
    }
    h.augmented.emplace(std::move(s));
    std::optional<double> last;
    h.replayed.emplace(replay(*h.augmented, cfg.workers, [&](const Session& now, const SessionAction& a) {
      // A metric change redefines overall, so the comparison restarts there.
      if (a.kind == ActionKind::Settings) last.reset();
      if (!now.best()) return;
      const double v = now.best()->spec.overall;
      ++h.checks;
      if (last && v < *last) ++h.decreases;
      last = v;
    }));
    h.ready = true;
  } catch (const std::exception& e) {
    h.error = e.what();
  }
  return h;
}

Outcome best_monotonicity(const Config& cfg) {
  auto& h = heart_replay(cfg);
  if (!h.ready) return {false, h.error};
  int history_checks = 0, history_decreases = 0;
  double running = -1.0;
  for (const auto& e : h.replayed->ensembles()) {
    running = std::max(running, e.overall);
    ++history_checks;
  }
  if (!h.replayed->best() || h.replayed->best()->spec.overall != running) ++history_decreases;
  return {h.decreases == 0 && h.checks > 0 && history_decreases == 0,
          std::to_string(h.checks) + " observed actions, " + std::to_string(h.decreases) + " decreases; " +
              std::to_string(history_checks) + " ensembles, best equals their maximum"};
}

Outcome session_round_trip(const Config& cfg) {
  auto& h = heart_replay(cfg);
  if (!h.ready) return {false, h.error};
  const auto once = save_session(load_session(h.original_doc));
  const bool fixture_ok = once == h.original_doc;
  const auto aug_doc = save_session(*h.augmented);
  const bool augmented_ok = save_session(load_session(aug_doc)) == aug_doc;

  const auto& a = h.augmented->models();
  const auto& b = h.replayed->models();
  bool pool_ok = a.size() == b.size();
  for (std::size_t i = 0; pool_ok && i < a.size(); ++i) {
    pool_ok = a[i].config == b[i].config && a[i].oof_proba == b[i].oof_proba && a[i].overall == b[i].overall &&
              a[i].metric_scores == b[i].metric_scores;
  }
  const bool replay_doc_ok = save_session(*h.replayed) == aug_doc;
  return {fixture_ok && augmented_ok && pool_ok && replay_doc_ok,
          std::string("fixture ") + (fixture_ok ? "identical" : "differs") + " (" + std::to_string(once.size()) +
              " bytes), augmented " + (augmented_ok ? "identical" : "differs") + ", replayed pool of " +
              std::to_string(b.size()) + (pool_ok ? " identical" : " differs") + ", replayed document " +
              (replay_doc_ok ? "identical" : "differs")};
}

// ---------------------------------------------------------------------------

Outcome mds_recovery() {
  Rng rng(5);
  std::uniform_int_distribution<int> size(3, 40);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  double worst = 0.0;
  for (int set = 0; set < 50; ++set) {
    Matrix pts(size(rng), 2);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = coord(rng);
    const auto r = classical_mds(pts);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < pts.rows(); ++j) {
        worst = std::max(worst, std::abs((pts.row(i) - pts.row(j)).norm() - (r.coords.row(i) - r.coords.row(j)).norm()));
      }
    }
  }
  return {worst <= 1e-6, "max distance error " + fmt(worst) + " over 50 sets"};
}

Outcome kmeans_and_grid() {
  Rng rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  int increases = 0, steps = 0;
  for (int set = 0; set < 100; ++set) {
    const int n = 20 + static_cast<int>(rng() % 280);
    const int d = 2 + static_cast<int>(rng() % 5);
    const int k = 2 + static_cast<int>(rng() % 12);
    Matrix pts(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double shift = 3.0 * static_cast<double>(i % 4);
      for (Eigen::Index c = 0; c < d; ++c) pts(i, c) = g(rng) + shift;
    }
    const auto r = kmeans(pts, k, static_cast<std::uint64_t>(set));
    for (std::size_t s = 1; s < r.objective_history.size(); ++s) {
      ++steps;
      if (r.objective_history[s] > r.objective_history[s - 1]) ++increases;
    }
  }
  auto grid_for = [](std::size_t class0) {
    const auto data = testing::blobs(class0, 40, 3, 2.0, 3);
    Rng prng(4);
    std::vector<EvaluatedModel> models;
    for (int m = 0; m < 3; ++m) {
      models.push_back(testing::model_with("RF" + std::to_string(m), Algorithm::RF, testing::random_proba(data.size(), prng),
                                           data.labels, metrics_in(MetricGroup::Balanced)));
    }
    std::vector<const EvaluatedModel*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    return std::pair{build_grid(data, ptrs, ptrs, 0), data.size()};
  };
  const auto [g168, n168] = grid_for(168);
  const auto [g169, n169] = grid_for(169);
  const bool threshold_ok =
      !g168.clustered && g168.cell_count() == n168 && g169.clustered && g169.cell_count() == 100;
  return {increases == 0 && threshold_ok,
          std::to_string(increases) + " increases in " + std::to_string(steps) + " steps; 168 per class -> " +
              std::to_string(g168.cell_count()) + " cells" + (g168.clustered ? " clustered" : " unclustered") +
              ", 169 per class -> " + std::to_string(g169.cell_count()) + " cells" +
              (g169.clustered ? " clustered" : " unclustered")};
}

Outcome mlp_gradient() {
  Matrix X(3, 2);
  X << 0.3, -1.2, 1.5, 0.4, -0.7, 0.9;
  const std::vector<double> y{1.0, 0.0, 1.0};
  double worst = 0.0;
  for (auto act : {Activation::Relu, Activation::Tanh, Activation::Logistic}) {
    for (const auto& hidden : {std::vector<int>{4}, std::vector<int>{8, 8}}) {
      MlpNetwork net(2, hidden, act);
      Rng rng(17);
      net.initialize(rng);
      Vector grad, scratch;
      net.loss_and_gradient(X, y, grad);
      const Vector theta = net.parameters();
      const double h = 1e-5;
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Vector t = theta;
        t(i) += h;
        net.set_parameters(t);
        const double up = net.loss_and_gradient(X, y, scratch);
        t(i) = theta(i) - h;
        net.set_parameters(t);
        const double down = net.loss_and_gradient(X, y, scratch);
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(grad(i) - numeric) / std::max(std::abs(grad(i)) + std::abs(numeric), 1e-8));
      }
    }
  }
  return {worst < 1e-4, "max relative error " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"evoml acceptance suite"};
  app.add_option("--cli", cfg.cli, "evoml executable")->required();
  app.add_option("--data", cfg.data, "heart disease CSV")->required();
  app.add_option("--work-dir", cfg.work_dir, "scratch directory")->required();
  app.add_option("--seeds", cfg.seeds, "master seeds for the end-to-end runs");
  app.add_option("--workers", cfg.workers, "evaluation threads");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(cfg.work_dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric-oracle", metric_oracle},
      {"soft-vote-oracle", soft_vote_oracle},
      {"heart-end-to-end", [&] { return heart_end_to_end(cfg); }},
      {"evolution-invariants", evolution_invariants},
      {"best-ensemble-monotonicity", [&] { return best_monotonicity(cfg); }},
      {"mds-recovery", mds_recovery},
      {"kmeans-and-grid-threshold", kmeans_and_grid},
      {"mlp-gradient-check", mlp_gradient},
      {"session-round-trip", [&] { return session_round_trip(cfg); }},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " [" << fmt(secs) << "s] " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
