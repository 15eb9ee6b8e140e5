#include "evoml/hyperparams.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "evoml/error.hpp"

namespace evoml {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<std::string> layer_choices() {
  std::vector<std::string> out;
  for (int h : {4, 8, 16, 32, 64}) out.push_back("(" + std::to_string(h) + ",)");
  for (int h : {4, 8, 16, 32, 64}) out.push_back("(" + std::to_string(h) + "," + std::to_string(h) + ")");
  return out;
}

std::array<HyperparameterSpace, 5> build_spaces() {
  return {{
      {Algorithm::KNN,
       {{"n_neighbors", IntRange{1, 50}, true},
        {"weights", Categorical{{"uniform", "distance"}}},
        {"metric", Categorical{{"euclidean", "manhattan", "chebyshev"}}}}},
      {Algorithm::LR,
       {{"C", RealRange{1e-3, 1e3, true}, true},
        {"max_iter", IntChoice{{100, 200, 500}}}}},
      {Algorithm::MLP,
       {{"hidden_layer_sizes", Categorical{layer_choices()}, true},
        {"activation", Categorical{{"relu", "tanh", "logistic"}}},
        {"learning_rate", RealRange{1e-4, 1e-1, true}},
        {"epochs", IntRange{50, 300}}}},
      {Algorithm::RF,
       {{"n_estimators", IntRange{10, 200}, true},
        {"max_depth", IntRange{2, 12}},
        {"min_samples_split", IntRange{2, 10}},
        {"max_features", Categorical{{"sqrt", "all"}}}}},
      {Algorithm::GradB,
       {{"n_estimators", IntRange{10, 200}, true},
        {"learning_rate", RealRange{0.01, 0.3, true}},
        {"max_depth", IntRange{1, 5}},
        {"subsample", RealRange{0.5, 1.0, false}}}},
  }};
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::KNN: return "KNN";
    case Algorithm::LR: return "LR";
    case Algorithm::MLP: return "MLP";
    case Algorithm::RF: return "RF";
    case Algorithm::GradB: return "GradB";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_string(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Random: return "random";
    case Origin::Crossover: return "crossover";
    case Origin::Mutation: return "mutation";
  }
  return "?";
}

std::optional<Origin> origin_from_string(std::string_view name) {
  for (auto o : {Origin::Random, Origin::Crossover, Origin::Mutation}) {
    if (to_string(o) == name) return o;
  }
  return std::nullopt;
}

const Dimension& HyperparameterSpace::primary() const {
  for (const auto& d : dimensions) {
    if (d.primary) return d;
  }
  throw Error(ErrorCode::InvalidArgument, "space has no primary dimension");
}

const Dimension* HyperparameterSpace::find(std::string_view name) const {
  for (const auto& d : dimensions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const HyperparameterSpace& space_for(Algorithm a) {
  static const auto spaces = build_spaces();
  return spaces[static_cast<std::size_t>(a)];
}

bool is_numeric(const Domain& d) { return !std::holds_alternative<Categorical>(d); }

bool contains(const Domain& d, const ParamValue& v) {
  return std::visit(
      overloaded{
          [&](const IntRange& r) {
            const auto* x = std::get_if<std::int64_t>(&v);
            return x && *x >= r.lo && *x <= r.hi;
          },
          [&](const IntChoice& c) {
            const auto* x = std::get_if<std::int64_t>(&v);
            return x && std::find(c.values.begin(), c.values.end(), *x) != c.values.end();
          },
          [&](const RealRange& r) {
            const auto* x = std::get_if<double>(&v);
            return x && std::isfinite(*x) && *x >= r.lo && *x <= r.hi;
          },
          [&](const Categorical& c) {
            const auto* x = std::get_if<std::string>(&v);
            return x && std::find(c.values.begin(), c.values.end(), *x) != c.values.end();
          },
      },
      d);
}

ParamValue sample(const Domain& d, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const IntRange& r) -> ParamValue {
            return std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng);
          },
          [&](const IntChoice& c) -> ParamValue {
            return c.values[std::uniform_int_distribution<std::size_t>(0, c.values.size() - 1)(rng)];
          },
          [&](const RealRange& r) -> ParamValue {
            if (r.log_scale) {
              const double u = std::uniform_real_distribution<double>(std::log(r.lo), std::log(r.hi))(rng);
              return std::clamp(std::exp(u), r.lo, r.hi);
            }
            return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
          },
          [&](const Categorical& c) -> ParamValue {
            return c.values[std::uniform_int_distribution<std::size_t>(0, c.values.size() - 1)(rng)];
          },
      },
      d);
}

ParamValue round_to_domain(const Domain& d, double x) {
  return std::visit(
      overloaded{
          [&](const IntRange& r) -> ParamValue {
            return std::clamp(static_cast<std::int64_t>(std::llround(x)), r.lo, r.hi);
          },
          [&](const IntChoice& c) -> ParamValue {
            std::int64_t best = c.values.front();
            for (auto v : c.values) {
              if (std::abs(static_cast<double>(v) - x) < std::abs(static_cast<double>(best) - x)) best = v;
            }
            return best;
          },
          [&](const RealRange& r) -> ParamValue { return std::clamp(x, r.lo, r.hi); },
          [&](const Categorical&) -> ParamValue {
            throw Error(ErrorCode::InvalidArgument, "categorical domain has no numeric rounding");
          },
      },
      d);
}

double as_number(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* r = std::get_if<double>(&v)) return *r;
  throw Error(ErrorCode::InvalidArgument, "categorical value is not numeric");
}

std::string format_value(const ParamValue& v) {
  return std::visit(overloaded{
                        [](std::int64_t i) { return std::to_string(i); },
                        [](double r) {
                          char buf[64];
                          auto [p, ec] = std::to_chars(buf, buf + sizeof buf, r);
                          return std::string(buf, p);
                        },
                        [](const std::string& s) { return s; },
                    },
                    v);
}

std::vector<ParamValue> enumerate(const Domain& d) {
  std::vector<ParamValue> out;
  std::visit(overloaded{
                 [&](const IntRange& r) {
                   for (auto i = r.lo; i <= r.hi; ++i) out.emplace_back(i);
                 },
                 [&](const IntChoice& c) {
                   for (auto i : c.values) out.emplace_back(i);
                 },
                 [&](const RealRange&) {},
                 [&](const Categorical& c) {
                   for (const auto& s : c.values) out.emplace_back(s);
                 },
             },
             d);
  return out;
}

std::string make_model_id(Algorithm a, std::int64_t serial) {
  return std::string(to_string(a)) + std::to_string(serial);
}

bool is_valid(const ModelConfig& c) {
  const auto& space = space_for(c.algorithm);
  if (c.params.size() != space.dimensions.size()) return false;
  for (const auto& dim : space.dimensions) {
    auto it = c.params.find(dim.name);
    if (it == c.params.end() || !contains(dim.domain, it->second)) return false;
  }
  return true;
}

ModelConfig sample_random_config(Algorithm a, Rng& rng, std::int64_t serial) {
  ModelConfig c;
  c.id = make_model_id(a, serial);
  c.algorithm = a;
  c.stage = 0;
  c.origin = Origin::Random;
  for (const auto& dim : space_for(a).dimensions) c.params[dim.name] = sample(dim.domain, rng);
  return c;
}

std::vector<int> parse_layer_sizes(std::string_view text) {
  std::vector<int> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] >= '0' && text[i] <= '9') {
      int v = 0;
      auto [p, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
      out.push_back(v);
      i = static_cast<std::size_t>(p - text.data());
    } else {
      ++i;
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no layer sizes in '" + std::string(text) + "'");
  return out;
}

}  // namespace evoml
