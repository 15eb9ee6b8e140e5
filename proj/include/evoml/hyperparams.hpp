#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evoml/random.hpp"

namespace evoml {

enum class Algorithm { KNN, LR, MLP, RF, GradB };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms = {Algorithm::KNN, Algorithm::LR, Algorithm::MLP,
                                                            Algorithm::RF, Algorithm::GradB};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(std::string_view name);

enum class Origin { Random, Crossover, Mutation };

std::string_view to_string(Origin o);
std::optional<Origin> origin_from_string(std::string_view name);

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::map<std::string, ParamValue>;

struct IntRange {
  std::int64_t lo;
  std::int64_t hi;
};

// Finite ordered set of integers (e.g. iteration budgets).
struct IntChoice {
  std::vector<std::int64_t> values;
};

struct RealRange {
  double lo;
  double hi;
  bool log_scale = false;
};

struct Categorical {
  std::vector<std::string> values;
};

using Domain = std::variant<IntRange, IntChoice, RealRange, Categorical>;

struct Dimension {
  std::string name;
  Domain domain;
  bool primary = false;
};

struct HyperparameterSpace {
  Algorithm algorithm;
  std::vector<Dimension> dimensions;

  const Dimension& primary() const;
  const Dimension* find(std::string_view name) const;
};

const HyperparameterSpace& space_for(Algorithm a);

bool is_numeric(const Domain& d);
bool contains(const Domain& d, const ParamValue& v);
ParamValue sample(const Domain& d, Rng& rng);
// Nearest admissible value to x for a numeric domain.
ParamValue round_to_domain(const Domain& d, double x);
double as_number(const ParamValue& v);
std::string format_value(const ParamValue& v);

// Enumerates every value of a finite domain; empty for real ranges.
std::vector<ParamValue> enumerate(const Domain& d);

struct ModelConfig {
  std::string id;
  Algorithm algorithm = Algorithm::KNN;
  Params params;
  int stage = 0;
  Origin origin = Origin::Random;
  std::vector<std::string> parents;  // two for crossover, one for mutation

  const ParamValue& at(const std::string& name) const { return params.at(name); }
  std::int64_t get_int(const std::string& name) const { return std::get<std::int64_t>(params.at(name)); }
  double get_real(const std::string& name) const { return std::get<double>(params.at(name)); }
  const std::string& get_str(const std::string& name) const { return std::get<std::string>(params.at(name)); }

  bool operator==(const ModelConfig&) const = default;
};

// Algorithm abbreviation followed by a session-wide serial number.
std::string make_model_id(Algorithm a, std::int64_t serial);

// True when every dimension of the algorithm's space is assigned an in-domain value.
bool is_valid(const ModelConfig& c);

ModelConfig sample_random_config(Algorithm a, Rng& rng, std::int64_t serial);

// Parses "(16,)" or "(16,16)".
std::vector<int> parse_layer_sizes(std::string_view text);

}  // namespace evoml
