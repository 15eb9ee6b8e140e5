#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "evoml/metrics.hpp"

namespace evoml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Dataset {
  Matrix features;  // rows = instances
  std::vector<int> labels;
  std::array<std::string, 2> class_names;
  std::vector<std::string> feature_names;
  std::string label_name = "label";

  std::size_t size() const { return labels.size(); }
  std::size_t feature_count() const { return static_cast<std::size_t>(features.cols()); }

  // Throws when the row count, label domain or finiteness invariants fail.
  void validate() const;
};

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column);
Dataset parse_csv(std::string_view text, std::string_view label_column);

// Shortest round-trip formatting, so parse_csv(to_csv(d)) is bit-identical.
std::string to_csv(const Dataset& d);

struct BalanceReport {
  std::array<std::size_t, 2> count_per_class{};
  double minority_ratio = 0.0;
  MetricGroup recommended_group = MetricGroup::Balanced;
};

inline constexpr double kBalancedRatioThreshold = 2.0 / 3.0;

BalanceReport class_balance(std::size_t count0, std::size_t count1);
BalanceReport class_balance(const Dataset& d);

inline constexpr std::array<int, 3> kAllowedFoldCounts = {5, 10, 15};

bool is_allowed_fold_count(int k);

struct Folds {
  int k = 0;
  std::vector<int> assignment;  // per instance, in [0,k)

  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> test_indices(int fold) const;
};

Folds stratified_kfold(const Dataset& d, int k, std::uint64_t seed);

// Copies the rows (and labels) at `rows`.
Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows);
std::vector<int> take(std::span<const int> v, std::span<const std::size_t> rows);

}  // namespace evoml
