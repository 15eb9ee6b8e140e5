#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "evoml/dataset.hpp"
#include "evoml/random.hpp"

namespace evoml {

enum class MaxFeatures { All, Sqrt };

struct TreeOptions {
  int max_depth = 12;
  int min_samples_split = 2;
  MaxFeatures max_features = MaxFeatures::All;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Classification: per-class frequencies. Regression: value[0] is the output.
  std::array<double, 2> value{};
  std::size_t samples = 0;

  bool is_leaf() const { return feature < 0; }
};

// Per-feature sorted distinct values and each row's rank among them. Built
// once per training matrix and shared by every tree fitted on it.
struct FeatureBins {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::uint32_t>> rank;  // [feature][row]

  static FeatureBins build(const Matrix& X);
};

// Binary CART. Rows go left when x[feature] <= threshold. Thresholds are
// midpoints between consecutive distinct values; among equally good splits
// the lowest feature index, then the lowest threshold, wins.
class DecisionTree {
 public:
  using LeafValue = std::function<double(std::span<const std::size_t> rows)>;

  // Gini impurity. `rows` may repeat indices (bootstrap samples).
  static DecisionTree fit_classifier(const Matrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                                     const TreeOptions& options, Rng& rng);
  static DecisionTree fit_classifier(const FeatureBins& bins, std::span<const int> y,
                                     std::span<const std::size_t> rows, const TreeOptions& options, Rng& rng);

  // Squared-error splits on `target`; leaf outputs come from `leaf_value`.
  static DecisionTree fit_regressor(const Matrix& X, std::span<const double> target,
                                    std::span<const std::size_t> rows, const TreeOptions& options, Rng& rng,
                                    const LeafValue& leaf_value);
  static DecisionTree fit_regressor(const FeatureBins& bins, std::span<const double> target,
                                    std::span<const std::size_t> rows, const TreeOptions& options, Rng& rng,
                                    const LeafValue& leaf_value);

  const TreeNode& leaf_for(const Matrix& X, Eigen::Index row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
  friend class TreeBuilder;
};

}  // namespace evoml
