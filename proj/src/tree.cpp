#include "evoml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace evoml {

FeatureBins FeatureBins::build(const Matrix& X) {
  FeatureBins bins;
  const auto n = static_cast<std::size_t>(X.rows());
  bins.values.resize(static_cast<std::size_t>(X.cols()));
  bins.rank.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& values = bins.values[static_cast<std::size_t>(f)];
    values.assign(X.col(f).data(), X.col(f).data() + n);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    auto& rank = bins.rank[static_cast<std::size_t>(f)];
    rank.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double v = X(static_cast<Eigen::Index>(r), f);
      rank[r] = static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin());
    }
  }
  return bins;
}

class TreeBuilder {
 public:
  enum class Mode { Gini, SquaredError };

  TreeBuilder(Mode mode, const FeatureBins& bins, std::span<const int> labels, std::span<const double> target,
              const TreeOptions& options, Rng& rng, const DecisionTree::LeafValue* leaf_value)
      : mode_(mode), bins_(bins), labels_(labels), target_(target), options_(options), rng_(rng), leaf_value_(leaf_value) {
    const auto d = static_cast<int>(bins.values.size());
    features_per_node_ = options.max_features == MaxFeatures::Sqrt
                             ? std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))))
                             : d;
    all_features_.resize(static_cast<std::size_t>(d));
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    DecisionTree tree;
    grow(tree, std::move(rows), 0);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    std::uint32_t left_max_rank = 0;  // rows with rank <= this go left
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();  // larger is better
  };

  double response(std::size_t r) const {
    return mode_ == Mode::Gini ? static_cast<double>(labels_[r]) : target_[r];
  }

  void fill_leaf(TreeNode& node, const std::vector<std::size_t>& rows) const {
    node.samples = rows.size();
    if (mode_ == Mode::Gini) {
      double ones = 0.0;
      for (auto r : rows) ones += labels_[r];
      const double n = static_cast<double>(rows.size());
      node.value = {(n - ones) / n, ones / n};
    } else {
      node.value = {(*leaf_value_)(rows), 0.0};
    }
  }

  bool is_pure(const std::vector<std::size_t>& rows) const {
    const double first = response(rows.front());
    return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return response(r) == first; });
  }

  std::vector<int> candidate_features() {
    if (features_per_node_ >= static_cast<int>(all_features_.size())) return all_features_;
    std::vector<int> pool = all_features_;
    std::vector<int> chosen;
    for (int i = 0; i < features_per_node_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng_)]);
      chosen.push_back(pool[static_cast<std::size_t>(i)]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  // Equivalent to sorting the node's rows by value and sweeping every
  // boundary between distinct values, but costs O(rows + distinct values).
  Split best_split(const std::vector<std::size_t>& rows) {
    Split best;
    double total_sum = 0.0;
    for (auto r : rows) total_sum += response(r);
    const double total_n = static_cast<double>(rows.size());

    for (int f : candidate_features()) {
      const auto& values = bins_.values[static_cast<std::size_t>(f)];
      const auto& rank = bins_.rank[static_cast<std::size_t>(f)];
      count_.assign(values.size(), 0.0);
      sum_.assign(values.size(), 0.0);
      for (auto r : rows) {
        count_[rank[r]] += 1.0;
        sum_[rank[r]] += response(r);
      }
      double nl = 0.0, left_sum = 0.0;
      std::ptrdiff_t prev = -1;
      for (std::size_t b = 0; b < values.size(); ++b) {
        if (count_[b] == 0.0) continue;
        if (prev >= 0) {
          const double nr = total_n - nl;
          const double right_sum = total_sum - left_sum;
          double score = 0.0;
          if (mode_ == Mode::Gini) {
            // Maximizing sum_c n_c^2 / n per side minimizes weighted Gini.
            const double l1 = left_sum, l0 = nl - left_sum;
            const double r1 = right_sum, r0 = nr - right_sum;
            score = (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr;
          } else {
            score = left_sum * left_sum / nl + right_sum * right_sum / nr;
          }
          if (best.feature < 0 || score > best.score + 1e-12 * std::max(1.0, std::abs(best.score))) {
            const double lo = values[static_cast<std::size_t>(prev)], hi = values[b];
            double mid = lo + (hi - lo) / 2.0;
            if (!(mid < hi)) mid = lo;
            best = {f, static_cast<std::uint32_t>(prev), mid, score};
          }
        }
        nl += count_[b];
        left_sum += sum_[b];
        prev = static_cast<std::ptrdiff_t>(b);
      }
    }
    return best;
  }

  int grow(DecisionTree& tree, std::vector<std::size_t> rows, int depth) {
    const int index = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    fill_leaf(tree.nodes_[static_cast<std::size_t>(index)], rows);

    if (depth >= options_.max_depth || static_cast<int>(rows.size()) < options_.min_samples_split ||
        rows.size() < 2 || is_pure(rows)) {
      return index;
    }
    const Split split = best_split(rows);
    if (split.feature < 0) return index;

    const auto& rank = bins_.rank[static_cast<std::size_t>(split.feature)];
    std::vector<std::size_t> left, right;
    for (auto r : rows) (rank[r] <= split.left_max_rank ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(tree, std::move(left), depth + 1);
    const int r = grow(tree, std::move(right), depth + 1);
    auto& node = tree.nodes_[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  Mode mode_;
  const FeatureBins& bins_;
  std::span<const int> labels_;
  std::span<const double> target_;
  TreeOptions options_;
  Rng& rng_;
  const DecisionTree::LeafValue* leaf_value_;
  int features_per_node_ = 0;
  std::vector<int> all_features_;
  std::vector<double> count_;
  std::vector<double> sum_;
};

DecisionTree DecisionTree::fit_classifier(const FeatureBins& bins, std::span<const int> y,
                                          std::span<const std::size_t> rows, const TreeOptions& options, Rng& rng) {
  TreeBuilder builder(TreeBuilder::Mode::Gini, bins, y, {}, options, rng, nullptr);
  return builder.build({rows.begin(), rows.end()});
}

DecisionTree DecisionTree::fit_classifier(const Matrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                                          const TreeOptions& options, Rng& rng) {
  return fit_classifier(FeatureBins::build(X), y, rows, options, rng);
}

DecisionTree DecisionTree::fit_regressor(const FeatureBins& bins, std::span<const double> target,
                                         std::span<const std::size_t> rows, const TreeOptions& options, Rng& rng,
                                         const LeafValue& leaf_value) {
  TreeBuilder builder(TreeBuilder::Mode::SquaredError, bins, {}, target, options, rng, &leaf_value);
  return builder.build({rows.begin(), rows.end()});
}

DecisionTree DecisionTree::fit_regressor(const Matrix& X, std::span<const double> target,
                                         std::span<const std::size_t> rows, const TreeOptions& options, Rng& rng,
                                         const LeafValue& leaf_value) {
  return fit_regressor(FeatureBins::build(X), target, rows, options, rng, leaf_value);
}

const TreeNode& DecisionTree::leaf_for(const Matrix& X, Eigen::Index row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(X(row, n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes_[i];
}

int DecisionTree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
    }
  }
  return deepest;
}

}  // namespace evoml
