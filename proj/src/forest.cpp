#include "evoml/forest.hpp"

#include <numeric>

#include "evoml/error.hpp"

namespace evoml {

RandomForest::RandomForest(const ForestOptions& options, const Matrix& X, std::span<const int> y,
                           std::uint64_t seed)
    : TrainedModel(static_cast<std::size_t>(X.cols())) {
  require_two_classes(y);
  if (options.trees < 1) throw Error(ErrorCode::InvalidArgument, "forest needs at least one tree");
  Rng rng(seed);
  const std::size_t n = y.size();
  std::vector<std::size_t> rows(n);
  std::uniform_int_distribution<std::size_t> draw(0, n - 1);
  const FeatureBins bins = FeatureBins::build(X);
  trees_.reserve(static_cast<std::size_t>(options.trees));
  for (int t = 0; t < options.trees; ++t) {
    if (options.bootstrap) {
      for (auto& r : rows) r = draw(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees_.push_back(DecisionTree::fit_classifier(bins, y, rows, options.tree, rng));
  }
}

ProbaMatrix RandomForest::do_predict(const Matrix& X) const {
  ProbaMatrix out = ProbaMatrix::Zero(X.rows(), 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double p1 = 0.0;
    for (const auto& tree : trees_) p1 += tree.leaf_for(X, i).value[1];
    p1 /= static_cast<double>(trees_.size());
    out(i, 1) = p1;
    out(i, 0) = 1.0 - p1;
  }
  return out;
}

}  // namespace evoml
