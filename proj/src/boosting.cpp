#include "evoml/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evoml/error.hpp"

namespace evoml {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

GradientBoosting::GradientBoosting(const BoostingOptions& options, const Matrix& X, std::span<const int> y,
                                   std::uint64_t seed)
    : TrainedModel(static_cast<std::size_t>(X.cols())), options_(options) {
  require_two_classes(y);
  if (options.stages < 0) throw Error(ErrorCode::InvalidArgument, "stage count must be non-negative");
  if (!(options.subsample > 0.0 && options.subsample <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "subsample must lie in (0,1]");
  }
  const std::size_t n = y.size();
  const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double p = positives / static_cast<double>(n);
  prior_ = std::log(p / (1.0 - p));

  Rng rng(seed);
  std::vector<double> score(n, prior_);
  std::vector<double> prob(n);
  std::vector<double> residual(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto sample_size = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(options.subsample * static_cast<double>(n))));

  TreeOptions tree_options;
  tree_options.max_depth = options.max_depth;
  tree_options.min_samples_split = 2;
  tree_options.max_features = MaxFeatures::All;

  const DecisionTree::LeafValue newton = [&](std::span<const std::size_t> rows) {
    double num = 0.0, den = 0.0;
    for (auto r : rows) {
      num += residual[r];
      den += prob[r] * (1.0 - prob[r]);
    }
    return den < 1e-150 ? 0.0 : num / den;
  };

  const FeatureBins bins = FeatureBins::build(X);
  trees_.reserve(static_cast<std::size_t>(options.stages));
  for (int stage = 0; stage < options.stages; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      prob[i] = sigmoid(score[i]);
      residual[i] = static_cast<double>(y[i]) - prob[i];
    }
    std::vector<std::size_t> rows = all;
    if (sample_size < n) {
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(sample_size);
      std::sort(rows.begin(), rows.end());
    }
    trees_.push_back(DecisionTree::fit_regressor(bins, residual, rows, tree_options, rng, newton));
    const auto& tree = trees_.back();
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += options_.learning_rate * tree.leaf_for(X, static_cast<Eigen::Index>(i)).value[0];
    }
  }
}

Vector GradientBoosting::decision_function(const Matrix& X) const {
  Vector f = Vector::Constant(X.rows(), prior_);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (const auto& tree : trees_) f(i) += options_.learning_rate * tree.leaf_for(X, i).value[0];
  }
  return f;
}

ProbaMatrix GradientBoosting::do_predict(const Matrix& X) const {
  const Vector f = decision_function(X);
  ProbaMatrix out(X.rows(), 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double p1 = sigmoid(f(i));
    out(i, 1) = p1;
    out(i, 0) = 1.0 - p1;
  }
  return out;
}

}  // namespace evoml
