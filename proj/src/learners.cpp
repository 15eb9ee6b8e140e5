#include "evoml/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evoml/boosting.hpp"
#include "evoml/error.hpp"
#include "evoml/forest.hpp"
#include "evoml/mlp.hpp"

namespace evoml {

ProbaMatrix TrainedModel::predict_proba(const Matrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != feature_count_) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(feature_count_) + " columns, got " +
                                              std::to_string(X.cols()));
  }
  return do_predict(X);
}

void require_two_classes(std::span<const int> y) {
  if (y.size() < 2) throw Error(ErrorCode::DegenerateTraining, "need at least 2 training instances");
  const bool any0 = std::find(y.begin(), y.end(), 0) != y.end();
  const bool any1 = std::find(y.begin(), y.end(), 1) != y.end();
  if (!any0 || !any1) throw Error(ErrorCode::DegenerateTraining, "training labels contain a single class");
}

MinMaxScaler MinMaxScaler::fit(const Matrix& X) {
  MinMaxScaler s;
  s.min = X.colwise().minCoeff().transpose();
  const Vector max = X.colwise().maxCoeff().transpose();
  s.inv_range.resize(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double range = max(c) - s.min(c);
    s.inv_range(c) = range > 0.0 ? 1.0 / range : 0.0;
  }
  return s;
}

Matrix MinMaxScaler::transform(const Matrix& X) const {
  return ((X.rowwise() - min.transpose()).array().rowwise() * inv_range.transpose().array()).matrix();
}

// ---------------------------------------------------------------------------
// k-nearest neighbours

KnnClassifier::KnnClassifier(const KnnOptions& options, const Matrix& X, std::span<const int> y)
    : TrainedModel(static_cast<std::size_t>(X.cols())), options_(options), labels_(y.begin(), y.end()) {
  require_two_classes(y);
  if (options.neighbors < 1) throw Error(ErrorCode::InvalidArgument, "neighbors must be >= 1");
  if (options_.scale) {
    scaler_ = MinMaxScaler::fit(X);
    train_ = scaler_.transform(X);
  } else {
    train_ = X;
  }
}

ProbaMatrix KnnClassifier::do_predict(const Matrix& X) const {
  const Matrix Q = options_.scale ? scaler_.transform(X) : X;
  const auto n = static_cast<std::size_t>(train_.rows());
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(options_.neighbors), n);
  ProbaMatrix out(Q.rows(), 2);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (Eigen::Index q = 0; q < Q.rows(); ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto diff = (train_.row(static_cast<Eigen::Index>(i)) - Q.row(q)).array().abs();
      double d = 0.0;
      switch (options_.metric) {
        case KnnMetric::Euclidean: d = std::sqrt(diff.square().sum()); break;
        case KnnMetric::Manhattan: d = diff.sum(); break;
        case KnnMetric::Chebyshev: d = diff.maxCoeff(); break;
      }
      dist[i] = {d, i};
    }
    // Pair ordering breaks distance ties by the lower instance index.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double w[2] = {0.0, 0.0};
    const bool exact = options_.weights == KnnWeights::Distance && dist[0].first == 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto [d, idx] = dist[j];
      double weight = 1.0;
      if (options_.weights == KnnWeights::Distance) {
        if (exact) weight = d == 0.0 ? 1.0 : 0.0;
        else weight = 1.0 / d;
      }
      w[labels_[idx]] += weight;
    }
    const double total = w[0] + w[1];
    out(q, 0) = w[0] / total;
    out(q, 1) = w[1] / total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

LogisticRegression::LogisticRegression(const LogisticOptions& options, const Matrix& X, std::span<const int> y)
    : TrainedModel(static_cast<std::size_t>(X.cols())), options_(options) {
  require_two_classes(y);
  if (options.inverse_regularization <= 0.0) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  Matrix Z = X;
  if (options_.scale) {
    scaler_ = MinMaxScaler::fit(X);
    Z = scaler_.transform(X);
  }
  const auto n = static_cast<double>(Z.rows());
  Vector target(Z.rows());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) target(i) = y[static_cast<std::size_t>(i)];

  const double lambda = 1.0 / (options_.inverse_regularization * n);
  // Lipschitz bound of the gradient; the bias column contributes n / 4n.
  const double lipschitz = (Z.squaredNorm() + n) / (4.0 * n) + lambda;
  const double step = 1.0 / lipschitz;

  weights_ = Vector::Zero(Z.cols());
  bias_ = 0.0;
  for (int it = 0; it < options_.max_iterations; ++it) {
    const Vector logits = (Z * weights_).array() + bias_;
    const Vector residual = (1.0 / (1.0 + (-logits.array()).exp())).matrix() - target;
    const Vector grad_w = Z.transpose() * residual / n + lambda * weights_;
    const double grad_b = residual.sum() / n;
    weights_ -= step * grad_w;
    bias_ -= step * grad_b;
    if (grad_w.norm() + std::abs(grad_b) < 1e-10) break;
  }
}

ProbaMatrix LogisticRegression::do_predict(const Matrix& X) const {
  const Matrix Z = options_.scale ? scaler_.transform(X) : X;
  const Vector logits = (Z * weights_).array() + bias_;
  ProbaMatrix out(Z.rows(), 2);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const double p1 = 1.0 / (1.0 + std::exp(-logits(i)));
    out(i, 1) = p1;
    out(i, 0) = 1.0 - p1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch from a sampled configuration

std::unique_ptr<TrainedModel> train(const ModelConfig& c, const Matrix& X, std::span<const int> y,
                                    std::uint64_t seed) {
  require_two_classes(y);
  switch (c.algorithm) {
    case Algorithm::KNN: {
      KnnOptions o;
      o.neighbors = static_cast<int>(c.get_int("n_neighbors"));
      o.weights = c.get_str("weights") == "distance" ? KnnWeights::Distance : KnnWeights::Uniform;
      const auto& m = c.get_str("metric");
      o.metric = m == "manhattan" ? KnnMetric::Manhattan : m == "chebyshev" ? KnnMetric::Chebyshev : KnnMetric::Euclidean;
      return std::make_unique<KnnClassifier>(o, X, y);
    }
    case Algorithm::LR: {
      LogisticOptions o;
      o.inverse_regularization = c.get_real("C");
      o.max_iterations = static_cast<int>(c.get_int("max_iter"));
      return std::make_unique<LogisticRegression>(o, X, y);
    }
    case Algorithm::MLP: {
      MlpOptions o;
      o.hidden = parse_layer_sizes(c.get_str("hidden_layer_sizes"));
      o.activation = activation_from_string(c.get_str("activation"));
      o.learning_rate = c.get_real("learning_rate");
      o.epochs = static_cast<int>(c.get_int("epochs"));
      return std::make_unique<MlpClassifier>(o, X, y, seed);
    }
    case Algorithm::RF: {
      ForestOptions o;
      o.trees = static_cast<int>(c.get_int("n_estimators"));
      o.tree.max_depth = static_cast<int>(c.get_int("max_depth"));
      o.tree.min_samples_split = static_cast<int>(c.get_int("min_samples_split"));
      o.tree.max_features = c.get_str("max_features") == "sqrt" ? MaxFeatures::Sqrt : MaxFeatures::All;
      return std::make_unique<RandomForest>(o, X, y, seed);
    }
    case Algorithm::GradB: {
      BoostingOptions o;
      o.stages = static_cast<int>(c.get_int("n_estimators"));
      o.learning_rate = c.get_real("learning_rate");
      o.max_depth = static_cast<int>(c.get_int("max_depth"));
      o.subsample = c.get_real("subsample");
      return std::make_unique<GradientBoosting>(o, X, y, seed);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

}  // namespace evoml
