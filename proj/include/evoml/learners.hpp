#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "evoml/dataset.hpp"
#include "evoml/hyperparams.hpp"
#include "evoml/metrics.hpp"

namespace evoml {

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  // Throws ShapeMismatch when X has the wrong column count.
  ProbaMatrix predict_proba(const Matrix& X) const;
  std::size_t feature_count() const { return feature_count_; }

 protected:
  explicit TrainedModel(std::size_t feature_count) : feature_count_(feature_count) {}
  virtual ProbaMatrix do_predict(const Matrix& X) const = 0;

 private:
  std::size_t feature_count_;
};

// Throws DegenerateTraining unless y holds both classes.
void require_two_classes(std::span<const int> y);

// Per-feature min-max scaling fitted on training rows only. Constant features map to 0.
struct MinMaxScaler {
  Vector min;
  Vector inv_range;

  static MinMaxScaler fit(const Matrix& X);
  Matrix transform(const Matrix& X) const;
};

enum class KnnWeights { Uniform, Distance };
enum class KnnMetric { Euclidean, Manhattan, Chebyshev };

struct KnnOptions {
  int neighbors = 5;
  KnnWeights weights = KnnWeights::Uniform;
  KnnMetric metric = KnnMetric::Euclidean;
  bool scale = true;
};

class KnnClassifier final : public TrainedModel {
 public:
  KnnClassifier(const KnnOptions& options, const Matrix& X, std::span<const int> y);

 protected:
  ProbaMatrix do_predict(const Matrix& X) const override;

 private:
  KnnOptions options_;
  MinMaxScaler scaler_;
  Matrix train_;
  std::vector<int> labels_;
};

struct LogisticOptions {
  double inverse_regularization = 1.0;  // C; the L2 penalty weight is 1/C
  int max_iterations = 100;
  bool scale = true;
};

// Full-batch gradient descent on mean log-loss + ||w||^2 / (2 C n); bias unpenalized.
class LogisticRegression final : public TrainedModel {
 public:
  LogisticRegression(const LogisticOptions& options, const Matrix& X, std::span<const int> y);

  const Vector& weights() const { return weights_; }
  double bias() const { return bias_; }

 protected:
  ProbaMatrix do_predict(const Matrix& X) const override;

 private:
  LogisticOptions options_;
  MinMaxScaler scaler_;
  Vector weights_;
  double bias_ = 0.0;
};

std::unique_ptr<TrainedModel> train(const ModelConfig& config, const Matrix& X, std::span<const int> y,
                                    std::uint64_t seed);

}  // namespace evoml
