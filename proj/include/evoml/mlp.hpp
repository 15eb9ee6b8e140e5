#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "evoml/learners.hpp"

namespace evoml {

enum class Activation { Relu, Tanh, Logistic };

Activation activation_from_string(std::string_view name);

struct MlpOptions {
  std::vector<int> hidden = {16};
  Activation activation = Activation::Relu;
  double learning_rate = 0.01;
  int epochs = 100;
  int batch_size = 16;
  bool scale = true;
};

// Feed-forward network with one logistic output unit, trained by plain
// mini-batch SGD on mean binary cross-entropy.
class MlpNetwork {
 public:
  MlpNetwork(int inputs, std::vector<int> hidden, Activation activation);

  void initialize(Rng& rng);

  // Flat view over all weights then biases, layer by layer.
  Vector parameters() const;
  void set_parameters(const Vector& flat);
  std::size_t parameter_count() const;

  // Logits (one per row).
  Vector forward(const Matrix& X) const;

  // Mean cross-entropy over the rows of X and its gradient w.r.t. parameters().
  double loss_and_gradient(const Matrix& X, std::span<const double> y, Vector& gradient) const;

  // One SGD update on a mini-batch; same gradient as loss_and_gradient.
  void sgd_step(const Matrix& X, std::span<const double> y, double learning_rate);

  bool all_finite() const;

 private:
  std::vector<Matrix> acts_;  // scratch for sgd_step
  Matrix delta_;
  Matrix next_delta_;

  Activation activation_;
  std::vector<Matrix> weights_;  // layer l maps width[l] -> width[l+1]
  std::vector<Vector> biases_;
};

class MlpClassifier final : public TrainedModel {
 public:
  MlpClassifier(const MlpOptions& options, const Matrix& X, std::span<const int> y, std::uint64_t seed);

  const MlpNetwork& network() const { return network_; }

 protected:
  ProbaMatrix do_predict(const Matrix& X) const override;

 private:
  MlpOptions options_;
  MinMaxScaler scaler_;
  MlpNetwork network_;
};

}  // namespace evoml
