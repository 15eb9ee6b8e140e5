#include "evoml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evoml/error.hpp"

namespace evoml {
namespace {

void activate(Activation a, Matrix& z) {
  switch (a) {
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    case Activation::Logistic: z = (1.0 / (1.0 + (-z.array()).exp())).matrix(); break;
  }
}

// Derivative expressed through the activation output h.
Matrix activation_derivative(Activation a, const Matrix& h) {
  switch (a) {
    case Activation::Relu: return (h.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: return (1.0 - h.array().square()).matrix();
    case Activation::Logistic: return (h.array() * (1.0 - h.array())).matrix();
  }
  return h;
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "logistic") return Activation::Logistic;
  throw Error(ErrorCode::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

MlpNetwork::MlpNetwork(int inputs, std::vector<int> hidden, Activation activation) : activation_(activation) {
  std::vector<int> widths{inputs};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    weights_.push_back(Matrix::Zero(widths[l], widths[l + 1]));
    biases_.push_back(Vector::Zero(widths[l + 1]));
  }
}

void MlpNetwork::initialize(Rng& rng) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double fan = static_cast<double>(weights_[l].rows() + weights_[l].cols());
    const double limit = std::sqrt(6.0 / fan);
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index i = 0; i < weights_[l].size(); ++i) weights_[l].data()[i] = u(rng);
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l](i) = u(rng);
  }
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  return n;
}

Vector MlpNetwork::parameters() const {
  Vector flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.segment(at, weights_[l].size()) = Eigen::Map<const Vector>(weights_[l].data(), weights_[l].size());
    at += weights_[l].size();
    flat.segment(at, biases_[l].size()) = biases_[l];
    at += biases_[l].size();
  }
  return flat;
}

void MlpNetwork::set_parameters(const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter vector has wrong length");
  }
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Vector>(weights_[l].data(), weights_[l].size()) = flat.segment(at, weights_[l].size());
    at += weights_[l].size();
    biases_[l] = flat.segment(at, biases_[l].size());
    at += biases_[l].size();
  }
}

Vector MlpNetwork::forward(const Matrix& X) const {
  Matrix h = X;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = (h * weights_[l]).rowwise() + biases_[l].transpose();
    if (l + 1 < weights_.size()) activate(activation_, z);
    h = std::move(z);
  }
  return h.col(0);
}

double MlpNetwork::loss_and_gradient(const Matrix& X, std::span<const double> y, Vector& gradient) const {
  const auto n = static_cast<double>(X.rows());
  std::vector<Matrix> acts{X};
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = (acts.back() * weights_[l]).rowwise() + biases_[l].transpose();
    if (l + 1 < weights_.size()) activate(activation_, z);
    acts.push_back(std::move(z));
  }
  const Matrix& logits = acts.back();
  double loss = 0.0;
  Matrix delta(X.rows(), 1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double z = logits(i, 0);
    const double t = y[static_cast<std::size_t>(i)];
    loss += softplus(z) - t * z;
    delta(i, 0) = (1.0 / (1.0 + std::exp(-z)) - t) / n;
  }

  gradient.resize(static_cast<Eigen::Index>(parameter_count()));
  std::vector<Eigen::Index> offsets(weights_.size());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    offsets[l] = at;
    at += weights_[l].size() + biases_[l].size();
  }
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const Matrix gw = acts[l].transpose() * delta;
    const Vector gb = delta.colwise().sum().transpose();
    gradient.segment(offsets[l], gw.size()) = Eigen::Map<const Vector>(gw.data(), gw.size());
    gradient.segment(offsets[l] + gw.size(), gb.size()) = gb;
    if (l > 0) delta = ((delta * weights_[l].transpose()).array() * activation_derivative(activation_, acts[l]).array()).matrix();
  }
  return loss / n;
}

void MlpNetwork::sgd_step(const Matrix& X, std::span<const double> y, double learning_rate) {
  const auto layers = weights_.size();
  acts_.resize(layers + 1);
  acts_[0] = X;
  for (std::size_t l = 0; l < layers; ++l) {
    acts_[l + 1].resize(X.rows(), weights_[l].cols());
    acts_[l + 1].noalias() = acts_[l] * weights_[l];
    acts_[l + 1].rowwise() += biases_[l].transpose();
    if (l + 1 < layers) activate(activation_, acts_[l + 1]);
  }
  const double n = static_cast<double>(X.rows());
  delta_.resize(X.rows(), 1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    delta_(i, 0) = (1.0 / (1.0 + std::exp(-acts_[layers](i, 0))) - y[static_cast<std::size_t>(i)]) / n;
  }
  for (std::size_t l = layers; l-- > 0;) {
    if (l > 0) {
      next_delta_.resize(X.rows(), weights_[l].rows());
      next_delta_.noalias() = delta_ * weights_[l].transpose();
      next_delta_.array() *= activation_derivative(activation_, acts_[l]).array();
    }
    weights_[l].noalias() -= learning_rate * (acts_[l].transpose() * delta_);
    biases_[l] -= learning_rate * delta_.colwise().sum().transpose();
    if (l > 0) std::swap(delta_, next_delta_);
  }
}

bool MlpNetwork::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

MlpClassifier::MlpClassifier(const MlpOptions& options, const Matrix& X, std::span<const int> y, std::uint64_t seed)
    : TrainedModel(static_cast<std::size_t>(X.cols())),
      options_(options),
      network_(static_cast<int>(X.cols()), options.hidden, options.activation) {
  require_two_classes(y);
  if (options.batch_size < 1 || options.epochs < 0) throw Error(ErrorCode::InvalidArgument, "bad MLP options");
  Matrix Z = X;
  if (options_.scale) {
    scaler_ = MinMaxScaler::fit(X);
    Z = scaler_.transform(X);
  }
  Rng rng(seed);
  network_.initialize(rng);

  const auto n = static_cast<std::size_t>(Z.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(options.batch_size);
  Matrix xb;
  std::vector<double> yb;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const Vector snapshot = network_.parameters();
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      xb.resize(static_cast<Eigen::Index>(end - start), Z.cols());
      yb.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = Z.row(static_cast<Eigen::Index>(order[i]));
        yb[i - start] = y[order[i]];
      }
      network_.sgd_step(xb, yb, options.learning_rate);
    }
    if (!network_.all_finite()) {
      // Diverged: keep the last finite weights.
      network_.set_parameters(snapshot);
      break;
    }
  }
}

ProbaMatrix MlpClassifier::do_predict(const Matrix& X) const {
  const Matrix Z = options_.scale ? scaler_.transform(X) : X;
  const Vector logits = network_.forward(Z);
  ProbaMatrix out(Z.rows(), 2);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const double p1 = 1.0 / (1.0 + std::exp(-logits(i)));
    out(i, 1) = p1;
    out(i, 0) = 1.0 - p1;
  }
  return out;
}

}  // namespace evoml
