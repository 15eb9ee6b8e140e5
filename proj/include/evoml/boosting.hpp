#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evoml/learners.hpp"
#include "evoml/tree.hpp"

namespace evoml {

struct BoostingOptions {
  int stages = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double subsample = 1.0;
};

// Binomial-deviance gradient boosting. Starts from the constant log-odds of
// the training prior; each stage fits a squared-error tree to the residuals
// y - p and sets leaf outputs with one Newton step.
class GradientBoosting final : public TrainedModel {
 public:
  GradientBoosting(const BoostingOptions& options, const Matrix& X, std::span<const int> y, std::uint64_t seed);

  double prior_log_odds() const { return prior_; }
  std::size_t stage_count() const { return trees_.size(); }

  // Raw additive score F(x) before the logistic link.
  Vector decision_function(const Matrix& X) const;

 protected:
  ProbaMatrix do_predict(const Matrix& X) const override;

 private:
  BoostingOptions options_;
  double prior_ = 0.0;
  std::vector<DecisionTree> trees_;
};

}  // namespace evoml
