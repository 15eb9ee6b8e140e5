#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evoml/learners.hpp"
#include "evoml/tree.hpp"

namespace evoml {

struct ForestOptions {
  int trees = 100;
  TreeOptions tree;
  bool bootstrap = true;
};

// Prediction is the mean of the trees' leaf class frequencies.
class RandomForest final : public TrainedModel {
 public:
  RandomForest(const ForestOptions& options, const Matrix& X, std::span<const int> y, std::uint64_t seed);

  const std::vector<DecisionTree>& trees() const { return trees_; }

 protected:
  ProbaMatrix do_predict(const Matrix& X) const override;

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace evoml
