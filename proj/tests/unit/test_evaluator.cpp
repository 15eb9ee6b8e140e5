#include <doctest.h>

#include <cmath>

#include "evoml/error.hpp"
#include "evoml/evaluator.hpp"
#include "evoml/learners.hpp"
#include "support.hpp"

using namespace evoml;

namespace {

const std::vector<MetricId> kBalanced = metrics_in(MetricGroup::Balanced);

ModelConfig knn(int k) {
  ModelConfig c;
  c.id = "KNN" + std::to_string(k);
  c.algorithm = Algorithm::KNN;
  c.params = {{"n_neighbors", std::int64_t{k}}, {"weights", std::string("uniform")}, {"metric", std::string("euclidean")}};
  return c;
}

}  // namespace

TEST_CASE("overall performance") {
  MetricScores s{{MetricId::Accuracy, 0.8}, {MetricId::F1, 0.6}, {MetricId::LogLoss, std::log(2.0)}, {MetricId::MCC, 0.2}};
  const std::vector<MetricId> two{MetricId::Accuracy, MetricId::F1};
  CHECK(overall_performance(s, two) == doctest::Approx(0.7));
  const std::vector<MetricId> ll{MetricId::LogLoss};
  CHECK(overall_performance(s, ll) == doctest::Approx(0.5));
  const std::vector<MetricId> both{MetricId::LogLoss, MetricId::MCC};
  CHECK(overall_performance(s, both) == doctest::Approx((0.5 + 0.6) / 2));
  MetricScores perfect;
  for (auto m : kAllMetrics) perfect[m] = m == MetricId::LogLoss ? 0.0 : 1.0;
  CHECK(overall_performance(perfect, metrics_in(MetricGroup::Imbalanced)) == 1.0);
  CHECK(overall_performance(perfect, kBalanced) == 1.0);
  const std::vector<MetricId> none;
  CHECK_THROWS_AS(overall_performance(s, none), Error);
}

TEST_CASE("selection validation") {
  const std::vector<MetricId> none;
  CHECK_THROWS(validate_selection(none));
  const std::vector<MetricId> mixed{MetricId::Accuracy, MetricId::MCC};
  CHECK_THROWS(validate_selection(mixed));
  const std::vector<MetricId> dup{MetricId::Accuracy, MetricId::Accuracy};
  CHECK_THROWS(validate_selection(dup));
  CHECK_NOTHROW(validate_selection(kBalanced));
}

TEST_CASE("overall is monotone in each selected metric") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    MetricScores s;
    for (auto m : kAllMetrics) s[m] = m == MetricId::MCC ? 2 * u(rng) - 1 : (m == MetricId::LogLoss ? 3 * u(rng) : u(rng));
    for (auto group : {MetricGroup::Balanced, MetricGroup::Imbalanced}) {
      const auto sel = metrics_in(group);
      const double base = overall_performance(s, sel);
      for (auto m : sel) {
        auto better = s;
        better[m] += m == MetricId::LogLoss ? -0.01 : 0.01;
        CHECK(overall_performance(better, sel) >= base);
      }
    }
  }
}

TEST_CASE("out-of-fold coverage on the ten-instance toy set") {
  const auto d = testing::blobs(5, 5, 2, 2.0, 1);
  const auto folds = stratified_kfold(d, 5, 3);
  const auto m = evaluate(knn(1), d, folds, kBalanced, 7);
  REQUIRE(m.oof_proba.rows() == 10);
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(m.oof_proba(i, 0) + m.oof_proba(i, 1) == doctest::Approx(1.0));
  CHECK(m.metric_scores.size() == 8);
}

TEST_CASE("each row comes from the model that did not see it") {
  const auto d = testing::blobs(15, 15, 3, 1.0, 4);
  const auto folds = stratified_kfold(d, 5, 2);
  const auto c = knn(3);
  const auto m = evaluate(c, d, folds, kBalanced, 7);
  for (int f = 0; f < 5; ++f) {
    const auto train_rows = folds.train_indices(f);
    const auto test_rows = folds.test_indices(f);
    const auto model = train(c, take_rows(d.features, train_rows), take(d.labels, train_rows), 0);
    const auto p = model->predict_proba(take_rows(d.features, test_rows));
    for (std::size_t j = 0; j < test_rows.size(); ++j) {
      CHECK(m.oof_proba(static_cast<Eigen::Index>(test_rows[j]), 1) == p(static_cast<Eigen::Index>(j), 1));
    }
  }
}

TEST_CASE("perfect out-of-fold predictions") {
  const auto d = testing::blobs(10, 10, 2, 50.0, 1);
  const auto m = evaluate(knn(1), d, stratified_kfold(d, 5, 1), kBalanced, 1);
  for (auto metric : kBalanced) CHECK(m.metric_scores.at(metric) == 1.0);
  CHECK(m.overall == 1.0);
}

TEST_CASE("seeded evaluation on heart data is bit-identical") {
  const auto d = load_csv(testing::heart_path(), "target");
  const auto folds = stratified_kfold(d, 10, 1);
  ModelConfig rf;
  rf.id = "RF1";
  rf.algorithm = Algorithm::RF;
  rf.params = {{"n_estimators", std::int64_t{30}},
               {"max_depth", std::int64_t{6}},
               {"min_samples_split", std::int64_t{2}},
               {"max_features", std::string("sqrt")}};
  const auto a = evaluate(rf, d, folds, kBalanced, 99);
  const auto b = evaluate(rf, d, folds, kBalanced, 99);
  CHECK(a.overall == b.overall);
  CHECK(a.oof_proba == b.oof_proba);
  CHECK(a.metric_scores.at(MetricId::Accuracy) > 0.75);
}

TEST_CASE("training failures name the fold") {
  auto d = testing::blobs(10, 10, 2, 1.0, 1);
  const auto folds = stratified_kfold(d, 5, 1);
  d.labels.assign(d.size(), 0);
  d.labels[0] = 1;
  try {
    evaluate(knn(1), d, folds, kBalanced, 0);
    FAIL("expected EvaluationFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EvaluationFailed);
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
    CHECK(std::string(e.what()).find("KNN1") != std::string::npos);
  }
}

TEST_CASE("predictive power") {
  std::vector<int> y{1, 0};
  ProbaMatrix p1(2, 2), p2(2, 2);
  p1 << 0.4, 0.6, 0.7, 0.3;
  p2 << 0.2, 0.8, 0.9, 0.1;
  const auto a = testing::model_with("a", Algorithm::LR, p1, y, kBalanced);
  const auto b = testing::model_with("b", Algorithm::LR, p2, y, kBalanced);
  Dataset d;
  d.labels = y;
  d.features = Matrix::Zero(2, 1);
  std::vector<const EvaluatedModel*> one{&a};
  CHECK(predictive_power(one, d)[1] == doctest::Approx(0.7));
  std::vector<const EvaluatedModel*> both{&a, &b};
  const auto pw = predictive_power(both, d);
  CHECK(pw[0] == doctest::Approx(0.7));
  CHECK(pw[1] == doctest::Approx(0.8));
  std::vector<const EvaluatedModel*> empty;
  CHECK_THROWS_AS(predictive_power(empty, d), Error);
}

TEST_CASE("power of a union is the size-weighted mean") {
  Rng rng(5);
  const auto y = testing::random_labels(40, rng);
  Dataset d;
  d.labels = y;
  d.features = Matrix::Zero(40, 1);
  std::vector<EvaluatedModel> models;
  for (int i = 0; i < 7; ++i) models.push_back(testing::model_with("m" + std::to_string(i), Algorithm::KNN, testing::random_proba(40, rng), y, kBalanced));
  const std::span<const EvaluatedModel> all(models);
  const auto left = predictive_power(all.subspan(0, 3), d);
  const auto right = predictive_power(all.subspan(3), d);
  const auto whole = predictive_power(all, d);
  for (std::size_t i = 0; i < 40; ++i) CHECK(whole[i] == doctest::Approx((3 * left[i] + 4 * right[i]) / 7).epsilon(1e-14));
}
