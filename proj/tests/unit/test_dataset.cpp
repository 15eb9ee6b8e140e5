#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <set>

#include "evoml/dataset.hpp"
#include "evoml/error.hpp"
#include "support.hpp"

using namespace evoml;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an evoml::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("small csv") {
  const auto d = parse_csv("x,label\n1,0\n2,0\n3,1\n4,1\n", "label");
  CHECK(d.size() == 4);
  CHECK(d.feature_count() == 1);
  CHECK(d.labels == std::vector<int>{0, 0, 1, 1});
  CHECK(d.class_names[0] == "0");
  CHECK(d.features(2, 0) == 3.0);
}

TEST_CASE("labels follow first occurrence") {
  const auto d = parse_csv("a,cls,b\n1,yes,2\n3,no,4\n5,yes,6\n", "cls");
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.class_names == std::array<std::string, 2>{"yes", "no"});
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.features(1, 1) == 4.0);
}

TEST_CASE("csv dialect details") {
  const auto d = parse_csv("\xEF\xBB\xBF\"x\",\"y\"\r\n1.5,a\r\n\r\n-2e3,b\r\n", "y");
  CHECK(d.size() == 2);
  CHECK(d.features(0, 0) == 1.5);
  CHECK(d.features(1, 0) == -2000.0);
}

TEST_CASE("ingestion errors") {
  CHECK(code_of([] { parse_csv("x,y\n1,a\n2,b\n3,c\n", "y"); }) == ErrorCode::NotBinary);
  CHECK(code_of([] { parse_csv("x,y\n1,a\n2,a\n", "y"); }) == ErrorCode::NotBinary);
  CHECK(code_of([] { parse_csv("x,y\n1,a\n2,b\n", "z"); }) == ErrorCode::MissingColumn);
  CHECK(code_of([] { parse_csv("x,y\none,a\n2,b\n", "y"); }) == ErrorCode::NonNumericFeature);
  CHECK(code_of([] { parse_csv("x,y\nnan,a\n2,b\n", "y"); }) == ErrorCode::NonNumericFeature);
  CHECK(code_of([] { parse_csv("", "y"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_csv("x,y\n", "y"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_csv("x,y\n1,a,3\n2,b\n", "y"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { load_csv("/nonexistent/file.csv", "y"); }) == ErrorCode::Io);
}

TEST_CASE("csv round trip is bit-exact") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  auto d = testing::blobs(7, 9, 4, 1.0, 5);
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) d.features(i, 2) = u(rng) / 3.0;
  d.features(0, 0) = 1e-300;
  d.features(1, 0) = -0.0;
  const auto back = parse_csv(to_csv(d), d.label_name);
  CHECK(back.labels == d.labels);
  CHECK(back.feature_names == d.feature_names);
  REQUIRE(back.features.rows() == d.features.rows());
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    for (Eigen::Index c = 0; c < d.features.cols(); ++c) {
      CHECK(std::memcmp(&back.features(i, c), &d.features(i, c), sizeof(double)) == 0);
    }
  }
}

TEST_CASE("heart data shipped with the tests") {
  const auto d = load_csv(testing::heart_path(), "target");
  CHECK(d.size() == 303);
  CHECK(d.feature_count() == 13);
  const auto b = class_balance(d);
  CHECK(b.count_per_class[0] == 164);
  CHECK(b.count_per_class[1] == 139);
  CHECK(d.class_names[0] == "healthy");
  CHECK(b.recommended_group == MetricGroup::Balanced);
}

TEST_CASE("class balance") {
  const auto split_138_165 = class_balance(138, 165);
  CHECK(split_138_165.minority_ratio == doctest::Approx(138.0 / 165.0));
  CHECK(split_138_165.recommended_group == MetricGroup::Balanced);
  CHECK(class_balance(50, 50).minority_ratio == 1.0);
  CHECK(class_balance(50, 50).recommended_group == MetricGroup::Balanced);
  const auto skewed = class_balance(10, 90);
  CHECK(skewed.minority_ratio == doctest::Approx(10.0 / 90.0));
  CHECK(skewed.recommended_group == MetricGroup::Imbalanced);
  CHECK(class_balance(2, 3).recommended_group == MetricGroup::Balanced);
  CHECK(class_balance(65, 100).recommended_group == MetricGroup::Imbalanced);
}

TEST_CASE("ten instances in five folds") {
  const auto d = testing::blobs(5, 5, 2, 3.0, 1);
  const auto folds = stratified_kfold(d, 5, 9);
  for (int f = 0; f < 5; ++f) {
    const auto test = folds.test_indices(f);
    REQUIRE(test.size() == 2);
    CHECK(d.labels[test[0]] + d.labels[test[1]] == 1);
  }
}

TEST_CASE("fold count validation") {
  const auto d = testing::blobs(20, 20, 2, 3.0, 1);
  CHECK(code_of([&] { stratified_kfold(d, 7, 0); }) == ErrorCode::InvalidArgument);
  const auto tiny = testing::blobs(4, 20, 2, 3.0, 1);
  CHECK(code_of([&] { stratified_kfold(tiny, 5, 0); }) == ErrorCode::TooFewInstances);
}

TEST_CASE("heart folds are stratified") {
  const auto d = load_csv(testing::heart_path(), "target");
  const auto b = class_balance(d);
  const auto folds = stratified_kfold(d, 10, 42);
  for (int f = 0; f < 10; ++f) {
    std::array<int, 2> counts{};
    for (auto i : folds.test_indices(f)) ++counts[static_cast<std::size_t>(d.labels[i])];
    for (int c = 0; c < 2; ++c) {
      CHECK(std::abs(counts[static_cast<std::size_t>(c)] - static_cast<double>(b.count_per_class[static_cast<std::size_t>(c)]) / 10.0) <= 1.0);
    }
  }
}

TEST_CASE("folds partition the instances for every seed") {
  const auto d = testing::blobs(23, 31, 2, 1.0, 2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (int k : kAllowedFoldCounts) {
      const auto folds = stratified_kfold(d, k, seed);
      std::vector<int> seen(d.size(), 0);
      for (int f = 0; f < k; ++f) {
        const auto train = folds.train_indices(f);
        const auto test = folds.test_indices(f);
        CHECK(train.size() + test.size() == d.size());
        for (auto i : test) ++seen[i];
        std::set<std::size_t> overlap(train.begin(), train.end());
        for (auto i : test) CHECK(overlap.count(i) == 0);
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
  }
  CHECK(stratified_kfold(d, 5, 1).assignment == stratified_kfold(d, 5, 1).assignment);
  CHECK(stratified_kfold(d, 5, 1).assignment != stratified_kfold(d, 5, 2).assignment);
}
