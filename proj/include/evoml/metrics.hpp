#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace evoml {

// Rows are instances; column c holds P(class c).
using ProbaMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

enum class MetricGroup { Balanced, Imbalanced };

enum class MetricId { Accuracy, Precision, Recall, F1, GMean, RocAuc, LogLoss, MCC };

inline constexpr std::array<MetricId, 8> kAllMetrics = {
    MetricId::Accuracy, MetricId::Precision, MetricId::Recall,  MetricId::F1,
    MetricId::GMean,    MetricId::RocAuc,    MetricId::LogLoss, MetricId::MCC};

MetricGroup group_of(MetricId id);
std::vector<MetricId> metrics_in(MetricGroup group);

// Lowercase snake-case names used in documents and the CLI.
std::string_view to_string(MetricId id);
std::optional<MetricId> metric_from_string(std::string_view name);
std::string_view to_string(MetricGroup group);
std::optional<MetricGroup> group_from_string(std::string_view name);

struct ConfusionMatrix {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
};

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr double kLogLossEpsilon = 1e-15;

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

// Class 1 iff P(class 1) >= threshold.
std::vector<int> threshold_predictions(const ProbaMatrix& proba, double threshold = kDefaultThreshold);

double accuracy(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double specificity(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm);
double g_mean(const ConfusionMatrix& cm);
double mcc(const ConfusionMatrix& cm);

// Mann-Whitney form with mid-ranks; scores are P(class 1). Returns 0 when a
// class is absent.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);
double log_loss(std::span<const int> y_true, const ProbaMatrix& proba);

double score(MetricId metric, std::span<const int> y_true, const ProbaMatrix& proba,
             double threshold = kDefaultThreshold);

// Metrics given hard labels already decided elsewhere (soft voting). The
// probability-based metrics still read `proba`.
double score_with_labels(MetricId metric, std::span<const int> y_true, std::span<const int> y_pred,
                         const ProbaMatrix& proba);

// Same as score_with_labels but with `positive` treated as the positive class.
// Accuracy and LogLoss are restricted to instances whose true class is
// `positive`.
double score_for_class(MetricId metric, int positive, std::span<const int> y_true,
                       std::span<const int> y_pred, const ProbaMatrix& proba);

// Map every metric onto [0,1], higher is better.
double normalize(MetricId metric, double value);

}  // namespace evoml
