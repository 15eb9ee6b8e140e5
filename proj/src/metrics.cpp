#include "evoml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evoml/error.hpp"

namespace evoml {
namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::LengthMismatch, "lengths " + std::to_string(a) + " and " + std::to_string(b));
  }
}

std::vector<double> column(const ProbaMatrix& proba, int c) {
  std::vector<double> out(static_cast<std::size_t>(proba.rows()));
  for (Eigen::Index i = 0; i < proba.rows(); ++i) out[static_cast<std::size_t>(i)] = proba(i, c);
  return out;
}

}  // namespace

MetricGroup group_of(MetricId id) {
  switch (id) {
    case MetricId::Accuracy:
    case MetricId::Precision:
    case MetricId::Recall:
    case MetricId::F1:
      return MetricGroup::Balanced;
    default:
      return MetricGroup::Imbalanced;
  }
}

std::vector<MetricId> metrics_in(MetricGroup group) {
  std::vector<MetricId> out;
  for (auto m : kAllMetrics) {
    if (group_of(m) == group) out.push_back(m);
  }
  return out;
}

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::Accuracy: return "accuracy";
    case MetricId::Precision: return "precision";
    case MetricId::Recall: return "recall";
    case MetricId::F1: return "f1";
    case MetricId::GMean: return "g_mean";
    case MetricId::RocAuc: return "roc_auc";
    case MetricId::LogLoss: return "log_loss";
    case MetricId::MCC: return "mcc";
  }
  return "unknown";
}

std::optional<MetricId> metric_from_string(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(MetricGroup group) {
  return group == MetricGroup::Balanced ? "balanced" : "imbalanced";
}

std::optional<MetricGroup> group_from_string(std::string_view name) {
  if (name == "balanced") return MetricGroup::Balanced;
  if (name == "imbalanced") return MetricGroup::Imbalanced;
  return std::nullopt;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == 1;
    const bool p = y_pred[i] == 1;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (!t && !p) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

std::vector<int> threshold_predictions(const ProbaMatrix& proba, double threshold) {
  std::vector<int> out(static_cast<std::size_t>(proba.rows()));
  for (Eigen::Index i = 0; i < proba.rows(); ++i) out[static_cast<std::size_t>(i)] = proba(i, 1) >= threshold ? 1 : 0;
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  return safe_div(static_cast<double>(cm.tp + cm.tn), static_cast<double>(cm.total()));
}

double precision(const ConfusionMatrix& cm) {
  return safe_div(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
}

double recall(const ConfusionMatrix& cm) {
  return safe_div(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
}

double specificity(const ConfusionMatrix& cm) {
  return safe_div(static_cast<double>(cm.tn), static_cast<double>(cm.tn + cm.fp));
}

double f1(const ConfusionMatrix& cm) {
  return safe_div(2.0 * static_cast<double>(cm.tp), static_cast<double>(2 * cm.tp + cm.fp + cm.fn));
}

double g_mean(const ConfusionMatrix& cm) { return std::sqrt(recall(cm) * specificity(cm)); }

double mcc(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double tn = static_cast<double>(cm.tn), fn = static_cast<double>(cm.fn);
  const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  return safe_div(tp * tn - fp * fn, den);
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  check_lengths(y_true.size(), scores.size());
  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based ranks i+1..j share their mean.
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (y_true[order[t]] == 1) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return 0.0;
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double log_loss(std::span<const int> y_true, const ProbaMatrix& proba) {
  check_lengths(y_true.size(), static_cast<std::size_t>(proba.rows()));
  if (y_true.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double p = std::clamp(proba(static_cast<Eigen::Index>(i), y_true[i]), kLogLossEpsilon, 1.0 - kLogLossEpsilon);
    total -= std::log(p);
  }
  return total / static_cast<double>(y_true.size());
}

double score_with_labels(MetricId metric, std::span<const int> y_true, std::span<const int> y_pred,
                         const ProbaMatrix& proba) {
  check_lengths(y_true.size(), static_cast<std::size_t>(proba.rows()));
  switch (metric) {
    case MetricId::RocAuc: {
      const auto s = column(proba, 1);
      return roc_auc(y_true, s);
    }
    case MetricId::LogLoss:
      return log_loss(y_true, proba);
    default:
      break;
  }
  const auto cm = confusion(y_true, y_pred);
  switch (metric) {
    case MetricId::Accuracy: return accuracy(cm);
    case MetricId::Precision: return precision(cm);
    case MetricId::Recall: return recall(cm);
    case MetricId::F1: return f1(cm);
    case MetricId::GMean: return g_mean(cm);
    case MetricId::MCC: return mcc(cm);
    default: return 0.0;
  }
}

double score(MetricId metric, std::span<const int> y_true, const ProbaMatrix& proba, double threshold) {
  check_lengths(y_true.size(), static_cast<std::size_t>(proba.rows()));
  const auto pred = threshold_predictions(proba, threshold);
  return score_with_labels(metric, y_true, pred, proba);
}

double score_for_class(MetricId metric, int positive, std::span<const int> y_true, std::span<const int> y_pred,
                       const ProbaMatrix& proba) {
  check_lengths(y_true.size(), y_pred.size());
  check_lengths(y_true.size(), static_cast<std::size_t>(proba.rows()));
  std::vector<int> t(y_true.begin(), y_true.end());
  std::vector<int> p(y_pred.begin(), y_pred.end());
  ProbaMatrix q = proba;
  if (positive == 0) {
    for (auto& v : t) v = 1 - v;
    for (auto& v : p) v = 1 - v;
    q.col(0).swap(q.col(1));
  }
  if (metric == MetricId::Accuracy) return recall(confusion(t, p));
  if (metric == MetricId::LogLoss) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == 1) rows.push_back(i);
    }
    ProbaMatrix sub(static_cast<Eigen::Index>(rows.size()), 2);
    std::vector<int> ones(rows.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = q.row(static_cast<Eigen::Index>(rows[i]));
    return log_loss(ones, sub);
  }
  return score_with_labels(metric, t, p, q);
}

double normalize(MetricId metric, double value) {
  switch (metric) {
    case MetricId::LogLoss: return std::exp(-value);
    case MetricId::MCC: return (value + 1.0) / 2.0;
    default: return value;
  }
}

}  // namespace evoml
