#pragma once

// Binary-classifier evaluation: confusion counts, threshold metrics (PPV, NPV,
// SE, SP, ACC, F1, BA, MCC), ROC-AUC as the Mann-Whitney pair statistic and
// PR-AUC as step-interpolated average precision.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace adcnet::metrics {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Absent fields are undefined for the confusion matrix at hand (zero
/// denominator) or were not computed (auc/pr_auc for threshold-only reports).
struct MetricReport {
  std::optional<double> ppv;
  std::optional<double> npv;
  std::optional<double> se;
  std::optional<double> sp;
  std::optional<double> acc;
  std::optional<double> f1;
  std::optional<double> ba;
  std::optional<double> mcc;
  std::optional<double> auc;
  std::optional<double> pr_auc;

  bool operator==(const MetricReport&) const = default;
};

/// Metric names in report column order: SE SP MCC ACC AUC F1 BA PRAUC PPV NPV.
std::span<const std::string_view> metric_names();
std::optional<double> metric_value(const MetricReport& report, std::string_view name);

constexpr double kDefaultThreshold = 0.5;

/// prediction = 1 iff score >= threshold.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold = kDefaultThreshold);

MetricReport compute_metrics(const ConfusionCounts& c);

double roc_auc(std::span<const double> scores, std::span<const int> labels);

double pr_auc(std::span<const double> scores, std::span<const int> labels);

/// Threshold metrics plus AUC and PR-AUC. AUC is absent for single-class
/// label sets and PR-AUC when there are no positives.
MetricReport evaluate(std::span<const double> scores, std::span<const int> labels,
                      double threshold = kDefaultThreshold);

/// Arithmetic mean and sample (n-1) standard deviation; std is 0 for n == 1.
std::pair<double, double> mean_std(std::span<const double> values);

}  // namespace adcnet::metrics
