#include "adcnet/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "adcnet/error.hpp"

namespace adcnet::metrics {
namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (scores.empty()) throw Error(ErrorCode::Empty, "no samples");
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }
}

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

// Indices sorted by descending score.
std::vector<std::size_t> rank_descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

constexpr std::array<std::string_view, 10> kNames = {"SE",  "SP", "MCC",   "ACC", "AUC",
                                                     "F1",  "BA", "PRAUC", "PPV", "NPV"};

}  // namespace

std::span<const std::string_view> metric_names() { return kNames; }

std::optional<double> metric_value(const MetricReport& r, std::string_view name) {
  if (name == "SE") return r.se;
  if (name == "SP") return r.sp;
  if (name == "MCC") return r.mcc;
  if (name == "ACC") return r.acc;
  if (name == "AUC") return r.auc;
  if (name == "F1") return r.f1;
  if (name == "BA") return r.ba;
  if (name == "PRAUC") return r.pr_auc;
  if (name == "PPV") return r.ppv;
  if (name == "NPV") return r.npv;
  throw Error(ErrorCode::InvalidArgument, "unknown metric " + std::string(name));
}

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  check_inputs(scores, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

MetricReport compute_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::Empty, "confusion matrix has no samples");
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);

  MetricReport r;
  r.ppv = ratio(tp, tp + fp);
  r.npv = ratio(tn, tn + fn);
  r.se = ratio(tp, tp + fn);
  // Specificity is TN / (TN + FP); balanced accuracy needs the true negative rate.
  r.sp = ratio(tn, tn + fp);
  r.acc = ratio(tp + tn, tp + tn + fp + fn);
  r.f1 = ratio(2.0 * tp, 2.0 * tp + fn + fp);
  if (r.se && r.sp) r.ba = (*r.se + *r.sp) / 2.0;
  const double den = (tp + fn) * (tp + fp) * (tn + fn) * (tn + fp);
  if (den != 0.0) r.mcc = (tp * tn - fn * fp) / std::sqrt(den);
  return r;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::SingleClass, "ROC-AUC needs both classes");
  }
  // Walk tie groups in ascending score order; each positive gains the
  // negatives strictly below its group plus half of the tied negatives.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double concordant = 0.0;
  std::size_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0;
    std::size_t group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] == 1 ? ++group_pos : ++group_neg;
      ++j;
    }
    concordant += static_cast<double>(group_pos) *
                  (static_cast<double>(negatives_below) + 0.5 * static_cast<double>(group_neg));
    negatives_below += group_neg;
    i = j;
  }
  return concordant / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw Error(ErrorCode::NoPositives, "PR-AUC needs at least one positive");
  const auto order = rank_descending(scores);
  double area = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::size_t predicted = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++tp;
      ++predicted;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

MetricReport evaluate(std::span<const double> scores, std::span<const int> labels,
                      double threshold) {
  MetricReport r = compute_metrics(confusion(scores, labels, threshold));
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives > 0 && static_cast<std::size_t>(positives) < labels.size()) {
    r.auc = roc_auc(scores, labels);
  }
  if (positives > 0) r.pr_auc = pr_auc(scores, labels);
  return r;
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::Empty, "mean_std of an empty list");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace adcnet::metrics
