#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adcnet/metrics.hpp"

namespace adcnet::experiments {

/// One evaluated model on one split.
struct RunResult {
  std::string model;
  std::uint64_t seed = 0;
  int fold = -1;  // -1 for seeded 8:1:1 splits
  std::string split_hash;
  std::size_t input_dim = 0;
  std::size_t best_epoch = 0;
  metrics::MetricReport report;

  bool operator==(const RunResult&) const = default;
};

struct ResultCell {
  std::string model;
  std::string metric;
  std::optional<double> mean;  // absent when any run lacks the metric
  double std = 0.0;
  std::vector<std::optional<double>> values;
};

class ResultTable {
 public:
  void add(RunResult run) { runs_.push_back(std::move(run)); }
  void append(const ResultTable& other);
  const std::vector<RunResult>& runs() const { return runs_; }

  /// Model names in first-appearance order.
  std::vector<std::string> models() const;
  std::vector<RunResult> runs_for(std::string_view model) const;
  ResultCell cell(std::string_view model, std::string_view metric) const;

  /// One row per run: model,seed,fold,split_hash,input_dim,best_epoch then
  /// the metrics in report column order. Absent values are empty fields.
  std::string to_csv() const;
  /// Model rows, "mean ± std" metric columns (all metrics when empty).
  std::string to_markdown(const std::vector<std::string_view>& columns = {}) const;

 private:
  std::vector<RunResult> runs_;
};

}  // namespace adcnet::experiments
