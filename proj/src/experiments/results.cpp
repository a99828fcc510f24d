#include "adcnet/experiments/results.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "adcnet/csv.hpp"
#include "adcnet/error.hpp"

namespace adcnet::experiments {

namespace {

std::string format(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void ResultTable::append(const ResultTable& other) {
  runs_.insert(runs_.end(), other.runs_.begin(), other.runs_.end());
}

std::vector<std::string> ResultTable::models() const {
  std::vector<std::string> out;
  for (const auto& r : runs_) {
    if (std::find(out.begin(), out.end(), r.model) == out.end()) out.push_back(r.model);
  }
  return out;
}

std::vector<RunResult> ResultTable::runs_for(std::string_view model) const {
  std::vector<RunResult> out;
  for (const auto& r : runs_) {
    if (r.model == model) out.push_back(r);
  }
  return out;
}

ResultCell ResultTable::cell(std::string_view model, std::string_view metric) const {
  ResultCell cell{std::string(model), std::string(metric), std::nullopt, 0.0, {}};
  std::vector<double> present;
  for (const auto& r : runs_) {
    if (r.model != model) continue;
    const auto v = metrics::metric_value(r.report, metric);
    cell.values.push_back(v);
    if (v) present.push_back(*v);
  }
  if (!cell.values.empty() && present.size() == cell.values.size()) {
    const auto [mean, sd] = metrics::mean_std(present);
    cell.mean = mean;
    cell.std = sd;
  }
  return cell;
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  csv::Row header{"model", "seed", "fold", "split_hash", "input_dim", "best_epoch"};
  for (auto name : metrics::metric_names()) header.emplace_back(name);
  csv::write_row(out, header);
  for (const auto& r : runs_) {
    csv::Row row{r.model,
                 std::to_string(r.seed),
                 r.fold < 0 ? "" : std::to_string(r.fold),
                 r.split_hash,
                 std::to_string(r.input_dim),
                 std::to_string(r.best_epoch)};
    for (auto name : metrics::metric_names()) {
      const auto v = metrics::metric_value(r.report, name);
      row.push_back(v ? format(*v, 6) : "");
    }
    csv::write_row(out, row);
  }
  return out.str();
}

std::string ResultTable::to_markdown(const std::vector<std::string_view>& columns) const {
  std::vector<std::string_view> cols = columns;
  if (cols.empty()) {
    const auto all = metrics::metric_names();
    cols.assign(all.begin(), all.end());
  }
  std::ostringstream out;
  out << "| Model |";
  for (auto c : cols) out << ' ' << c << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& m : models()) {
    out << "| " << m << " |";
    for (auto c : cols) {
      const auto cell = this->cell(m, c);
      if (cell.mean) {
        out << ' ' << format(*cell.mean, 4) << " ± " << format(cell.std, 4) << " |";
      } else {
        out << " n/a |";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace adcnet::experiments
