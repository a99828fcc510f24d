#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "adcnet/csv.hpp"
#include "adcnet/curation.hpp"
#include "adcnet/error.hpp"
#include "json.hpp"

namespace adcnet::curation {
namespace {

using nlohmann::json;

const char* const kRawColumns[] = {"id",           "heavy_chain",    "light_chain",
                                   "antigen",      "linker_smiles",  "payload_smiles",
                                   "dar",          "status",         "activity_kind",
                                   "activity_value", "activity_unit", "activity_qualifier"};

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json measurement_json(const BioactivityMeasurement& m) {
  return json{{"kind", to_string(m.kind)},
              {"value", m.value},
              {"unit", to_string(m.unit)},
              {"qualifier", to_string(m.qualifier)}};
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::FormatError, std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

std::vector<AdcRecord> read_raw_csv(std::istream& in, std::vector<std::string>* warnings) {
  const csv::Table table(csv::read(in));
  std::size_t col[12];
  for (std::size_t i = 0; i < 12; ++i) {
    const auto c = table.column(kRawColumns[i]);
    if (!c) {
      if (i >= 7) {
        col[i] = static_cast<std::size_t>(-1);
        continue;
      }
      throw Error(ErrorCode::MalformedCsv, std::string("missing column '") + kRawColumns[i] + "'");
    }
    col[i] = *c;
  }
  auto field = [&](std::size_t row, std::size_t i) -> std::string_view {
    return col[i] == static_cast<std::size_t>(-1) ? std::string_view{} : table.get(row, col[i]);
  };
  auto warn = [&](std::size_t row, const std::string& what) {
    if (warnings) warnings->push_back("row " + std::to_string(row + 2) + ": " + what);
  };

  std::vector<AdcRecord> records;
  std::multimap<std::string, std::size_t> by_id;
  for (std::size_t row = 0; row < table.size(); ++row) {
    AdcRecord r;
    r.id = std::string(field(row, 0));
    if (r.id.empty()) r.id = "row" + std::to_string(row + 2);
    r.heavy_chain = std::string(field(row, 1));
    r.light_chain = std::string(field(row, 2));
    r.antigen = std::string(field(row, 3));
    r.linker_smiles = std::string(field(row, 4));
    r.payload_smiles = std::string(field(row, 5));
    r.dar = parse_double(field(row, 6));
    if (!r.dar && !field(row, 6).empty()) warn(row, "unparseable dar '" + std::string(field(row, 6)) + "'");
    r.status = parse_status(field(row, 7));

    const std::string_view kind = field(row, 8);
    const std::string_view value = field(row, 9);
    const std::string_view unit = field(row, 10);
    const std::string_view qualifier = field(row, 11);
    std::optional<BioactivityMeasurement> m;
    if (!kind.empty() || !value.empty() || !unit.empty()) {
      const auto k = parse_activity_kind(kind);
      const auto v = parse_double(value);
      const auto u = parse_unit(unit);
      const auto q = parse_qualifier(qualifier);
      if (!k) {
        warn(row, "unknown activity kind '" + std::string(kind) + "'");
      } else if (!v || *v <= 0.0) {
        warn(row, "activity value must be a positive number, got '" + std::string(value) + "'");
      } else if (!u) {
        warn(row, "unknown activity unit '" + std::string(unit) + "'");
      } else if (!q) {
        warn(row, "unknown activity qualifier '" + std::string(qualifier) + "'");
      } else {
        m = BioactivityMeasurement{*k, *v, *u, *q};
      }
    }

    bool pooled = false;
    auto [lo, hi] = by_id.equal_range(r.id);
    for (auto it = lo; it != hi; ++it) {
      AdcRecord& existing = records[it->second];
      if (existing.heavy_chain == r.heavy_chain && existing.light_chain == r.light_chain &&
          existing.antigen == r.antigen && existing.linker_smiles == r.linker_smiles &&
          existing.payload_smiles == r.payload_smiles && existing.dar == r.dar) {
        if (m) existing.measurements.push_back(*m);
        existing.status = std::min(existing.status, r.status);
        pooled = true;
        break;
      }
    }
    if (pooled) continue;
    if (m) r.measurements.push_back(*m);
    by_id.emplace(r.id, records.size());
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<AdcRecord> read_raw_csv_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_raw_csv(in, warnings);
}

void write_raw_csv(std::ostream& out, const std::vector<AdcRecord>& records) {
  csv::write_row(out, csv::Row(std::begin(kRawColumns), std::end(kRawColumns)));
  for (const auto& r : records) {
    csv::Row base{r.id,
                  r.heavy_chain,
                  r.light_chain,
                  r.antigen,
                  r.linker_smiles,
                  r.payload_smiles,
                  r.dar ? format_double(*r.dar) : std::string(),
                  std::string(to_string(r.status))};
    if (r.measurements.empty()) {
      base.resize(12);
      csv::write_row(out, base);
      continue;
    }
    for (const auto& m : r.measurements) {
      csv::Row row = base;
      row.emplace_back(to_string(m.kind));
      row.push_back(format_double(m.value));
      row.emplace_back(to_string(m.unit));
      row.emplace_back(to_string(m.qualifier));
      csv::write_row(out, row);
    }
  }
}

std::string to_json_line(const LabeledAdc& record) {
  const AdcRecord& r = record.record;
  json measurements = json::array();
  for (const auto& m : r.measurements) measurements.push_back(measurement_json(m));
  json j{{"id", r.id},
         {"heavy_chain", r.heavy_chain},
         {"light_chain", r.light_chain},
         {"antigen", r.antigen},
         {"linker_smiles", r.linker_smiles},
         {"payload_smiles", r.payload_smiles},
         {"dar", r.dar ? json(*r.dar) : json(nullptr)},
         {"status", to_string(r.status)},
         {"measurements", measurements},
         {"label", to_string(record.label)},
         {"activity_nM", record.activity_nm ? json(*record.activity_nm) : json(nullptr)}};
  return j.dump();
}

LabeledAdc labeled_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    LabeledAdc out;
    AdcRecord& r = out.record;
    r.id = required<std::string>(j, "id");
    r.heavy_chain = required<std::string>(j, "heavy_chain");
    r.light_chain = required<std::string>(j, "light_chain");
    r.antigen = required<std::string>(j, "antigen");
    r.linker_smiles = required<std::string>(j, "linker_smiles");
    r.payload_smiles = required<std::string>(j, "payload_smiles");
    if (j.contains("dar") && !j.at("dar").is_null()) r.dar = j.at("dar").get<double>();
    r.status = parse_status(j.value("status", std::string()));
    if (j.contains("measurements")) {
      for (const auto& mj : j.at("measurements")) {
        const auto kind = parse_activity_kind(required<std::string>(mj, "kind"));
        const auto unit = parse_unit(required<std::string>(mj, "unit"));
        const auto qualifier = parse_qualifier(mj.value("qualifier", std::string("=")));
        if (!kind || !unit || !qualifier) {
          throw Error(ErrorCode::FormatError, "unrecognized measurement fields");
        }
        r.measurements.push_back({*kind, required<double>(mj, "value"), *unit, *qualifier});
      }
    }
    const auto label = parse_label(required<std::string>(j, "label"));
    if (!label) throw Error(ErrorCode::FormatError, "unrecognized label");
    out.label = *label;
    if (j.contains("activity_nM") && !j.at("activity_nM").is_null()) {
      out.activity_nm = j.at("activity_nM").get<double>();
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("invalid curated record: ") + e.what());
  }
}

void write_curated_jsonl(std::ostream& out, const std::vector<LabeledAdc>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<LabeledAdc> read_curated_jsonl(std::istream& in) {
  std::vector<LabeledAdc> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(labeled_from_json_line(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(number) + ": " + e.detail());
    }
  }
  return out;
}

std::vector<LabeledAdc> read_curated_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_curated_jsonl(in);
}

std::vector<AdcRecord> load_records(const std::string& path) {
  const auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".jsonl") || ends_with(".json")) {
    std::vector<AdcRecord> out;
    for (auto& r : read_curated_jsonl_file(path)) out.push_back(std::move(r.record));
    return out;
  }
  return read_raw_csv_file(path);
}

}  // namespace adcnet::curation
