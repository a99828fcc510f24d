#include "adcnet/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "adcnet/chem/smiles.hpp"
#include "adcnet/error.hpp"
#include "adcnet/random.hpp"

namespace adcnet::curation {
namespace {

std::string lower_compact(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_clinical(ClinicalStatus s) {
  return s == ClinicalStatus::Marketed || s == ClinicalStatus::Phase1 ||
         s == ClinicalStatus::Phase2 || s == ClinicalStatus::Phase3;
}

std::string dedup_key(const AdcRecord& r) {
  char dar[64];
  std::snprintf(dar, sizeof dar, "%.2f", *r.dar);
  std::string key;
  for (const std::string* part :
       {&r.heavy_chain, &r.light_chain, &r.antigen, &r.linker_smiles, &r.payload_smiles}) {
    key += *part;
    key.push_back('\x1f');
  }
  key += dar;
  return key;
}

void append_unique(std::vector<BioactivityMeasurement>& into,
                   const std::vector<BioactivityMeasurement>& from) {
  for (const auto& m : from) {
    if (std::find(into.begin(), into.end(), m) == into.end()) into.push_back(m);
  }
}

}  // namespace

std::string_view to_string(ActivityKind kind) {
  switch (kind) {
    case ActivityKind::IC50: return "IC50";
    case ActivityKind::EC50: return "EC50";
    case ActivityKind::GI50: return "GI50";
  }
  return "?";
}

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::pM: return "pM";
    case Unit::nM: return "nM";
    case Unit::uM: return "uM";
    case Unit::mM: return "mM";
    case Unit::ug_per_mL: return "ug/mL";
  }
  return "?";
}

std::string_view to_string(Qualifier qualifier) {
  switch (qualifier) {
    case Qualifier::Exact: return "=";
    case Qualifier::GreaterThan: return ">";
    case Qualifier::LessThan: return "<";
  }
  return "?";
}

std::string_view to_string(ClinicalStatus status) {
  switch (status) {
    case ClinicalStatus::Marketed: return "Marketed";
    case ClinicalStatus::Phase3: return "Phase3";
    case ClinicalStatus::Phase2: return "Phase2";
    case ClinicalStatus::Phase1: return "Phase1";
    case ClinicalStatus::Investigational: return "Investigational";
    case ClinicalStatus::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(Label label) { return label == Label::Positive ? "Positive" : "Negative"; }

std::optional<ActivityKind> parse_activity_kind(std::string_view text) {
  const std::string t = lower_compact(text);
  if (t == "ic50") return ActivityKind::IC50;
  if (t == "ec50") return ActivityKind::EC50;
  if (t == "gi50") return ActivityKind::GI50;
  return std::nullopt;
}

std::optional<Unit> parse_unit(std::string_view text) {
  std::string t = trim(text);
  // Micro sign (U+00B5) and Greek mu (U+03BC) both mean micro.
  for (std::string_view mu : {"\xC2\xB5", "\xCE\xBC"}) {
    if (t.rfind(mu, 0) == 0) t = "u" + t.substr(mu.size());
  }
  if (t == "pM") return Unit::pM;
  if (t == "nM") return Unit::nM;
  if (t == "uM") return Unit::uM;
  if (t == "mM") return Unit::mM;
  const std::string l = lower_compact(t);
  if (l == "ug/ml" || l == "ugperml") return Unit::ug_per_mL;
  return std::nullopt;
}

std::optional<Qualifier> parse_qualifier(std::string_view text) {
  const std::string t = lower_compact(text);
  if (t.empty() || t == "=" || t == "exact" || t == "==") return Qualifier::Exact;
  if (t == ">" || t == ">=" || t == "greaterthan") return Qualifier::GreaterThan;
  if (t == "<" || t == "<=" || t == "lessthan") return Qualifier::LessThan;
  return std::nullopt;
}

ClinicalStatus parse_status(std::string_view text) {
  const std::string t = lower_compact(text);
  if (t == "marketed" || t == "approved") return ClinicalStatus::Marketed;
  if (t == "phase3" || t == "phaseiii") return ClinicalStatus::Phase3;
  if (t == "phase2" || t == "phaseii") return ClinicalStatus::Phase2;
  if (t == "phase1" || t == "phasei") return ClinicalStatus::Phase1;
  if (t == "investigational" || t == "preclinical") return ClinicalStatus::Investigational;
  return ClinicalStatus::Other;
}

std::optional<Label> parse_label(std::string_view text) {
  const std::string t = lower_compact(text);
  if (t == "positive" || t == "1") return Label::Positive;
  if (t == "negative" || t == "0") return Label::Negative;
  return std::nullopt;
}

double convert_to_nanomolar(double value, Unit unit) {
  switch (unit) {
    case Unit::pM: return value * 1e-3;
    case Unit::nM: return value;
    case Unit::uM: return value * 1e3;
    case Unit::mM: return value * 1e6;
    case Unit::ug_per_mL: break;
  }
  throw Error(ErrorCode::MassConcentrationUnit,
              "ug/mL cannot be converted to a molar concentration without a molar mass");
}

double convert_from_nanomolar(double value_nm, Unit unit) {
  switch (unit) {
    case Unit::pM: return value_nm * 1e3;
    case Unit::nM: return value_nm;
    case Unit::uM: return value_nm * 1e-3;
    case Unit::mM: return value_nm * 1e-6;
    case Unit::ug_per_mL: break;
  }
  throw Error(ErrorCode::MassConcentrationUnit,
              "ug/mL cannot be converted to a molar concentration without a molar mass");
}

std::optional<double> aggregate_activity(const std::vector<BioactivityMeasurement>& measurements) {
  std::optional<double> best;
  for (const auto& m : measurements) {
    if (m.qualifier != Qualifier::Exact || m.unit == Unit::ug_per_mL) continue;
    if (!(m.value > 0.0) || !std::isfinite(m.value)) continue;
    const double nm = convert_to_nanomolar(m.value, m.unit);
    if (!best || nm < *best) best = nm;
  }
  return best;
}

LabeledAdc assign_label(const AdcRecord& record, double cutoff_nm) {
  LabeledAdc out{record, Label::Negative, aggregate_activity(record.measurements)};
  if (is_clinical(record.status)) {
    out.label = Label::Positive;
  } else if (out.activity_nm) {
    out.label = *out.activity_nm <= cutoff_nm ? Label::Positive : Label::Negative;
  } else {
    throw Error(ErrorCode::Unlabelable,
                "record '" + record.id + "' has no clinical status and no usable activity");
  }
  return out;
}

std::string normalize_sequence(std::string_view seq) {
  std::string out;
  out.reserve(seq.size());
  for (char c : seq) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_valid_sequence(std::string_view normalized) {
  static constexpr std::string_view kAlphabet = "ACDEFGHIKLMNPQRSTVWYX";
  return std::all_of(normalized.begin(), normalized.end(),
                     [](char c) { return kAlphabet.find(c) != std::string_view::npos; });
}

std::size_t CurationResult::positives() const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const LabeledAdc& r) { return r.label == Label::Positive; }));
}

std::size_t CurationResult::negatives() const { return records.size() - positives(); }

std::string CurationResult::report() const {
  std::ostringstream out;
  out << "input records: " << input_count << '\n';
  out << "duplicates merged: " << duplicates_merged << '\n';
  out << "dropped: " << drops.size() << '\n';
  out << "labeled: " << records.size() << " (positive " << positives() << ", negative "
      << negatives() << ")\n";
  out << "cutoff_nM: " << cutoff_nm << '\n';
  if (!drops.empty()) {
    out << "\nid\treason\tdetail\n";
    for (const auto& d : drops) out << d.id << '\t' << d.reason << '\t' << d.detail << '\n';
  }
  return out.str();
}

CurationResult curate(const std::vector<AdcRecord>& raw, double cutoff_nm) {
  if (!(cutoff_nm > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  CurationResult result;
  result.input_count = raw.size();
  result.cutoff_nm = cutoff_nm;

  std::vector<AdcRecord> kept;
  std::map<std::string, std::size_t> by_key;
  for (const AdcRecord& source : raw) {
    AdcRecord r = source;
    r.id = trim(r.id);
    r.heavy_chain = normalize_sequence(r.heavy_chain);
    r.light_chain = normalize_sequence(r.light_chain);
    r.antigen = normalize_sequence(r.antigen);
    r.linker_smiles = trim(r.linker_smiles);
    r.payload_smiles = trim(r.payload_smiles);

    std::string missing;
    auto need = [&](bool present, const char* name) {
      if (present) return;
      if (!missing.empty()) missing += ",";
      missing += name;
    };
    need(!r.heavy_chain.empty(), "heavy_chain");
    need(!r.light_chain.empty(), "light_chain");
    need(!r.antigen.empty(), "antigen");
    need(!r.linker_smiles.empty(), "linker_smiles");
    need(!r.payload_smiles.empty(), "payload_smiles");
    need(r.dar && std::isfinite(*r.dar) && *r.dar >= 0.0, "dar");
    if (!missing.empty()) {
      result.drops.push_back({r.id, "incomplete", "missing " + missing});
      continue;
    }
    std::string bad;
    for (const auto& [seq, name] : {std::pair{&r.heavy_chain, "heavy_chain"},
                                    std::pair{&r.light_chain, "light_chain"},
                                    std::pair{&r.antigen, "antigen"}}) {
      if (!is_valid_sequence(*seq)) {
        if (!bad.empty()) bad += ",";
        bad += name;
      }
    }
    if (!bad.empty()) {
      result.drops.push_back({r.id, "invalid-sequence", "non-residue characters in " + bad});
      continue;
    }
    try {
      chem::parse_smiles(r.linker_smiles);
      chem::parse_smiles(r.payload_smiles);
    } catch (const chem::SmilesParseError& e) {
      result.drops.push_back({r.id, "invalid-smiles", e.what()});
      continue;
    }

    std::vector<BioactivityMeasurement> unique;
    append_unique(unique, r.measurements);
    r.measurements = std::move(unique);

    const std::string key = dedup_key(r);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      by_key.emplace(key, kept.size());
      kept.push_back(std::move(r));
      continue;
    }
    AdcRecord& target = kept[it->second];
    append_unique(target.measurements, r.measurements);
    target.status = std::min(target.status, r.status);
    ++result.duplicates_merged;
  }

  for (const AdcRecord& r : kept) {
    try {
      result.records.push_back(assign_label(r, cutoff_nm));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unlabelable) throw;
      result.drops.push_back({r.id, "unlabelable", "no clinical status and no usable activity"});
    }
  }
  return result;
}

DatasetSplit split_dataset(std::size_t n, std::uint64_t seed) {
  if (n < 10) {
    throw Error(ErrorCode::TooFewRecords,
                "need at least 10 records to split, got " + std::to_string(n));
  }
  Rng rng(seed);
  const auto order = permutation(n, rng);
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  DatasetSplit split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace adcnet::curation
