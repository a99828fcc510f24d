#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace adcnet::curation {

enum class ActivityKind { IC50, EC50, GI50 };
enum class Unit { pM, nM, uM, mM, ug_per_mL };
enum class Qualifier { Exact, GreaterThan, LessThan };
/// Ordered from highest to lowest development stage.
enum class ClinicalStatus { Marketed, Phase3, Phase2, Phase1, Investigational, Other };
enum class Label { Negative = 0, Positive = 1 };

constexpr double kDefaultCutoffNm = 100.0;

struct BioactivityMeasurement {
  ActivityKind kind = ActivityKind::IC50;
  double value = 0.0;
  Unit unit = Unit::nM;
  Qualifier qualifier = Qualifier::Exact;

  bool operator==(const BioactivityMeasurement&) const = default;
};

struct AdcRecord {
  std::string id;
  std::string heavy_chain;
  std::string light_chain;
  std::string antigen;
  std::string linker_smiles;
  std::string payload_smiles;
  std::optional<double> dar;  // absent when the source row had none
  ClinicalStatus status = ClinicalStatus::Other;
  std::vector<BioactivityMeasurement> measurements;

  bool operator==(const AdcRecord&) const = default;
};

struct LabeledAdc {
  AdcRecord record;
  Label label = Label::Negative;
  std::optional<double> activity_nm;

  bool operator==(const LabeledAdc&) const = default;
};

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;

  bool operator==(const DatasetSplit&) const = default;
};

std::string_view to_string(ActivityKind kind);
std::string_view to_string(Unit unit);
std::string_view to_string(Qualifier qualifier);
std::string_view to_string(ClinicalStatus status);
std::string_view to_string(Label label);

/// Lenient parsers for source spellings ("uM", "µM", "Phase II", ">=", ...).
/// Return nullopt for unrecognized text.
std::optional<ActivityKind> parse_activity_kind(std::string_view text);
std::optional<Unit> parse_unit(std::string_view text);
std::optional<Qualifier> parse_qualifier(std::string_view text);
ClinicalStatus parse_status(std::string_view text);
std::optional<Label> parse_label(std::string_view text);

/// Throws Error(MassConcentrationUnit) for ug_per_mL.
double convert_to_nanomolar(double value, Unit unit);
double convert_from_nanomolar(double value_nm, Unit unit);

/// Minimum exact, molar-unit measurement in nM; absent when none qualifies.
std::optional<double> aggregate_activity(const std::vector<BioactivityMeasurement>& measurements);

/// Throws Error(Unlabelable) for non-clinical records without usable activity.
LabeledAdc assign_label(const AdcRecord& record, double cutoff_nm = kDefaultCutoffNm);

/// Uppercase with all whitespace removed.
std::string normalize_sequence(std::string_view seq);
/// 20 canonical residues plus X.
bool is_valid_sequence(std::string_view normalized);

struct CurationDrop {
  std::string id;
  std::string reason;  // incomplete, invalid-sequence, invalid-smiles, unlabelable
  std::string detail;
};

struct CurationResult {
  std::vector<LabeledAdc> records;
  std::vector<CurationDrop> drops;
  std::size_t input_count = 0;
  std::size_t duplicates_merged = 0;
  double cutoff_nm = kDefaultCutoffNm;

  std::size_t positives() const;
  std::size_t negatives() const;
  std::string report() const;
};

CurationResult curate(const std::vector<AdcRecord>& raw, double cutoff_nm = kDefaultCutoffNm);

/// Seeded 8:1:1 split: |train| = floor(0.8n), |val| = floor(0.1n), rest test.
/// Throws Error(TooFewRecords) when n < 10.
DatasetSplit split_dataset(std::size_t n, std::uint64_t seed);

/// Reads the raw export (one measurement per row, repeated ids pool
/// measurements). Rows with malformed activity fields keep the record but
/// skip the measurement and append a line to `warnings` when given.
std::vector<AdcRecord> read_raw_csv(std::istream& in, std::vector<std::string>* warnings = nullptr);
std::vector<AdcRecord> read_raw_csv_file(const std::string& path,
                                         std::vector<std::string>* warnings = nullptr);
void write_raw_csv(std::ostream& out, const std::vector<AdcRecord>& records);

/// One compact JSON object (no trailing newline). Parsing throws
/// Error(FormatError).
std::string to_json_line(const LabeledAdc& record);
LabeledAdc labeled_from_json_line(std::string_view line);

void write_curated_jsonl(std::ostream& out, const std::vector<LabeledAdc>& records);
std::vector<LabeledAdc> read_curated_jsonl(std::istream& in);
std::vector<LabeledAdc> read_curated_jsonl_file(const std::string& path);

/// Loads either a raw CSV export or a curated JSON-lines file (by extension)
/// and returns raw records suitable for curate().
std::vector<AdcRecord> load_records(const std::string& path);

}  // namespace adcnet::curation
