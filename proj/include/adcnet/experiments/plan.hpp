#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adcnet/chem/fingerprint.hpp"
#include "adcnet/embedding.hpp"
#include "adcnet/model/train.hpp"

namespace adcnet::experiments {

enum class BaselineKind { LR, RF };
std::string_view to_string(BaselineKind kind);
std::optional<BaselineKind> parse_baseline_kind(std::string_view text);

struct BaselineSpec {
  BaselineKind kind = BaselineKind::LR;
  chem::FingerprintKind fingerprint = chem::FingerprintKind::Morgan1024;

  /// e.g. "LR-Morgan"
  std::string name() const;
  bool operator==(const BaselineSpec&) const = default;
};

struct SearchSettings {
  std::size_t trials = 0;  // 0 disables the search
  std::uint64_t seed = 0;
  bool operator==(const SearchSettings&) const = default;
};

/// Experiment description loaded from a JSON file. Relative paths are
/// resolved against the directory holding the plan.
struct ExperimentPlan {
  std::string dataset;
  std::string embeddings;  // empty: no store
  bool allow_fallback = false;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  double cutoff_nm = 100.0;
  std::vector<embedding::ComponentSet> ablations;
  std::vector<BaselineSpec> baselines;
  std::optional<std::size_t> k_folds;
  std::string output_dir = "results";
  std::string model_name = "ADCNet";
  model::TrainConfig train;
  SearchSettings search;
  std::size_t jobs = 1;

  /// Throws InvalidArgument when seeds are empty, cutoff is not positive or
  /// k_folds < 2.
  void validate() const;
};

/// The five ablation variants plus the full model.
std::vector<embedding::ComponentSet> default_ablations();

ExperimentPlan parse_plan(std::string_view json_text, const std::string& base_dir = "");
ExperimentPlan load_plan(const std::string& path);
std::string plan_to_json(const ExperimentPlan& plan);

/// "ADCNet" for the empty set, "w/o antibody" for heavy+light, "w/o x,y" otherwise.
std::string variant_name(const std::string& model_name, const embedding::ComponentSet& ablated);

}  // namespace adcnet::experiments
