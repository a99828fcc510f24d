#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "adcnet/curation.hpp"
#include "adcnet/embedding.hpp"
#include "adcnet/experiments/plan.hpp"
#include "adcnet/experiments/results.hpp"
#include "adcnet/model/checkpoint.hpp"
#include "adcnet/model/mlp.hpp"

namespace adcnet::experiments {

/// Curated records with their component vectors resolved once up front.
struct PreparedCorpus {
  std::vector<curation::LabeledAdc> records;
  /// Per record: linker, payload, heavy, light, antigen. A slot is empty when
  /// that component was skipped during preparation.
  std::vector<std::array<std::vector<double>, 5>> vectors;
  bool fallback_used = false;

  std::size_t size() const { return records.size(); }
  std::vector<int> labels() const;
  std::vector<double> dars() const;
};

/// Throws MissingEmbedding naming the record and component.
PreparedCorpus prepare_corpus(std::vector<curation::LabeledAdc> records,
                              const embedding::FeatureResolver& resolver,
                              const embedding::ComponentSet& skip = {});

/// Loads the plan's dataset (raw CSV or curated JSONL, re-curated at the
/// plan's cutoff) and embedding store, then resolves every record.
PreparedCorpus load_corpus(const ExperimentPlan& plan, const embedding::ComponentSet& skip = {});

/// Fits the scaler on the rows' DAR values.
embedding::DarScaler fit_scaler(const PreparedCorpus& corpus, std::span<const std::size_t> rows);

model::Dataset build_dataset(const PreparedCorpus& corpus, std::span<const std::size_t> rows,
                             const embedding::DarScaler& scaler,
                             const embedding::ComponentSet& ablated = {});

/// SHA-256 over the record ids of each part of the split.
std::string split_hash(const PreparedCorpus& corpus, const curation::DatasetSplit& split);

/// Seeded partition of [0, n) into k sorted folds whose sizes differ by at
/// most one. Throws TooFewRecords when n < k and InvalidArgument when k < 2.
std::vector<std::vector<std::size_t>> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

/// Per seed: 8:1:1 split, scaler fit on train, train, evaluate on test.
/// Writes splits/ and checkpoints/ under plan.output_dir when it is set.
ResultTable run_benchmark(const ExperimentPlan& plan, const PreparedCorpus& corpus,
                          const embedding::ComponentSet& ablated = {});

/// k-fold CV on the first plan seed. Each fold is evaluated once; early
/// stopping watches a stratified 10% carve-out of the training folds.
ResultTable cross_validate(const ExperimentPlan& plan, const PreparedCorpus& corpus);

/// One benchmark per variant in plan.ablations (default_ablations() when empty).
ResultTable run_ablations(const ExperimentPlan& plan, const PreparedCorpus& corpus);

/// Baseline features: fp(linker) + fp(payload) + heavy + light + antigen + scaled DAR.
model::Dataset build_baseline_dataset(const PreparedCorpus& corpus, std::span<const std::size_t> rows,
                                      const embedding::DarScaler& scaler,
                                      chem::FingerprintKind fingerprint);

/// Same seeds and splits as run_benchmark.
ResultTable run_baseline(const BaselineSpec& spec, const ExperimentPlan& plan,
                         const PreparedCorpus& corpus);

struct ExternalScore {
  std::string id;
  double score = 0.0;
  curation::Label predicted = curation::Label::Negative;
  std::optional<curation::Label> observed;  // from measurements when labelable
  /// heavy, light, antigen sequence identity; linker, payload Tanimoto.
  std::array<double, 5> component_similarity{};
  double similarity = 0.0;  // harmonic mean; 0 when any component is 0
};

std::vector<ExternalScore> score_external(const std::vector<curation::AdcRecord>& external,
                                          const std::vector<curation::LabeledAdc>& reference,
                                          const model::Checkpoint& checkpoint,
                                          const embedding::FeatureResolver& resolver,
                                          double cutoff_nm = curation::kDefaultCutoffNm);

std::string external_report_csv(const std::vector<ExternalScore>& scores);

/// Writes <dir>/results.csv and <dir>/results.md.
void write_results(const ResultTable& table, const std::string& dir,
                   const std::vector<std::string_view>& md_columns = {});

}  // namespace adcnet::experiments
