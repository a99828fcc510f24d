#pragma once

#include <cstdint>
#include <vector>

#include "adcnet/curation.hpp"

namespace adcnet::experiments {

/// Knobs for the synthetic corpus. Each record draws one antibody (heavy,
/// light, antigen triple), one linker and one payload from small pools. Every
/// pool member carries a hidden potency; the record's IC50 is
/// 10^(2 - sum of potencies - dar effect + noise) nM, so labels at 100 nM
/// follow an additive rule over component identities.
struct SyntheticConfig {
  std::size_t records = 400;
  std::size_t antibodies = 12;
  std::size_t linkers = 10;
  std::size_t payloads = 12;
  double noise = 0.1;
  std::uint64_t seed = 7;
};

std::vector<curation::AdcRecord> generate_synthetic_corpus(const SyntheticConfig& config = {});

/// Negative control: the same records with labels permuted by a seeded shuffle.
std::vector<curation::LabeledAdc> shuffle_labels(std::vector<curation::LabeledAdc> records,
                                                 std::uint64_t seed);

}  // namespace adcnet::experiments
