#pragma once

#include <span>
#include <string_view>

namespace adcnet::chem {

/// n / sum(1/s). Throws EmptyList or NonPositiveScore.
double harmonic_mean_similarity(std::span<const double> scores);

/// Matches of an optimal gap-free-cost global alignment (the longest common
/// subsequence) divided by the longer length. Throws EmptySequence.
double sequence_identity(std::string_view a, std::string_view b);

}  // namespace adcnet::chem
