#include "adcnet/chem/similarity.hpp"

#include <algorithm>
#include <vector>

#include "adcnet/error.hpp"

namespace adcnet::chem {

double harmonic_mean_similarity(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyList, "no similarity scores");
  double inverse_sum = 0.0;
  for (double s : scores) {
    if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveScore, "similarity scores must be positive");
    inverse_sum += 1.0 / s;
  }
  return static_cast<double>(scores.size()) / inverse_sum;
}

double sequence_identity(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySequence, "empty sequence");
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<int> row(b.size() + 1, 0);
  for (char ca : a) {
    int diagonal = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int up = row[j];
      row[j] = ca == b[j - 1] ? diagonal + 1 : std::max(up, row[j - 1]);
      diagonal = up;
    }
  }
  return static_cast<double>(row[b.size()]) / static_cast<double>(a.size());
}

}  // namespace adcnet::chem
