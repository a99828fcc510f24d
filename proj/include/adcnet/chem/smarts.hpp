#pragma once

// A SMARTS subset sufficient for structural-key definitions: atom primitives
// *, a, A, #n, element symbols (aliphatic/aromatic), Hn (total H), R / Rn,
// charges, recursive $(...), with ! & , ; logic; bond primitives ~ - = # : @
// with the same logic; branches and ring closures.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adcnet/chem/molecule.hpp"

namespace adcnet::chem {

class SmartsPattern {
 public:
  /// Throws Error(ParseError) on malformed or unsupported syntax.
  static SmartsPattern compile(std::string_view smarts);

  SmartsPattern(SmartsPattern&&) noexcept;
  SmartsPattern& operator=(SmartsPattern&&) noexcept;
  ~SmartsPattern();

  bool matches(const MolecularGraph& graph) const;

  /// Number of matches with distinct target atom sets, counting stops once
  /// `limit` is exceeded (so the result is at most limit + 1).
  std::size_t count_unique(const MolecularGraph& graph, std::size_t limit) const;

  const std::string& source() const;

  struct Query;

 private:
  explicit SmartsPattern(std::unique_ptr<Query> query);
  std::unique_ptr<Query> query_;
};

}  // namespace adcnet::chem
