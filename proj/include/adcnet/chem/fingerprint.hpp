#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "adcnet/chem/molecule.hpp"

namespace adcnet::chem {

enum class FingerprintKind { Maccs166, Morgan1024, Ecfp4_2048 };

std::string_view to_string(FingerprintKind kind);
/// Accepts "maccs", "morgan", "ecfp4" and the enum spellings.
FingerprintKind fingerprint_kind_from_string(std::string_view name);
std::size_t fingerprint_length(FingerprintKind kind);

struct Fingerprint {
  FingerprintKind kind = FingerprintKind::Morgan1024;
  std::vector<bool> bits;

  std::size_t size() const { return bits.size(); }
  std::size_t popcount() const;
  std::vector<std::size_t> on_bits() const;
  /// Bit i lives in byte i/8 at position i%8 (least significant first),
  /// rendered as lowercase hex.
  std::string to_hex() const;
  static Fingerprint from_hex(FingerprintKind kind, std::string_view hex);

  bool operator==(const Fingerprint&) const = default;
};

/// Circular fingerprint over heavy atoms. nbits must be 1024 (Morgan1024) or
/// 2048 (Ecfp4_2048); anything else is InvalidArgument.
Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius = 2, std::size_t nbits = 1024);
Fingerprint ecfp4_fingerprint(const MolecularGraph& g);
Fingerprint maccs_fingerprint(const MolecularGraph& g);
Fingerprint fingerprint(const MolecularGraph& g, FingerprintKind kind);

/// Throws Error(KindMismatch) when kinds differ. Two empty fingerprints give 1.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace adcnet::chem
