#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "adcnet/chem/molecule.hpp"
#include "adcnet/error.hpp"

namespace adcnet::chem {

/// Parse failure carrying the byte offset into the input where the problem
/// was detected.
class SmilesParseError : public Error {
 public:
  SmilesParseError(std::size_t offset, std::string reason)
      : Error(ErrorCode::ParseError, reason + " at offset " + std::to_string(offset)),
        offset_(offset),
        reason_(std::move(reason)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

/// Parses an isomeric SMILES string: organic-subset and bracket atoms
/// (isotope, chirality @/@@, H count, charge, atom class), branches, ring
/// closures including %nn, bond symbols - = # : / \ and '.'-separated
/// fragments. Aromaticity is taken as written. Leading/trailing whitespace is
/// ignored and anything after interior whitespace is treated as a title.
MolecularGraph parse_smiles(std::string_view smiles);

}  // namespace adcnet::chem
