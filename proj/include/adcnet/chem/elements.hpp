#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace adcnet::chem {

constexpr int kMaxAtomicNumber = 118;

/// Atomic number for an element symbol ("C", "Cl", ...); nullopt if unknown.
/// "*" is not an element and is handled by the parsers directly.
std::optional<int> atomic_number(std::string_view symbol) noexcept;

std::string_view element_symbol(int atomic_number) noexcept;

/// Standard atomic weight in g/mol (0 for the wildcard atom).
double standard_atomic_weight(int atomic_number) noexcept;

/// Mass of a specific isotope; falls back to the mass number when the
/// isotope is not tabulated.
double isotope_mass(int atomic_number, int mass_number) noexcept;

/// Allowed neutral valences in ascending order; empty when the element has
/// no tabulated valence model (metals, noble gases).
std::span<const int> default_valences(int atomic_number) noexcept;

}  // namespace adcnet::chem
