#pragma once

#include "adcnet/chem/molecule.hpp"

namespace adcnet::chem {

/// Average molecular weight in g/mol including all hydrogens. Isotope-labelled
/// atoms use the isotopic mass.
double molecular_weight(const MolecularGraph& g);

/// Bemis-Murcko framework: repeatedly strips non-ring atoms with at most one
/// neighbor. Remaining atoms keep their relative order; atoms that lost
/// neighbors gain hydrogens. Acyclic input gives an empty graph.
MolecularGraph murcko_scaffold(const MolecularGraph& g);

}  // namespace adcnet::chem
