#include "adcnet/chem/descriptors.hpp"

#include <vector>

#include "adcnet/chem/elements.hpp"

namespace adcnet::chem {
namespace {

int order_value(BondOrder order) {
  switch (order) {
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    default: return 1;
  }
}

}  // namespace

double molecular_weight(const MolecularGraph& g) {
  const double hydrogen = standard_atomic_weight(1);
  double total = 0.0;
  for (const Atom& a : g.atoms()) {
    total += a.isotope ? isotope_mass(a.atomic_number, *a.isotope)
                       : standard_atomic_weight(a.atomic_number);
    total += hydrogen * (a.implicit_h + a.explicit_h);
  }
  return total;
}

MolecularGraph murcko_scaffold(const MolecularGraph& g) {
  const std::size_t n = g.atom_count();
  std::vector<bool> keep(n, true);
  std::vector<std::size_t> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = g.degree(i);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep[i] || g.atom_in_ring(i) || degree[i] > 1) continue;
      keep[i] = false;
      changed = true;
      for (const auto& nb : g.neighbors(i))
        if (keep[nb.atom]) --degree[nb.atom];
    }
  }

  std::vector<std::size_t> remap(n, static_cast<std::size_t>(-1));
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    remap[i] = atoms.size();
    atoms.push_back(g.atom(i));
  }
  std::vector<int> lost(n, 0);
  std::vector<Bond> bonds;
  for (const Bond& b : g.bonds()) {
    if (keep[b.begin] && keep[b.end]) {
      bonds.push_back(b);
      bonds.back().begin = remap[b.begin];
      bonds.back().end = remap[b.end];
    } else if (keep[b.begin]) {
      lost[b.begin] += order_value(b.order);
    } else if (keep[b.end]) {
      lost[b.end] += order_value(b.order);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i] || lost[i] == 0) continue;
    Atom& a = atoms[remap[i]];
    a.chirality.reset();
    if (a.bracket) {
      a.explicit_h += lost[i];
    } else {
      a.implicit_h += lost[i];
    }
  }
  // Bond stereo referring to removed substituents is no longer meaningful.
  std::vector<bool> touched(atoms.size(), false);
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i] && lost[i] > 0) touched[remap[i]] = true;
  for (Bond& b : bonds)
    if (touched[b.begin] || touched[b.end]) b.stereo.reset();
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

}  // namespace adcnet::chem
