#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adcnet::chem {

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };
enum class Chirality : std::uint8_t { CW, CCW };
enum class BondStereo : std::uint8_t { Up, Down, Cis, Trans };

struct Atom {
  int atomic_number = 0;  // 0 is the '*' wildcard
  int formal_charge = 0;
  std::optional<int> isotope;
  bool aromatic = false;
  int explicit_h = 0;  // hydrogens written inside a bracket atom
  int implicit_h = 0;  // hydrogens implied by the default valence model
  std::optional<Chirality> chirality;
  bool bracket = false;

  bool operator==(const Atom&) const = default;
};

struct Bond {
  std::size_t begin = 0;
  std::size_t end = 0;
  BondOrder order = BondOrder::Single;
  std::optional<BondStereo> stereo;

  std::size_t other(std::size_t atom) const { return atom == begin ? end : begin; }
  bool operator==(const Bond&) const = default;
};

struct Neighbor {
  std::size_t atom;
  std::size_t bond;
};

/// Immutable molecular graph. Construction validates the structural
/// invariants (valid distinct endpoints, no duplicate bonds, aromatic bonds
/// only between aromatic atoms) and perceives rings (SSSR).
class MolecularGraph {
 public:
  MolecularGraph() = default;
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }
  const Atom& atom(std::size_t i) const { return atoms_[i]; }
  const Bond& bond(std::size_t i) const { return bonds_[i]; }
  std::size_t atom_count() const { return atoms_.size(); }
  std::size_t bond_count() const { return bonds_.size(); }
  bool empty() const { return atoms_.empty(); }

  std::span<const Neighbor> neighbors(std::size_t atom) const { return adjacency_[atom]; }
  std::size_t degree(std::size_t atom) const { return adjacency_[atom].size(); }
  /// Neighbors that are not hydrogen atoms.
  std::size_t heavy_degree(std::size_t atom) const;
  /// Implicit + bracket hydrogens + explicit hydrogen-atom neighbors.
  int total_h(std::size_t atom) const;
  /// Sum of bond orders with aromatic bonds counted as 1.
  int bond_order_sum(std::size_t atom) const;

  /// Smallest set of smallest rings; each ring is an ordered atom cycle.
  const std::vector<std::vector<std::size_t>>& rings() const { return rings_; }
  bool atom_in_ring(std::size_t atom) const { return atom_ring_count_[atom] > 0; }
  int atom_ring_count(std::size_t atom) const { return atom_ring_count_[atom]; }
  bool bond_in_ring(std::size_t bond) const { return bond_in_ring_[bond]; }
  std::optional<std::size_t> bond_between(std::size_t a, std::size_t b) const;

  std::size_t fragment_count() const { return fragment_count_; }

  bool operator==(const MolecularGraph& other) const {
    return atoms_ == other.atoms_ && bonds_ == other.bonds_;
  }

 private:
  void perceive_rings();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::vector<std::size_t>> rings_;
  std::vector<int> atom_ring_count_;
  std::vector<bool> bond_in_ring_;
  std::size_t fragment_count_ = 0;
};

/// Hydrogens an organic-subset atom carries given its bond-order sum, or
/// nullopt when the sum exceeds every allowed valence.
std::optional<int> implicit_hydrogens(int atomic_number, bool aromatic, int bond_order_sum);

/// Whether a bracket atom's explicit valence fits its (charge-adjusted)
/// valence model. Elements without a model always fit.
bool bracket_valence_ok(const Atom& atom, int bond_order_sum);

}  // namespace adcnet::chem
