#include "adcnet/chem/molecule.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "adcnet/chem/elements.hpp"
#include "adcnet/error.hpp"

namespace adcnet::chem {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

int order_value(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 1;
  }
  return 1;
}

// Edge-incidence vector over ring bonds, packed in 64-bit words.
using EdgeSet = std::vector<std::uint64_t>;

bool any_bit(const EdgeSet& s) {
  return std::any_of(s.begin(), s.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t lowest_bit(const EdgeSet& s) {
  for (std::size_t w = 0; w < s.size(); ++w) {
    if (s[w]) return w * 64 + static_cast<std::size_t>(__builtin_ctzll(s[w]));
  }
  return kNone;
}

}  // namespace

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  adjacency_.resize(atoms_.size());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    const Bond& bond = bonds_[b];
    if (bond.begin >= atoms_.size() || bond.end >= atoms_.size()) {
      throw Error(ErrorCode::InvalidArgument, "bond endpoint out of range");
    }
    if (bond.begin == bond.end) throw Error(ErrorCode::InvalidArgument, "self bond");
    const auto key = std::minmax(bond.begin, bond.end);
    if (!seen.insert(key).second) throw Error(ErrorCode::InvalidArgument, "duplicate bond");
    if (bond.order == BondOrder::Aromatic &&
        !(atoms_[bond.begin].aromatic && atoms_[bond.end].aromatic)) {
      throw Error(ErrorCode::InvalidArgument, "aromatic bond between non-aromatic atoms");
    }
    adjacency_[bond.begin].push_back({bond.end, b});
    adjacency_[bond.end].push_back({bond.begin, b});
  }
  perceive_rings();
}

std::size_t MolecularGraph::heavy_degree(std::size_t atom) const {
  std::size_t n = 0;
  for (const auto& nb : adjacency_[atom])
    if (atoms_[nb.atom].atomic_number != 1) ++n;
  return n;
}

int MolecularGraph::total_h(std::size_t atom) const {
  int h = atoms_[atom].implicit_h + atoms_[atom].explicit_h;
  for (const auto& nb : adjacency_[atom])
    if (atoms_[nb.atom].atomic_number == 1) ++h;
  return h;
}

int MolecularGraph::bond_order_sum(std::size_t atom) const {
  int sum = 0;
  for (const auto& nb : adjacency_[atom]) sum += order_value(bonds_[nb.bond].order);
  return sum;
}

std::optional<std::size_t> MolecularGraph::bond_between(std::size_t a, std::size_t b) const {
  for (const auto& nb : adjacency_[a])
    if (nb.atom == b) return nb.bond;
  return std::nullopt;
}

void MolecularGraph::perceive_rings() {
  const std::size_t n = atoms_.size();
  atom_ring_count_.assign(n, 0);
  bond_in_ring_.assign(bonds_.size(), false);
  rings_.clear();

  // Connected components.
  std::vector<std::size_t> component(n, kNone);
  fragment_count_ = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (component[start] != kNone) continue;
    std::vector<std::size_t> stack{start};
    component[start] = fragment_count_;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[a]) {
        if (component[nb.atom] == kNone) {
          component[nb.atom] = fragment_count_;
          stack.push_back(nb.atom);
        }
      }
    }
    ++fragment_count_;
  }

  // A bond is a ring bond iff its endpoints stay connected without it.
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    std::vector<bool> visited(n, false);
    std::vector<std::size_t> stack{bonds_[b].begin};
    visited[bonds_[b].begin] = true;
    bool reached = false;
    while (!stack.empty() && !reached) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[a]) {
        if (nb.bond == b || visited[nb.atom]) continue;
        if (nb.atom == bonds_[b].end) {
          reached = true;
          break;
        }
        visited[nb.atom] = true;
        stack.push_back(nb.atom);
      }
    }
    bond_in_ring_[b] = reached;
  }

  // Ring-bond subgraph: index ring bonds and ring atoms.
  std::vector<std::size_t> ring_bond_index(bonds_.size(), kNone);
  std::size_t ring_bonds = 0;
  std::vector<bool> ring_atom(n, false);
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    if (!bond_in_ring_[b]) continue;
    ring_bond_index[b] = ring_bonds++;
    ring_atom[bonds_[b].begin] = ring_atom[bonds_[b].end] = true;
  }
  if (ring_bonds == 0) return;

  std::size_t ring_atoms = static_cast<std::size_t>(std::count(ring_atom.begin(), ring_atom.end(), true));
  std::set<std::size_t> ring_components;
  for (std::size_t a = 0; a < n; ++a)
    if (ring_atom[a]) ring_components.insert(component[a]);
  // Bridges separate ring systems, so count components of the ring subgraph.
  std::vector<std::size_t> sub_component(n, kNone);
  std::size_t sub_components = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (!ring_atom[start] || sub_component[start] != kNone) continue;
    std::vector<std::size_t> stack{start};
    sub_component[start] = sub_components;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[a]) {
        if (!bond_in_ring_[nb.bond] || sub_component[nb.atom] != kNone) continue;
        sub_component[nb.atom] = sub_components;
        stack.push_back(nb.atom);
      }
    }
    ++sub_components;
  }
  const std::size_t cycle_rank = ring_bonds - ring_atoms + sub_components;

  // Horton candidates: for every root v and ring bond (x, y), the cycle
  // P(v,x) + (x,y) + P(y,v) built from a BFS tree rooted at v.
  const std::size_t words = (ring_bonds + 63) / 64;
  struct Candidate {
    std::vector<std::size_t> atoms;
    EdgeSet edges;
  };
  std::vector<Candidate> candidates;
  std::set<EdgeSet> unique_edges;

  for (std::size_t root = 0; root < n; ++root) {
    if (!ring_atom[root]) continue;
    std::vector<std::size_t> parent(n, kNone), parent_bond(n, kNone), branch(n, kNone);
    std::vector<std::size_t> depth(n, kNone);
    std::queue<std::size_t> queue;
    depth[root] = 0;
    branch[root] = root;
    queue.push(root);
    while (!queue.empty()) {
      const std::size_t a = queue.front();
      queue.pop();
      for (const auto& nb : adjacency_[a]) {
        if (!bond_in_ring_[nb.bond] || depth[nb.atom] != kNone) continue;
        depth[nb.atom] = depth[a] + 1;
        parent[nb.atom] = a;
        parent_bond[nb.atom] = nb.bond;
        branch[nb.atom] = a == root ? nb.atom : branch[a];
        queue.push(nb.atom);
      }
    }
    for (std::size_t b = 0; b < bonds_.size(); ++b) {
      if (!bond_in_ring_[b]) continue;
      const std::size_t x = bonds_[b].begin;
      const std::size_t y = bonds_[b].end;
      if (depth[x] == kNone || depth[y] == kNone) continue;
      if (parent[x] == y && parent_bond[x] == b) continue;
      if (parent[y] == x && parent_bond[y] == b) continue;
      if (x != root && y != root && branch[x] == branch[y]) continue;

      Candidate c;
      c.edges.assign(words, 0);
      auto set_edge = [&](std::size_t bond) {
        const std::size_t e = ring_bond_index[bond];
        c.edges[e / 64] |= std::uint64_t{1} << (e % 64);
      };
      std::vector<std::size_t> left;
      for (std::size_t a = x; a != kNone; a = parent[a]) {
        left.push_back(a);
        if (parent[a] != kNone) set_edge(parent_bond[a]);
      }
      std::reverse(left.begin(), left.end());  // root ... x
      c.atoms = left;
      set_edge(b);
      for (std::size_t a = y; a != root; a = parent[a]) {
        c.atoms.push_back(a);
        set_edge(parent_bond[a]);
      }
      if (unique_edges.insert(c.edges).second) candidates.push_back(std::move(c));
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.atoms.size() < b.atoms.size(); });

  // Greedy GF(2) elimination keeps the shortest independent cycles.
  std::vector<EdgeSet> basis;
  std::vector<std::size_t> pivots;
  for (auto& c : candidates) {
    if (rings_.size() == cycle_rank) break;
    EdgeSet reduced = c.edges;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const std::size_t p = pivots[i];
      if (reduced[p / 64] >> (p % 64) & 1) {
        for (std::size_t w = 0; w < words; ++w) reduced[w] ^= basis[i][w];
      }
    }
    if (!any_bit(reduced)) continue;
    pivots.push_back(lowest_bit(reduced));
    basis.push_back(std::move(reduced));
    rings_.push_back(std::move(c.atoms));
  }
  for (const auto& ring : rings_)
    for (std::size_t a : ring) ++atom_ring_count_[a];
}

std::optional<int> implicit_hydrogens(int atomic_number, bool aromatic, int bond_order_sum) {
  const auto valences = default_valences(atomic_number);
  if (valences.empty()) return 0;
  if (aromatic) {
    // One valence unit is taken by the aromatic system; only the lowest
    // valence applies to aromatic atoms.
    if (bond_order_sum > valences.back()) return std::nullopt;
    return std::max(0, valences.front() - bond_order_sum - 1);
  }
  for (int v : valences) {
    if (v >= bond_order_sum) return v - bond_order_sum;
  }
  return std::nullopt;
}

bool bracket_valence_ok(const Atom& atom, int bond_order_sum) {
  if (atom.atomic_number <= 0) return true;
  const int effective = atom.atomic_number - atom.formal_charge;
  // Charged atoms take the valence model of their isoelectronic neighbor.
  if (effective <= 0 || effective > kMaxAtomicNumber) return true;
  const auto valences = default_valences(effective);
  if (valences.empty()) return true;
  return bond_order_sum + atom.explicit_h <= valences.back();
}

}  // namespace adcnet::chem
