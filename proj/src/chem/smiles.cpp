#include "adcnet/chem/smiles.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "adcnet/chem/elements.hpp"

namespace adcnet::chem {
namespace {

struct PendingBond {
  char symbol;
  std::size_t offset;
};

struct OpenRing {
  std::size_t atom;
  std::optional<PendingBond> bond;
  std::size_t offset;
};

// Directional single bond as written: `from` precedes `to` in the string.
struct DirectionalBond {
  std::size_t bond;
  std::size_t from;
  std::size_t to;
  char symbol;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MolecularGraph run() {
    if (text_.empty()) throw SmilesParseError(0, "empty SMILES");
    bool expect_atom_after_open = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) break;
      if (c == '(') {
        if (!prev_) throw SmilesParseError(pos_, "branch opened before any atom");
        if (pending_) throw SmilesParseError(pos_, "bond symbol before branch");
        branches_.push_back({*prev_, pos_});
        expect_atom_after_open = true;
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty()) throw SmilesParseError(pos_, "unbalanced ')'");
        if (expect_atom_after_open) throw SmilesParseError(pos_, "empty branch");
        if (pending_) throw SmilesParseError(pending_->offset, "dangling bond symbol");
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\' ||
                 c == '$') {
        if (!prev_) throw SmilesParseError(pos_, "bond symbol before any atom");
        if (pending_) throw SmilesParseError(pos_, "consecutive bond symbols");
        if (c == '$') throw SmilesParseError(pos_, "quadruple bonds are not supported");
        pending_ = PendingBond{c, pos_};
        ++pos_;
      } else if (c == '.') {
        if (pending_) throw SmilesParseError(pending_->offset, "dangling bond symbol");
        if (!prev_) throw SmilesParseError(pos_, "'.' before any atom");
        if (expect_atom_after_open) throw SmilesParseError(pos_, "empty branch");
        prev_.reset();
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (!prev_) throw SmilesParseError(pos_, "ring closure before any atom");
        ring_closure();
      } else {
        std::size_t atom_offset = pos_;
        const std::size_t atom = c == '[' ? bracket_atom() : organic_atom();
        expect_atom_after_open = false;
        attach(atom, atom_offset);
      }
    }
    if (pending_) throw SmilesParseError(pending_->offset, "dangling bond symbol");
    if (!branches_.empty()) throw SmilesParseError(branches_.back().second, "unbalanced '('");
    if (!open_rings_.empty()) {
      const auto& [digit, ring] = *open_rings_.begin();
      throw SmilesParseError(ring.offset, "unmatched ring-closure " + std::to_string(digit));
    }
    if (atoms_.empty()) throw SmilesParseError(0, "no atoms");
    if (!prev_ && pos_ > 0 && text_[pos_ - 1] == '.') {
      throw SmilesParseError(pos_ - 1, "trailing '.'");
    }
    assign_hydrogens();
    assign_double_bond_stereo();
    // An unmarked bond between two aromatic atoms outside any ring (biaryl
    // link) is single.
    MolecularGraph graph(atoms_, bonds_);
    bool demoted = false;
    for (std::size_t b = 0; b < bonds_.size(); ++b) {
      if (bonds_[b].order == BondOrder::Aromatic && !graph.bond_in_ring(b) && !explicit_aromatic_[b]) {
        bonds_[b].order = BondOrder::Single;
        demoted = true;
      }
    }
    if (!demoted) return graph;
    return MolecularGraph(std::move(atoms_), std::move(bonds_));
  }

 private:
  std::size_t organic_atom() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    Atom atom;
    auto two = [&](char next) { return pos_ + 1 < text_.size() && text_[pos_ + 1] == next; };
    switch (c) {
      case 'B':
        if (two('r')) {
          atom.atomic_number = 35;
          ++pos_;
        } else {
          atom.atomic_number = 5;
        }
        break;
      case 'C':
        if (two('l')) {
          atom.atomic_number = 17;
          ++pos_;
        } else {
          atom.atomic_number = 6;
        }
        break;
      case 'N': atom.atomic_number = 7; break;
      case 'O': atom.atomic_number = 8; break;
      case 'P': atom.atomic_number = 15; break;
      case 'S': atom.atomic_number = 16; break;
      case 'F': atom.atomic_number = 9; break;
      case 'I': atom.atomic_number = 53; break;
      case 'b': atom.atomic_number = 5; atom.aromatic = true; break;
      case 'c': atom.atomic_number = 6; atom.aromatic = true; break;
      case 'n': atom.atomic_number = 7; atom.aromatic = true; break;
      case 'o': atom.atomic_number = 8; atom.aromatic = true; break;
      case 'p': atom.atomic_number = 15; atom.aromatic = true; break;
      case 's': atom.atomic_number = 16; atom.aromatic = true; break;
      case '*': atom.atomic_number = 0; break;
      default:
        if (std::isalpha(static_cast<unsigned char>(c))) {
          throw SmilesParseError(start, std::string("unknown element '") + c + "' (use brackets)");
        }
        throw SmilesParseError(start, std::string("unexpected character '") + c + "'");
    }
    ++pos_;
    atoms_.push_back(atom);
    offsets_.push_back(start);
    return atoms_.size() - 1;
  }

  int read_number() {
    int value = 0;
    int digits = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
      if (++digits > 6) throw SmilesParseError(pos_, "number too long");
    }
    return value;
  }

  std::size_t bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    Atom atom;
    atom.bracket = true;
    auto at_end = [&] { return pos_ >= text_.size(); };
    auto fail = [&](const std::string& why) { throw SmilesParseError(pos_, why); };

    if (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      atom.isotope = read_number();
    }
    if (at_end()) fail("unterminated bracket atom");

    // Element symbol.
    const char c = text_[pos_];
    if (c == '*') {
      atom.atomic_number = 0;
      ++pos_;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static const std::pair<std::string_view, int> kAromatic[] = {
          {"se", 34}, {"as", 33}, {"te", 52}, {"b", 5}, {"c", 6},
          {"n", 7},   {"o", 8},   {"p", 15},  {"s", 16}};
      bool found = false;
      for (const auto& [sym, z] : kAromatic) {
        if (text_.substr(pos_, sym.size()) == sym) {
          atom.atomic_number = z;
          atom.aromatic = true;
          pos_ += sym.size();
          found = true;
          break;
        }
      }
      if (!found) fail(std::string("unknown aromatic element '") + c + "'");
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::optional<int> z;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        z = atomic_number(text_.substr(pos_, 2));
        if (z) pos_ += 2;
      }
      if (!z) {
        z = atomic_number(text_.substr(pos_, 1));
        if (!z) fail(std::string("unknown element '") + c + "'");
        ++pos_;
      }
      atom.atomic_number = *z;
    } else {
      fail("expected element symbol in bracket atom");
    }

    // Chirality.
    if (!at_end() && text_[pos_] == '@') {
      ++pos_;
      if (!at_end() && text_[pos_] == '@') {
        atom.chirality = Chirality::CW;
        ++pos_;
      } else if (text_.substr(pos_, 3) == "TH1") {
        atom.chirality = Chirality::CCW;
        pos_ += 3;
      } else if (text_.substr(pos_, 3) == "TH2") {
        atom.chirality = Chirality::CW;
        pos_ += 3;
      } else if (!at_end() && std::isupper(static_cast<unsigned char>(text_[pos_]))) {
        fail("unsupported chirality class");
      } else {
        atom.chirality = Chirality::CCW;
      }
    }
    // Hydrogen count.
    if (!at_end() && text_[pos_] == 'H') {
      ++pos_;
      atom.explicit_h = 1;
      if (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        atom.explicit_h = read_number();
      }
    }
    // Charge.
    if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      ++pos_;
      int magnitude = 1;
      if (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        magnitude = read_number();
      } else {
        while (!at_end() && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude > 15) fail("charge out of range");
      atom.formal_charge = sign == '+' ? magnitude : -magnitude;
    }
    // Atom class (parsed and discarded).
    if (!at_end() && text_[pos_] == ':') {
      ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("expected atom class number");
      }
      read_number();
    }
    if (at_end() || text_[pos_] != ']') fail("expected ']'");
    ++pos_;
    atoms_.push_back(atom);
    offsets_.push_back(start);
    return atoms_.size() - 1;
  }

  BondOrder order_for(std::optional<PendingBond> bond, std::size_t a, std::size_t b) {
    if (!bond) {
      return atoms_[a].aromatic && atoms_[b].aromatic ? BondOrder::Aromatic : BondOrder::Single;
    }
    switch (bond->symbol) {
      case '=': return BondOrder::Double;
      case '#': return BondOrder::Triple;
      case ':':
        if (!atoms_[a].aromatic || !atoms_[b].aromatic) {
          throw SmilesParseError(bond->offset, "aromatic bond between non-aromatic atoms");
        }
        return BondOrder::Aromatic;
      default: return BondOrder::Single;
    }
  }

  void add_bond(std::size_t from, std::size_t to, std::optional<PendingBond> symbol,
                std::size_t offset) {
    if (from == to) throw SmilesParseError(offset, "atom bonded to itself");
    for (const auto& b : bonds_) {
      if ((b.begin == from && b.end == to) || (b.begin == to && b.end == from)) {
        throw SmilesParseError(offset, "duplicate bond");
      }
    }
    Bond bond{from, to, order_for(symbol, from, to), std::nullopt};
    if (symbol && (symbol->symbol == '/' || symbol->symbol == '\\')) {
      bond.stereo = symbol->symbol == '/' ? BondStereo::Up : BondStereo::Down;
      directional_.push_back({bonds_.size(), from, to, symbol->symbol});
    }
    bonds_.push_back(bond);
    explicit_aromatic_.push_back(symbol && symbol->symbol == ':');
  }

  void attach(std::size_t atom, std::size_t offset) {
    if (prev_) {
      add_bond(*prev_, atom, pending_, pending_ ? pending_->offset : offset);
    }
    pending_.reset();
    prev_ = atom;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    int digit;
    if (text_[pos_] == '%') {
      ++pos_;
      if (pos_ + 1 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        throw SmilesParseError(start, "'%' must be followed by two digits");
      }
      digit = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
      pos_ += 2;
    } else {
      digit = text_[pos_] - '0';
      ++pos_;
    }
    auto it = open_rings_.find(digit);
    if (it == open_rings_.end()) {
      open_rings_.emplace(digit, OpenRing{*prev_, pending_, start});
      pending_.reset();
      return;
    }
    OpenRing ring = it->second;
    open_rings_.erase(it);
    std::optional<PendingBond> symbol = ring.bond;
    if (pending_) {
      if (symbol && symbol->symbol != pending_->symbol) {
        const bool both_directional = (symbol->symbol == '/' || symbol->symbol == '\\') &&
                                      (pending_->symbol == '/' || pending_->symbol == '\\');
        if (!both_directional) {
          throw SmilesParseError(pending_->offset, "conflicting ring-closure bond symbols");
        }
      } else if (!symbol) {
        symbol = pending_;
      }
    }
    pending_.reset();
    add_bond(ring.atom, *prev_, symbol, start);
  }

  void assign_hydrogens() {
    std::vector<int> sums(atoms_.size(), 0);
    for (const auto& b : bonds_) {
      const int v = b.order == BondOrder::Double ? 2 : b.order == BondOrder::Triple ? 3 : 1;
      sums[b.begin] += v;
      sums[b.end] += v;
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      Atom& atom = atoms_[i];
      if (atom.bracket) {
        if (!bracket_valence_ok(atom, sums[i])) {
          throw SmilesParseError(offsets_[i], "valence violation on " +
                                                  std::string(element_symbol(atom.atomic_number)));
        }
        continue;
      }
      const auto h = implicit_hydrogens(atom.atomic_number, atom.aromatic, sums[i]);
      if (!h) {
        throw SmilesParseError(offsets_[i], "valence violation on " +
                                                std::string(element_symbol(atom.atomic_number)));
      }
      atom.implicit_h = *h;
    }
  }

  // Whether neighbor `nbr` of `atom` lies "above" it, from a directional bond.
  static bool neighbor_above(const DirectionalBond& d, std::size_t atom) {
    const bool written_from_atom = d.from == atom;
    return written_from_atom ? d.symbol == '/' : d.symbol == '\\';
  }

  void assign_double_bond_stereo() {
    if (directional_.empty()) return;
    for (auto& bond : bonds_) {
      if (bond.order != BondOrder::Double) continue;
      const DirectionalBond* left = nullptr;
      const DirectionalBond* right = nullptr;
      for (const auto& d : directional_) {
        const Bond& single = bonds_[d.bond];
        const bool touches_begin = single.begin == bond.begin || single.end == bond.begin;
        const bool touches_end = single.begin == bond.end || single.end == bond.end;
        if (touches_begin && !touches_end && !left) left = &d;
        if (touches_end && !touches_begin && !right) right = &d;
      }
      if (!left || !right) continue;
      const bool left_above = neighbor_above(*left, bond.begin);
      const bool right_above = neighbor_above(*right, bond.end);
      bond.stereo = left_above == right_above ? BondStereo::Cis : BondStereo::Trans;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<std::size_t> offsets_;
  std::vector<Bond> bonds_;
  std::optional<std::size_t> prev_;
  std::optional<PendingBond> pending_;
  std::vector<std::pair<std::size_t, std::size_t>> branches_;
  std::map<int, OpenRing> open_rings_;
  std::vector<DirectionalBond> directional_;
  std::vector<bool> explicit_aromatic_;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view smiles) {
  std::size_t begin = 0;
  while (begin < smiles.size() && std::isspace(static_cast<unsigned char>(smiles[begin]))) ++begin;
  std::string_view trimmed = smiles.substr(begin);
  try {
    Parser parser(trimmed);
    return parser.run();
  } catch (const SmilesParseError& e) {
    if (begin == 0) throw;
    throw SmilesParseError(e.offset() + begin, e.reason());
  }
}

}  // namespace adcnet::chem
