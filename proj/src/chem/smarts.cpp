#include "adcnet/chem/smarts.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "adcnet/chem/elements.hpp"
#include "adcnet/error.hpp"

namespace adcnet::chem {
namespace {

enum class AtomOp { True, AtomicNum, Aliphatic, Aromatic, AnyAromatic, AnyAliphatic, TotalH,
                    InRing, RingCount, Charge, Recursive, Not, And, Or };

struct AtomExpr {
  AtomOp op = AtomOp::True;
  int value = 0;
  std::vector<AtomExpr> children;
};

enum class BondOp { Any, Single, Double, Triple, Aromatic, Ring, Default, Not, And, Or };

struct BondExpr {
  BondOp op = BondOp::Default;
  std::vector<BondExpr> children;
};

struct QueryBond {
  std::size_t a;
  std::size_t b;
  BondExpr expr;
};

}  // namespace

struct SmartsPattern::Query {
  std::string source;
  std::vector<AtomExpr> atoms;
  std::vector<QueryBond> bonds;
  // For atom i > 0: index of the bond linking it to an earlier atom.
  std::vector<std::size_t> parent_bond;
  std::vector<std::unique_ptr<Query>> recursive;
};

namespace {

using Query = SmartsPattern::Query;

[[noreturn]] void fail(std::size_t offset, const std::string& why) {
  throw Error(ErrorCode::ParseError, "SMARTS " + why + " at offset " + std::to_string(offset));
}

class SmartsParser {
 public:
  SmartsParser(std::string_view text, Query& query) : text_(text), q_(query) {}

  void run() {
    std::optional<std::size_t> prev;
    std::optional<BondExpr> pending;
    std::vector<std::size_t> branches;
    std::map<int, std::pair<std::size_t, std::optional<BondExpr>>> rings;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (!prev) fail(pos_, "branch before atom");
        branches.push_back(*prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty()) fail(pos_, "unbalanced ')'");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        if (!prev) fail(pos_, "ring closure before atom");
        const int digit = c - '0';
        ++pos_;
        auto it = rings.find(digit);
        if (it == rings.end()) {
          rings.emplace(digit, std::make_pair(*prev, pending));
        } else {
          BondExpr expr = pending ? *pending : it->second.second ? *it->second.second : BondExpr{};
          q_.bonds.push_back({it->second.first, *prev, std::move(expr)});
          rings.erase(it);
        }
        pending.reset();
      } else if (is_bond_char(c)) {
        if (!prev) fail(pos_, "bond before atom");
        pending = bond_expression();
      } else if (c == '.') {
        fail(pos_, "disconnected patterns are not supported");
      } else {
        const std::size_t atom = q_.atoms.size();
        q_.atoms.push_back(c == '[' ? bracket() : simple_atom());
        if (prev) {
          q_.parent_bond.push_back(q_.bonds.size());
          q_.bonds.push_back({*prev, atom, pending ? *pending : BondExpr{}});
        } else if (atom != 0) {
          fail(pos_, "disconnected patterns are not supported");
        } else {
          q_.parent_bond.push_back(0);
        }
        pending.reset();
        prev = atom;
      }
    }
    if (!branches.empty()) fail(pos_, "unbalanced '('");
    if (!rings.empty()) fail(pos_, "unmatched ring closure");
    if (q_.atoms.empty()) fail(0, "empty pattern");
  }

 private:
  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '!' ||
           c == ';' || c == '&' || c == ',';
  }

  AtomExpr element(int z, bool aromatic) {
    return AtomExpr{aromatic ? AtomOp::Aromatic : AtomOp::Aliphatic, z, {}};
  }

  AtomExpr simple_atom() {
    const char c = text_[pos_];
    auto next_is = [&](char n) { return pos_ + 1 < text_.size() && text_[pos_ + 1] == n; };
    AtomExpr e;
    switch (c) {
      case '*': e.op = AtomOp::True; break;
      case 'a': e.op = AtomOp::AnyAromatic; break;
      case 'A': e.op = AtomOp::AnyAliphatic; break;
      case 'C':
        if (next_is('l')) {
          ++pos_;
          e = element(17, false);
        } else {
          e = element(6, false);
        }
        break;
      case 'B':
        if (next_is('r')) {
          ++pos_;
          e = element(35, false);
        } else {
          e = element(5, false);
        }
        break;
      case 'N': e = element(7, false); break;
      case 'O': e = element(8, false); break;
      case 'P': e = element(15, false); break;
      case 'S': e = element(16, false); break;
      case 'F': e = element(9, false); break;
      case 'I': e = element(53, false); break;
      case 'c': e = element(6, true); break;
      case 'n': e = element(7, true); break;
      case 'o': e = element(8, true); break;
      case 's': e = element(16, true); break;
      case 'p': e = element(15, true); break;
      case 'b': e = element(5, true); break;
      default: fail(pos_, std::string("unexpected character '") + c + "'");
    }
    ++pos_;
    return e;
  }

  AtomExpr bracket() {
    ++pos_;  // '['
    AtomExpr e = atom_low_and();
    if (pos_ >= text_.size() || text_[pos_] != ']') fail(pos_, "expected ']'");
    ++pos_;
    return e;
  }

  AtomExpr atom_low_and() {
    AtomExpr e = atom_or();
    while (pos_ < text_.size() && text_[pos_] == ';') {
      ++pos_;
      e = AtomExpr{AtomOp::And, 0, {std::move(e), atom_or()}};
    }
    return e;
  }

  AtomExpr atom_or() {
    AtomExpr e = atom_high_and();
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      e = AtomExpr{AtomOp::Or, 0, {std::move(e), atom_high_and()}};
    }
    return e;
  }

  AtomExpr atom_high_and() {
    AtomExpr e = atom_unary();
    while (pos_ < text_.size() && text_[pos_] != ']' && text_[pos_] != ';' && text_[pos_] != ',' &&
           text_[pos_] != ')') {
      if (text_[pos_] == '&') ++pos_;
      e = AtomExpr{AtomOp::And, 0, {std::move(e), atom_unary()}};
    }
    return e;
  }

  AtomExpr atom_unary() {
    if (pos_ >= text_.size()) fail(pos_, "unterminated atom expression");
    if (text_[pos_] == '!') {
      ++pos_;
      return AtomExpr{AtomOp::Not, 0, {atom_unary()}};
    }
    return atom_primitive();
  }

  int number_or(int fallback) {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) return fallback;
    int v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  AtomExpr atom_primitive() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '#') {
      ++pos_;
      const int z = number_or(-1);
      if (z < 0) fail(start, "expected atomic number after '#'");
      return AtomExpr{AtomOp::AtomicNum, z, {}};
    }
    if (c == '*') {
      ++pos_;
      return AtomExpr{AtomOp::True, 0, {}};
    }
    if (c == '$') {
      ++pos_;
      if (pos_ >= text_.size() || text_[pos_] != '(') fail(pos_, "expected '(' after '$'");
      const std::size_t open = ++pos_;
      int depth = 1;
      while (pos_ < text_.size() && depth > 0) {
        if (text_[pos_] == '(') ++depth;
        if (text_[pos_] == ')') --depth;
        ++pos_;
      }
      if (depth != 0) fail(open, "unterminated recursive SMARTS");
      auto sub = std::make_unique<Query>();
      sub->source = std::string(text_.substr(open, pos_ - 1 - open));
      SmartsParser(sub->source, *sub).run();
      q_.recursive.push_back(std::move(sub));
      return AtomExpr{AtomOp::Recursive, static_cast<int>(q_.recursive.size() - 1), {}};
    }
    if (c == '+' || c == '-') {
      ++pos_;
      int magnitude = number_or(-1);
      if (magnitude < 0) {
        magnitude = 1;
        while (pos_ < text_.size() && text_[pos_] == c) {
          ++magnitude;
          ++pos_;
        }
      }
      return AtomExpr{AtomOp::Charge, c == '+' ? magnitude : -magnitude, {}};
    }
    // Two-letter element symbols take precedence over single-letter primitives.
    if (std::isupper(static_cast<unsigned char>(c)) && pos_ + 1 < text_.size() &&
        std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
      if (auto z = atomic_number(text_.substr(pos_, 2))) {
        pos_ += 2;
        return element(*z, false);
      }
    }
    if (c == 'a' && text_.substr(pos_, 2) == "as") {
      pos_ += 2;
      return element(33, true);
    }
    if (c == 'a') {
      ++pos_;
      return AtomExpr{AtomOp::AnyAromatic, 0, {}};
    }
    if (c == 'A') {
      ++pos_;
      return AtomExpr{AtomOp::AnyAliphatic, 0, {}};
    }
    if (c == 'R') {
      ++pos_;
      const int n = number_or(-1);
      if (n < 0) return AtomExpr{AtomOp::InRing, 0, {}};
      return AtomExpr{AtomOp::RingCount, n, {}};
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (c == 'H') {
        ++pos_;
        return AtomExpr{AtomOp::TotalH, number_or(1), {}};
      }
      if (auto z = atomic_number(text_.substr(pos_, 1))) {
        ++pos_;
        return element(*z, false);
      }
      fail(start, std::string("unknown element '") + c + "'");
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      static const std::pair<std::string_view, int> kAromatic[] = {
          {"se", 34}, {"as", 33}, {"c", 6}, {"n", 7}, {"o", 8}, {"s", 16}, {"p", 15}, {"b", 5}};
      for (const auto& [sym, z] : kAromatic) {
        if (text_.substr(pos_, sym.size()) == sym) {
          pos_ += sym.size();
          return element(z, true);
        }
      }
    }
    fail(start, std::string("unsupported atom primitive '") + c + "'");
  }

  BondExpr bond_expression() { return bond_low_and(); }

  BondExpr bond_low_and() {
    BondExpr e = bond_or();
    while (pos_ < text_.size() && text_[pos_] == ';') {
      ++pos_;
      e = BondExpr{BondOp::And, {std::move(e), bond_or()}};
    }
    return e;
  }

  BondExpr bond_or() {
    BondExpr e = bond_high_and();
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      e = BondExpr{BondOp::Or, {std::move(e), bond_high_and()}};
    }
    return e;
  }

  bool bond_primitive_next() const {
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '!' ||
           c == '&';
  }

  BondExpr bond_high_and() {
    BondExpr e = bond_unary();
    while (bond_primitive_next()) {
      if (text_[pos_] == '&') ++pos_;
      e = BondExpr{BondOp::And, {std::move(e), bond_unary()}};
    }
    return e;
  }

  BondExpr bond_unary() {
    if (pos_ >= text_.size()) fail(pos_, "unterminated bond expression");
    const char c = text_[pos_++];
    switch (c) {
      case '!': return BondExpr{BondOp::Not, {bond_unary()}};
      case '-': return BondExpr{BondOp::Single, {}};
      case '=': return BondExpr{BondOp::Double, {}};
      case '#': return BondExpr{BondOp::Triple, {}};
      case ':': return BondExpr{BondOp::Aromatic, {}};
      case '~': return BondExpr{BondOp::Any, {}};
      case '@': return BondExpr{BondOp::Ring, {}};
      default: fail(pos_ - 1, std::string("unsupported bond primitive '") + c + "'");
    }
  }

  std::string_view text_;
  Query& q_;
  std::size_t pos_ = 0;
};

class Matcher {
 public:
  Matcher(const Query& q, const MolecularGraph& g) : q_(q), g_(g), mapping_(q.atoms.size()) {
    recursive_cache_.resize(q.recursive.size());
  }

  // Calls visit(mapping) for each match; visit returns false to stop.
  template <typename Visit>
  void enumerate(std::optional<std::size_t> first_atom, Visit&& visit) {
    used_.assign(g_.atom_count(), false);
    stop_ = false;
    for (std::size_t t = 0; t < g_.atom_count() && !stop_; ++t) {
      if (first_atom && t != *first_atom) continue;
      if (!atom_matches(q_.atoms[0], t)) continue;
      mapping_[0] = t;
      used_[t] = true;
      extend(1, visit);
      used_[t] = false;
    }
  }

 private:
  template <typename Visit>
  void extend(std::size_t qi, Visit& visit) {
    if (stop_) return;
    if (qi == q_.atoms.size()) {
      if (!visit(mapping_)) stop_ = true;
      return;
    }
    const QueryBond& link = q_.bonds[q_.parent_bond[qi]];
    const std::size_t anchor = mapping_[link.a == qi ? link.b : link.a];
    for (const auto& nb : g_.neighbors(anchor)) {
      if (used_[nb.atom]) continue;
      if (!bond_matches(link.expr, nb.bond)) continue;
      if (!atom_matches(q_.atoms[qi], nb.atom)) continue;
      if (!closures_match(qi, nb.atom)) continue;
      mapping_[qi] = nb.atom;
      used_[nb.atom] = true;
      extend(qi + 1, visit);
      used_[nb.atom] = false;
      if (stop_) return;
    }
  }

  // Ring-closure bonds between qi and already-mapped query atoms.
  bool closures_match(std::size_t qi, std::size_t target) {
    for (std::size_t bi = 0; bi < q_.bonds.size(); ++bi) {
      if (bi == q_.parent_bond[qi]) continue;
      const QueryBond& qb = q_.bonds[bi];
      std::size_t other;
      if (qb.a == qi && qb.b < qi) {
        other = qb.b;
      } else if (qb.b == qi && qb.a < qi) {
        other = qb.a;
      } else {
        continue;
      }
      const auto bond = g_.bond_between(target, mapping_[other]);
      if (!bond || !bond_matches(qb.expr, *bond)) return false;
    }
    return true;
  }

  bool bond_matches(const BondExpr& e, std::size_t bond_index) const {
    const Bond& b = g_.bond(bond_index);
    switch (e.op) {
      case BondOp::Any: return true;
      case BondOp::Single: return b.order == BondOrder::Single;
      case BondOp::Double: return b.order == BondOrder::Double;
      case BondOp::Triple: return b.order == BondOrder::Triple;
      case BondOp::Aromatic: return b.order == BondOrder::Aromatic;
      case BondOp::Ring: return g_.bond_in_ring(bond_index);
      case BondOp::Default: return b.order == BondOrder::Single || b.order == BondOrder::Aromatic;
      case BondOp::Not: return !bond_matches(e.children[0], bond_index);
      case BondOp::And:
        return bond_matches(e.children[0], bond_index) && bond_matches(e.children[1], bond_index);
      case BondOp::Or:
        return bond_matches(e.children[0], bond_index) || bond_matches(e.children[1], bond_index);
    }
    return false;
  }

  bool atom_matches(const AtomExpr& e, std::size_t t) {
    const Atom& a = g_.atom(t);
    switch (e.op) {
      case AtomOp::True: return true;
      case AtomOp::AtomicNum: return a.atomic_number == e.value;
      case AtomOp::Aliphatic: return a.atomic_number == e.value && !a.aromatic;
      case AtomOp::Aromatic: return a.atomic_number == e.value && a.aromatic;
      case AtomOp::AnyAromatic: return a.aromatic;
      case AtomOp::AnyAliphatic: return !a.aromatic;
      case AtomOp::TotalH: return g_.total_h(t) == e.value;
      case AtomOp::InRing: return g_.atom_in_ring(t);
      case AtomOp::RingCount: return g_.atom_ring_count(t) == e.value;
      case AtomOp::Charge: return a.formal_charge == e.value;
      case AtomOp::Recursive: return recursive_matches(static_cast<std::size_t>(e.value), t);
      case AtomOp::Not: return !atom_matches(e.children[0], t);
      case AtomOp::And: return atom_matches(e.children[0], t) && atom_matches(e.children[1], t);
      case AtomOp::Or: return atom_matches(e.children[0], t) || atom_matches(e.children[1], t);
    }
    return false;
  }

  bool recursive_matches(std::size_t index, std::size_t t) {
    auto& cache = recursive_cache_[index];
    if (cache.empty()) cache.assign(g_.atom_count(), -1);
    if (cache[t] < 0) {
      Matcher inner(*q_.recursive[index], g_);
      bool found = false;
      inner.enumerate(t, [&](const std::vector<std::size_t>&) {
        found = true;
        return false;
      });
      cache[t] = found ? 1 : 0;
    }
    return cache[t] == 1;
  }

  const Query& q_;
  const MolecularGraph& g_;
  std::vector<std::size_t> mapping_;
  std::vector<bool> used_;
  std::vector<std::vector<int>> recursive_cache_;
  bool stop_ = false;
};

}  // namespace

SmartsPattern::SmartsPattern(std::unique_ptr<Query> query) : query_(std::move(query)) {}
SmartsPattern::SmartsPattern(SmartsPattern&&) noexcept = default;
SmartsPattern& SmartsPattern::operator=(SmartsPattern&&) noexcept = default;
SmartsPattern::~SmartsPattern() = default;

SmartsPattern SmartsPattern::compile(std::string_view smarts) {
  auto q = std::make_unique<Query>();
  q->source = std::string(smarts);
  SmartsParser(q->source, *q).run();
  return SmartsPattern(std::move(q));
}

const std::string& SmartsPattern::source() const { return query_->source; }

bool SmartsPattern::matches(const MolecularGraph& graph) const {
  if (graph.empty()) return false;
  Matcher m(*query_, graph);
  bool found = false;
  m.enumerate(std::nullopt, [&](const std::vector<std::size_t>&) {
    found = true;
    return false;
  });
  return found;
}

std::size_t SmartsPattern::count_unique(const MolecularGraph& graph, std::size_t limit) const {
  if (graph.empty()) return 0;
  Matcher m(*query_, graph);
  std::set<std::vector<std::size_t>> seen;
  m.enumerate(std::nullopt, [&](const std::vector<std::size_t>& mapping) {
    std::vector<std::size_t> key = mapping;
    std::sort(key.begin(), key.end());
    seen.insert(std::move(key));
    return seen.size() <= limit;
  });
  return seen.size();
}

}  // namespace adcnet::chem
