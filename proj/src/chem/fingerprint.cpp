#include "adcnet/chem/fingerprint.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "adcnet/chem/smarts.hpp"
#include "adcnet/error.hpp"
#include "adcnet/random.hpp"

namespace adcnet::chem {
namespace {

std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

int bond_code(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 4;
  }
  return 0;
}

using BondSet = std::vector<std::uint64_t>;

void set_bit(BondSet& s, std::size_t i) { s[i / 64] |= std::uint64_t{1} << (i % 64); }

// key, SMARTS, count threshold (bit set when unique matches exceed it).
struct KeyDef {
  int key;
  const char* smarts;
  int count;
};

// Keys 1 (isotope), 101 (8+ ring), 125 (aromatic rings) and 166 (fragments)
// are computed directly.
constexpr KeyDef kKeys[] = {
    {2, "[#104]", 0},
    {3, "[#32,#33,#34,#50,#51,#52,#82,#83,#84]", 0},
    {4, "[Ac,Th,Pa,U,Np,Pu,Am,Cm,Bk,Cf,Es,Fm,Md,No,Lr]", 0},
    {5, "[Sc,Ti,Y,Zr,Hf]", 0},
    {6, "[La,Ce,Pr,Nd,Pm,Sm,Eu,Gd,Tb,Dy,Ho,Er,Tm,Yb,Lu]", 0},
    {7, "[V,Cr,Mn,Nb,Mo,Tc,Ta,W,Re]", 0},
    {8, "[!#6;!#1]1~*~*~*~1", 0},
    {9, "[Fe,Co,Ni,Ru,Rh,Pd,Os,Ir,Pt]", 0},
    {10, "[Be,Mg,Ca,Sr,Ba,Ra]", 0},
    {11, "*1~*~*~*~1", 0},
    {12, "[Cu,Zn,Ag,Cd,Au,Hg]", 0},
    {13, "[#8]~[#7](~[#6])~[#6]", 0},
    {14, "[#16]-[#16]", 0},
    {15, "[#8]~[#6](~[#8])~[#8]", 0},
    {16, "[!#6;!#1]1~*~*~1", 0},
    {17, "[#6]#[#6]", 0},
    {18, "[#5,#13,#31,#49,#81]", 0},
    {19, "*1~*~*~*~*~*~*~1", 0},
    {20, "[#14]", 0},
    {21, "[#6]=[#6](~[!#6;!#1])~[!#6;!#1]", 0},
    {22, "*1~*~*~1", 0},
    {23, "[#7]~[#6](~[#8])~[#8]", 0},
    {24, "[#7]-[#8]", 0},
    {25, "[#7]~[#6](~[#7])~[#7]", 0},
    {26, "[#6]=;@[#6](@*)@*", 0},
    {27, "[I]", 0},
    {28, "[!#6;!#1]~[CH2]~[!#6;!#1]", 0},
    {29, "[#15]", 0},
    {30, "[#6]~[!#6;!#1](~[#6])(~[#6])~*", 0},
    {31, "[!#6;!#1]~[F,Cl,Br,I]", 0},
    {32, "[#6]~[#16]~[#7]", 0},
    {33, "[#7]~[#16]", 0},
    {34, "[CH2]=*", 0},
    {35, "[Li,Na,K,Rb,Cs,Fr]", 0},
    {36, "[#16R]", 0},
    {37, "[#7]~[#6](~[#8])~[#7]", 0},
    {38, "[#7]~[#6](~[#6])~[#7]", 0},
    {39, "[#8]~[#16](~[#8])~[#8]", 0},
    {40, "[#16]-[#8]", 0},
    {41, "[#6]#[#7]", 0},
    {42, "F", 0},
    {43, "[!#6;!#1;!H0]~*~[!#6;!#1;!H0]", 0},
    {44, "[!#1;!#6;!#7;!#8;!#9;!#14;!#15;!#16;!#17;!#35;!#53]", 0},
    {45, "[#6]=[#6]~[#7]", 0},
    {46, "Br", 0},
    {47, "[#16]~*~[#7]", 0},
    {48, "[#8]~[!#6;!#1](~[#8])(~[#8])", 0},
    {49, "[!+0]", 0},
    {50, "[#6]=[#6](~[#6])~[#6]", 0},
    {51, "[#6]~[#16]~[#8]", 0},
    {52, "[#7]~[#7]", 0},
    {53, "[!#6;!#1;!H0]~*~*~*~[!#6;!#1;!H0]", 0},
    {54, "[!#6;!#1;!H0]~*~*~[!#6;!#1;!H0]", 0},
    {55, "[#8]~[#16]~[#8]", 0},
    {56, "[#8]~[#7](~[#8])~[#6]", 0},
    {57, "[#8R]", 0},
    {58, "[!#6;!#1]~[#16]~[!#6;!#1]", 0},
    {59, "[#16]!:*:*", 0},
    {60, "[#16]=[#8]", 0},
    {61, "*~[#16](~*)~*", 0},
    {62, "*@*!@*@*", 0},
    {63, "[#7]=[#8]", 0},
    {64, "*@*!@[#16]", 0},
    {65, "c:n", 0},
    {66, "[#6]~[#6](~[#6])(~[#6])~*", 0},
    {67, "[!#6;!#1]~[#16]", 0},
    {68, "[!#6;!#1;!H0]~[!#6;!#1;!H0]", 0},
    {69, "[!#6;!#1]~[!#6;!#1;!H0]", 0},
    {70, "[!#6;!#1]~[#7]~[!#6;!#1]", 0},
    {71, "[#7]~[#8]", 0},
    {72, "[#8]~*~*~[#8]", 0},
    {73, "[#16]=*", 0},
    {74, "[CH3]~*~[CH3]", 0},
    {75, "*!@[#7]@*", 0},
    {76, "[#6]=[#6](~*)~*", 0},
    {77, "[#7]~*~[#7]", 0},
    {78, "[#6]=[#7]", 0},
    {79, "[#7]~*~*~[#7]", 0},
    {80, "[#7]~*~*~*~[#7]", 0},
    {81, "[#16]~*(~*)~*", 0},
    {82, "*~[CH2]~[!#6;!#1;!H0]", 0},
    {83, "[!#6;!#1]1~*~*~*~*~1", 0},
    {84, "[NH2]", 0},
    {85, "[#6]~[#7](~[#6])~[#6]", 0},
    {86, "[C;H2,H3][!#6;!#1][C;H2,H3]", 0},
    {87, "[F,Cl,Br,I]!@*@*", 0},
    {88, "[#16]", 0},
    {89, "[#8]~*~*~*~[#8]", 0},
    {90,
     "[$([!#6;!#1;!H0]~*~*~[CH2]~*),$([!#6;!#1;!H0;R]1@[R]@[R]@[CH2;R]1),"
     "$([!#6;!#1;!H0]~[R]1@[R]@[CH2;R]1)]",
     0},
    {91,
     "[$([!#6;!#1;!H0]~*~*~*~[CH2]~*),$([!#6;!#1;!H0;R]1@[R]@[R]@[R]@[CH2;R]1),"
     "$([!#6;!#1;!H0]~[R]1@[R]@[R]@[CH2;R]1),$([!#6;!#1;!H0]~*~[R]1@[R]@[CH2;R]1)]",
     0},
    {92, "[#8]~[#6](~[#7])~[#6]", 0},
    {93, "[!#6;!#1]~[CH3]", 0},
    {94, "[!#6;!#1]~[#7]", 0},
    {95, "[#7]~*~*~[#8]", 0},
    {96, "*1~*~*~*~*~1", 0},
    {97, "[#7]~*~*~*~[#8]", 0},
    {98, "[!#6;!#1]1~*~*~*~*~*~1", 0},
    {99, "[#6]=[#6]", 0},
    {100, "*~[CH2]~[#7]", 0},
    {102, "[!#6;!#1]~[#8]", 0},
    {103, "Cl", 0},
    {104, "[!#6;!#1;!H0]~*~[CH2]~*", 0},
    {105, "*@*(@*)@*", 0},
    {106, "[!#6;!#1]~*(~[!#6;!#1])~[!#6;!#1]", 0},
    {107, "[F,Cl,Br,I]~*(~*)~*", 0},
    {108, "[CH3]~*~*~*~[CH2]~*", 0},
    {109, "*~[CH2]~[#8]", 0},
    {110, "[#7]~[#6]~[#8]", 0},
    {111, "[#7]~*~[CH2]~*", 0},
    {112, "*~*(~*)(~*)~*", 0},
    {113, "[#8]!:*:*", 0},
    {114, "[CH3]~[CH2]~*", 0},
    {115, "[CH3]~*~[CH2]~*", 0},
    {116, "[$([CH3]~*~*~[CH2]~*),$([CH3]~*1~*~[CH2]1)]", 0},
    {117, "[#7]~*~[#8]", 0},
    {118, "[$(*~[CH2]~[CH2]~*),$(*1~[CH2]~[CH2]1)]", 1},
    {119, "[#7]=*", 0},
    {120, "[!#6;R]", 1},
    {121, "[#7;R]", 0},
    {122, "*~[#7](~*)~*", 0},
    {123, "[#8]~[#6]~[#8]", 0},
    {124, "[!#6;!#1]~[!#6;!#1]", 0},
    {126, "*!@[#8]!@*", 0},
    {127, "*@*!@[#8]", 1},
    {128,
     "[$(*~[CH2]~*~*~*~[CH2]~*),$([R]1@[CH2;R]@[R]@[R]@[R]@[CH2;R]1),"
     "$(*~[CH2]~[R]1@[R]@[R]@[CH2;R]1),$(*~[CH2]~*~[R]1@[R]@[CH2;R]1)]",
     0},
    {129,
     "[$(*~[CH2]~*~*~[CH2]~*),$([R]1@[CH2]@[R]@[R]@[CH2;R]1),$(*~[CH2]~[R]1@[R]@[CH2;R]1)]", 0},
    {130, "[!#6;!#1]~[!#6;!#1]", 1},
    {131, "[!#6;!#1;!H0]", 1},
    {132, "[#8]~*~[CH2]~*", 0},
    {133, "*@*!@[#7]", 0},
    {134, "[F,Cl,Br,I]", 0},
    {135, "[#7]!:*:*", 0},
    {136, "[#8]=*", 1},
    {137, "[!C;!c;R]", 0},
    {138, "[!#6;!#1]~[CH2]~*", 1},
    {139, "[O;!H0]", 0},
    {140, "[#8]", 3},
    {141, "[CH3]", 2},
    {142, "[#7]", 1},
    {143, "*@*!@[#8]", 0},
    {144, "*!:*:*!:*", 0},
    {145, "*1~*~*~*~*~*~1", 1},
    {146, "[#8]", 2},
    {147, "[$(*~[CH2]~[CH2]~*),$([R]1@[CH2;R]@[CH2;R]1)]", 0},
    {148, "*~[!#6;!#1](~*)~*", 0},
    {149, "[C;H3,H4]", 1},
    {150, "*!@*@*!@*", 0},
    {151, "[#7;!H0]", 0},
    {152, "[#8]~[#6](~[#6])~[#6]", 0},
    {153, "[!#6;!#1]~[CH2]~*", 0},
    {154, "[#6]=[#8]", 0},
    {155, "*!@[CH2]!@*", 0},
    {156, "[#7]~*(~*)~*", 0},
    {157, "[#6]-[#8]", 0},
    {158, "[#6]-[#7]", 0},
    {159, "[#8]", 1},
    {160, "[C;H3,H4]", 0},
    {161, "[#7]", 0},
    {162, "a", 0},
    {163, "*1~*~*~*~*~*~1", 0},
    {164, "[#8]", 0},
    {165, "[R]", 0},
};

struct CompiledKey {
  int key;
  int count;
  SmartsPattern pattern;
};

const std::vector<CompiledKey>& compiled_keys() {
  static const std::vector<CompiledKey> keys = [] {
    std::vector<CompiledKey> out;
    for (const auto& def : kKeys) {
      out.push_back({def.key, def.count, SmartsPattern::compile(def.smarts)});
    }
    return out;
  }();
  return keys;
}

}  // namespace

std::string_view to_string(FingerprintKind kind) {
  switch (kind) {
    case FingerprintKind::Maccs166: return "Maccs166";
    case FingerprintKind::Morgan1024: return "Morgan1024";
    case FingerprintKind::Ecfp4_2048: return "Ecfp4_2048";
  }
  return "?";
}

FingerprintKind fingerprint_kind_from_string(std::string_view name) {
  if (name == "maccs" || name == "Maccs166") return FingerprintKind::Maccs166;
  if (name == "morgan" || name == "Morgan1024") return FingerprintKind::Morgan1024;
  if (name == "ecfp4" || name == "Ecfp4_2048") return FingerprintKind::Ecfp4_2048;
  throw Error(ErrorCode::InvalidArgument, "unknown fingerprint kind '" + std::string(name) + "'");
}

std::size_t fingerprint_length(FingerprintKind kind) {
  switch (kind) {
    case FingerprintKind::Maccs166: return 166;
    case FingerprintKind::Morgan1024: return 1024;
    case FingerprintKind::Ecfp4_2048: return 2048;
  }
  return 0;
}

std::size_t Fingerprint::popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

std::vector<std::size_t> Fingerprint::on_bits() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.push_back(i);
  return out;
}

std::string Fingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  const std::size_t nbytes = (bits.size() + 7) / 8;
  out.reserve(nbytes * 2);
  for (std::size_t byte = 0; byte < nbytes; ++byte) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t i = byte * 8 + k;
      if (i < bits.size() && bits[i]) v |= 1u << k;
    }
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 15]);
  }
  return out;
}

Fingerprint Fingerprint::from_hex(FingerprintKind kind, std::string_view hex) {
  const std::size_t n = fingerprint_length(kind);
  if (hex.size() != (n + 7) / 8 * 2) {
    throw Error(ErrorCode::FormatError, "hex fingerprint has wrong length");
  }
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw Error(ErrorCode::FormatError, "invalid hex digit");
  };
  Fingerprint fp{kind, std::vector<bool>(n, false)};
  for (std::size_t byte = 0; byte < hex.size() / 2; ++byte) {
    const unsigned v = nibble(hex[2 * byte]) << 4 | nibble(hex[2 * byte + 1]);
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t i = byte * 8 + k;
      if (v & (1u << k)) {
        if (i >= n) throw Error(ErrorCode::FormatError, "padding bits set in hex fingerprint");
        fp.bits[i] = true;
      }
    }
  }
  return fp;
}

Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius, std::size_t nbits) {
  FingerprintKind kind;
  if (nbits == 1024) {
    kind = FingerprintKind::Morgan1024;
  } else if (nbits == 2048) {
    kind = FingerprintKind::Ecfp4_2048;
  } else {
    throw Error(ErrorCode::InvalidArgument, "morgan fingerprint width must be 1024 or 2048");
  }
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "negative radius");
  Fingerprint fp{kind, std::vector<bool>(nbits, false)};

  const std::size_t n = g.atom_count();
  const std::size_t words = (g.bond_count() + 63) / 64;
  std::vector<bool> heavy(n);
  for (std::size_t i = 0; i < n; ++i) heavy[i] = g.atom(i).atomic_number != 1;

  std::vector<std::uint64_t> ids(n, 0);
  std::vector<BondSet> env(n, BondSet(words, 0));
  std::vector<bool> active(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!heavy[i]) continue;
    const Atom& a = g.atom(i);
    std::uint64_t h = 0x5ca1ab1eULL;
    h = combine(h, static_cast<std::uint64_t>(a.atomic_number));
    h = combine(h, g.heavy_degree(i));
    h = combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(a.formal_charge)));
    h = combine(h, static_cast<std::uint64_t>(g.total_h(i)));
    h = combine(h, g.atom_in_ring(i) ? 1 : 0);
    ids[i] = h;
    active[i] = true;
    fp.bits[h % nbits] = true;
  }

  std::set<BondSet> seen_envs;
  for (int layer = 1; layer <= radius; ++layer) {
    std::vector<std::uint64_t> next_ids(n, 0);
    std::vector<BondSet> next_env(n);
    // (environment, id, atom) candidates for this layer.
    std::vector<std::tuple<BondSet, std::uint64_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      std::vector<std::pair<int, std::uint64_t>> around;
      BondSet e = env[i];
      for (const auto& nb : g.neighbors(i)) {
        if (!heavy[nb.atom]) continue;
        around.emplace_back(bond_code(g.bond(nb.bond).order), ids[nb.atom]);
        set_bit(e, nb.bond);
        for (std::size_t w = 0; w < words; ++w) e[w] |= env[nb.atom][w];
      }
      std::sort(around.begin(), around.end());
      std::uint64_t h = combine(static_cast<std::uint64_t>(layer), ids[i]);
      for (const auto& [code, id] : around) {
        h = combine(h, static_cast<std::uint64_t>(code));
        h = combine(h, id);
      }
      next_ids[i] = h;
      if (e == env[i]) {
        // The neighborhood stopped growing; later layers add nothing new.
        active[i] = false;
        continue;
      }
      next_env[i] = e;
      candidates.emplace_back(e, h, i);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [e, h, atom] : candidates) {
      if (!seen_envs.insert(e).second) continue;
      fp.bits[h % nbits] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      ids[i] = next_ids[i];
      env[i] = std::move(next_env[i]);
    }
  }
  return fp;
}

Fingerprint ecfp4_fingerprint(const MolecularGraph& g) { return morgan_fingerprint(g, 2, 2048); }

Fingerprint maccs_fingerprint(const MolecularGraph& g) {
  Fingerprint fp{FingerprintKind::Maccs166, std::vector<bool>(166, false)};
  auto set_key = [&](int key) { fp.bits[static_cast<std::size_t>(key - 1)] = true; };
  for (const auto& k : compiled_keys()) {
    const bool hit = k.count == 0
                         ? k.pattern.matches(g)
                         : k.pattern.count_unique(g, static_cast<std::size_t>(k.count)) >
                               static_cast<std::size_t>(k.count);
    if (hit) set_key(k.key);
  }
  std::size_t aromatic_rings = 0;
  for (const auto& ring : g.rings()) {
    if (ring.size() >= 8) set_key(101);
    if (std::all_of(ring.begin(), ring.end(), [&](std::size_t a) { return g.atom(a).aromatic; })) {
      ++aromatic_rings;
    }
  }
  if (aromatic_rings > 1) set_key(125);
  if (g.fragment_count() > 1) set_key(166);
  return fp;
}

Fingerprint fingerprint(const MolecularGraph& g, FingerprintKind kind) {
  switch (kind) {
    case FingerprintKind::Maccs166: return maccs_fingerprint(g);
    case FingerprintKind::Morgan1024: return morgan_fingerprint(g, 2, 1024);
    case FingerprintKind::Ecfp4_2048: return ecfp4_fingerprint(g);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown fingerprint kind");
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.kind != b.kind || a.bits.size() != b.bits.size()) {
    throw Error(ErrorCode::KindMismatch, "tanimoto between fingerprints of different kinds");
  }
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    both += a.bits[i] && b.bits[i];
    either += a.bits[i] || b.bits[i];
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace adcnet::chem
