#include <gtest/gtest.h>

#include <functional>
#include <string>
#include <vector>

#include "adcnet/chem/descriptors.hpp"
#include "adcnet/chem/fingerprint.hpp"
#include "adcnet/chem/similarity.hpp"
#include "adcnet/chem/smarts.hpp"
#include "adcnet/chem/smiles.hpp"
#include "adcnet/error.hpp"

using namespace adcnet;
using namespace adcnet::chem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

bool key(const Fingerprint& fp, int k) { return fp.bits[static_cast<std::size_t>(k - 1)]; }

}  // namespace

TEST(Smiles, Ethanol) {
  const auto g = parse_smiles("CCO");
  ASSERT_EQ(g.atom_count(), 3u);
  EXPECT_EQ(g.bond_count(), 2u);
  EXPECT_EQ(g.total_h(0), 3);
  EXPECT_EQ(g.total_h(1), 2);
  EXPECT_EQ(g.total_h(2), 1);
  for (const auto& b : g.bonds()) EXPECT_EQ(b.order, BondOrder::Single);
}

TEST(Smiles, Benzene) {
  const auto g = parse_smiles("c1ccccc1");
  ASSERT_EQ(g.atom_count(), 6u);
  for (const auto& a : g.atoms()) EXPECT_TRUE(a.aromatic);
  for (const auto& b : g.bonds()) EXPECT_EQ(b.order, BondOrder::Aromatic);
  ASSERT_EQ(g.rings().size(), 1u);
  EXPECT_EQ(g.rings()[0].size(), 6u);
  EXPECT_EQ(g.total_h(0), 1);
}

TEST(Smiles, UnmatchedRingClosure) {
  try {
    parse_smiles("C1CC");
    FAIL();
  } catch (const SmilesParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.reason(), "unmatched ring-closure 1");
    EXPECT_EQ(e.offset(), 1u);
  }
}

TEST(Smiles, ErrorsCarryOffsets) {
  auto offset_of = [](const char* s) -> long {
    try {
      parse_smiles(s);
    } catch (const SmilesParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  EXPECT_EQ(offset_of("CC(C"), 2);
  EXPECT_EQ(offset_of("CC)C"), 2);
  EXPECT_EQ(offset_of("CXC"), 1);
  EXPECT_EQ(offset_of("C(C)(C)(C)(C)C"), 0);
  EXPECT_GE(offset_of("[Zz]"), 0);
  EXPECT_EQ(offset_of(""), 0);
}

TEST(Smiles, BracketAtoms) {
  const auto g = parse_smiles("[13CH3][C@@H](N)C(=O)[O-]");
  EXPECT_EQ(*g.atom(0).isotope, 13);
  EXPECT_EQ(g.atom(0).explicit_h, 3);
  EXPECT_EQ(*g.atom(1).chirality, Chirality::CW);
  EXPECT_EQ(g.atom(5).formal_charge, -1);
  EXPECT_EQ(g.total_h(2), 2);
}

TEST(Smiles, RingClosurePercentAndFragments) {
  const auto g = parse_smiles("C%10CCCCC%10.[Na+]");
  EXPECT_EQ(g.atom_count(), 7u);
  EXPECT_EQ(g.fragment_count(), 2u);
  EXPECT_EQ(g.rings().size(), 1u);
}

TEST(Smiles, CisTrans) {
  const auto trans = parse_smiles("F/C=C/F");
  const auto cis = parse_smiles("F/C=C\\F");
  auto stereo = [](const MolecularGraph& g) {
    for (const auto& b : g.bonds())
      if (b.order == BondOrder::Double) return *b.stereo;
    return BondStereo::Up;
  };
  EXPECT_EQ(stereo(trans), BondStereo::Trans);
  EXPECT_EQ(stereo(cis), BondStereo::Cis);
}

TEST(Smiles, ValenceViolation) {
  EXPECT_EQ(code_of([] { parse_smiles("C(C)(C)(C)(C)C"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_smiles("O=O=O"); }), ErrorCode::ParseError);
}

TEST(Smiles, FusedRingsSssr) {
  const auto naphthalene = parse_smiles("c1ccc2ccccc2c1");
  EXPECT_EQ(naphthalene.rings().size(), 2u);
  const auto cubane = parse_smiles("C12C3C4C1C5C2C3C45");
  EXPECT_EQ(cubane.rings().size(), 5u);
}

TEST(Smiles, BiarylLinkIsSingle) {
  const auto g = parse_smiles("c1ccccc1c1ccccc1");
  const auto b = g.bond_between(5, 6);
  ASSERT_TRUE(b);
  EXPECT_EQ(g.bond(*b).order, BondOrder::Single);
}

TEST(Smarts, CountsUniqueAtomSets) {
  const auto g = parse_smiles("OCC(O)CO");
  EXPECT_EQ(SmartsPattern::compile("[#8]").count_unique(g, 10), 3u);
  EXPECT_TRUE(SmartsPattern::compile("[#8]~*~*~[#8]").matches(g));
  EXPECT_FALSE(SmartsPattern::compile("[#7]").matches(g));
  EXPECT_TRUE(SmartsPattern::compile("[$([CH2]~[OH])]").matches(g));
}

TEST(Smarts, RingPatterns) {
  const auto g = parse_smiles("C1CCCCC1C");
  EXPECT_TRUE(SmartsPattern::compile("*1~*~*~*~*~*~1").matches(g));
  EXPECT_FALSE(SmartsPattern::compile("*1~*~*~*~*~1").matches(g));
  EXPECT_TRUE(SmartsPattern::compile("*@*!@*").matches(g));
}

TEST(Morgan, MethaneHasOneEnvironment) {
  EXPECT_EQ(morgan_fingerprint(parse_smiles("C")).popcount(), 1u);
}

TEST(Morgan, AtomOrderDoesNotMatter) {
  EXPECT_EQ(morgan_fingerprint(parse_smiles("CCO")), morgan_fingerprint(parse_smiles("OCC")));
  EXPECT_EQ(ecfp4_fingerprint(parse_smiles("c1ccncc1O")),
            ecfp4_fingerprint(parse_smiles("Oc1cnccc1")));
}

TEST(Morgan, WidthsAndKinds) {
  const auto g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  EXPECT_EQ(morgan_fingerprint(g).size(), 1024u);
  EXPECT_EQ(ecfp4_fingerprint(g).kind, FingerprintKind::Ecfp4_2048);
  EXPECT_EQ(code_of([&] { morgan_fingerprint(g, 2, 512); }), ErrorCode::InvalidArgument);
}

TEST(Maccs, AlkaneHasNoRingKeys) {
  const auto fp = maccs_fingerprint(parse_smiles("CCCC"));
  for (int k : {8, 11, 16, 19, 22, 36, 57, 62, 65, 83, 96, 98, 101, 105, 120, 121, 125, 137, 145,
                163, 165}) {
    EXPECT_FALSE(key(fp, k)) << k;
  }
  EXPECT_TRUE(key(fp, 160));
  EXPECT_TRUE(key(fp, 149));
}

TEST(Maccs, Benzene) {
  const auto fp = maccs_fingerprint(parse_smiles("c1ccccc1"));
  EXPECT_TRUE(key(fp, 162));
  EXPECT_TRUE(key(fp, 163));
  EXPECT_TRUE(key(fp, 165));
  for (int k : {161, 142, 121, 65, 94, 125}) EXPECT_FALSE(key(fp, k)) << k;
  EXPECT_EQ(fp.popcount(), 3u);
}

TEST(Maccs, CountKeysAndSpecials) {
  const auto fp = maccs_fingerprint(parse_smiles("OCC(O)C(O)CO.c1ccc2ccccc2c1"));
  EXPECT_TRUE(key(fp, 164));
  EXPECT_TRUE(key(fp, 159));
  EXPECT_TRUE(key(fp, 146));
  EXPECT_TRUE(key(fp, 140));
  EXPECT_TRUE(key(fp, 125));
  EXPECT_TRUE(key(fp, 166));
  EXPECT_TRUE(key(fp, 139));
}

TEST(Tanimoto, Examples) {
  Fingerprint a{FingerprintKind::Maccs166, std::vector<bool>(166, false)};
  Fingerprint b = a;
  a.bits[1] = a.bits[2] = a.bits[3] = true;
  b.bits[2] = b.bits[3] = b.bits[4] = true;
  EXPECT_DOUBLE_EQ(tanimoto(a, b), 0.5);
  EXPECT_DOUBLE_EQ(tanimoto(a, a), 1.0);
  Fingerprint c{FingerprintKind::Maccs166, std::vector<bool>(166, false)};
  c.bits[100] = true;
  EXPECT_DOUBLE_EQ(tanimoto(a, c), 0.0);
  Fingerprint empty{FingerprintKind::Maccs166, std::vector<bool>(166, false)};
  EXPECT_DOUBLE_EQ(tanimoto(empty, empty), 1.0);
  const auto m = morgan_fingerprint(parse_smiles("CCO"));
  EXPECT_EQ(code_of([&] { tanimoto(a, m); }), ErrorCode::KindMismatch);
}

TEST(Fingerprint, HexRoundTrip) {
  const auto fp = maccs_fingerprint(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"));
  const auto hex = fp.to_hex();
  EXPECT_EQ(hex.size(), 42u);
  EXPECT_EQ(Fingerprint::from_hex(fp.kind, hex), fp);
  Fingerprint one{FingerprintKind::Maccs166, std::vector<bool>(166, false)};
  one.bits[0] = true;
  one.bits[9] = true;
  EXPECT_EQ(one.to_hex().substr(0, 4), "0102");
}

TEST(Descriptors, MolecularWeight) {
  EXPECT_NEAR(molecular_weight(parse_smiles("O")), 18.02, 0.01);
  EXPECT_NEAR(molecular_weight(parse_smiles("C")), 16.04, 0.01);
  EXPECT_NEAR(molecular_weight(parse_smiles("CCO.O")),
              molecular_weight(parse_smiles("CCO")) + molecular_weight(parse_smiles("O")), 1e-9);
  EXPECT_NEAR(molecular_weight(parse_smiles("[2H]O[2H]")), 20.03, 0.01);
}

TEST(Descriptors, MurckoScaffold) {
  EXPECT_TRUE(murcko_scaffold(parse_smiles("CCCC")).empty());
  const auto eb = murcko_scaffold(parse_smiles("CCc1ccccc1"));
  EXPECT_EQ(eb.atom_count(), 6u);
  EXPECT_EQ(eb, parse_smiles("c1ccccc1"));
  const auto bibenzyl = murcko_scaffold(parse_smiles("c1ccccc1CCc1ccccc1"));
  EXPECT_EQ(bibenzyl.atom_count(), 14u);
  EXPECT_EQ(murcko_scaffold(bibenzyl), bibenzyl);
}

TEST(Similarity, HarmonicMean) {
  const std::vector<double> same{0.4, 0.4, 0.4};
  EXPECT_NEAR(harmonic_mean_similarity(same), 0.4, 1e-12);
  const std::vector<double> two{0.5, 1.0};
  EXPECT_NEAR(harmonic_mean_similarity(two), 2.0 / 3.0, 1e-4);
  const std::vector<double> zero{0.0, 1.0};
  EXPECT_EQ(code_of([&] { harmonic_mean_similarity(zero); }), ErrorCode::NonPositiveScore);
  EXPECT_EQ(code_of([] { harmonic_mean_similarity({}); }), ErrorCode::EmptyList);
}

TEST(Similarity, SequenceIdentity) {
  EXPECT_DOUBLE_EQ(sequence_identity("EVQLVES", "EVQLVES"), 1.0);
  EXPECT_DOUBLE_EQ(sequence_identity("AAAA", "AATA"), 0.75);
  EXPECT_DOUBLE_EQ(sequence_identity("A", "G"), 0.0);
  EXPECT_DOUBLE_EQ(sequence_identity("ACDE", "AC"), sequence_identity("AC", "ACDE"));
  EXPECT_EQ(code_of([] { sequence_identity("", "A"); }), ErrorCode::EmptySequence);
}
