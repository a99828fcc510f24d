#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "adcnet/embedding.hpp"
#include "adcnet/error.hpp"

using namespace adcnet;
using namespace adcnet::embedding;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

EmbeddingRecord protein(const std::string& content, double fill) {
  return {content_key(EmbeddingKind::Protein, content), EmbeddingKind::Protein,
          std::vector<double>(kProteinDim, fill)};
}

}  // namespace

TEST(ContentKey, Normalization) {
  EXPECT_EQ(content_key(EmbeddingKind::Protein, "acdef"), content_key(EmbeddingKind::Protein, "ACDEF"));
  EXPECT_EQ(content_key(EmbeddingKind::Protein, " AC DE\nF "), content_key(EmbeddingKind::Protein, "ACDEF"));
  EXPECT_NE(content_key(EmbeddingKind::Molecule, "CCO"), content_key(EmbeddingKind::Molecule, "OCC"));
  EXPECT_EQ(content_key(EmbeddingKind::Molecule, " CCO "), content_key(EmbeddingKind::Molecule, "CCO"));
  EXPECT_EQ(content_key(EmbeddingKind::Molecule, "CCO").size(), 64u);
  EXPECT_EQ(code_of([] { content_key(EmbeddingKind::Protein, "  "); }), ErrorCode::EmptyContent);
}

TEST(Store, LoadValidatesRecords) {
  std::istringstream empty("");
  EXPECT_TRUE(EmbeddingStore::parse(empty).empty());

  std::stringstream one;
  one << to_json_line(protein("ACDE", 0.25)) << '\n';
  const auto store = EmbeddingStore::parse(one);
  ASSERT_EQ(store.size(), 1u);
  EXPECT_DOUBLE_EQ(store.find(EmbeddingKind::Protein, "acde")->values[7], 0.25);

  EmbeddingRecord short_record = protein("ACDE", 0.0);
  short_record.values.resize(512);
  std::stringstream bad;
  bad << to_json_line(short_record) << '\n';
  EXPECT_EQ(code_of([&] { EmbeddingStore::parse(bad); }), ErrorCode::DimensionMismatch);

  std::istringstream garbage("{\"key\": 3}\n");
  EXPECT_EQ(code_of([&] { EmbeddingStore::parse(garbage); }), ErrorCode::FormatError);
}

TEST(Store, Duplicates) {
  std::stringstream same;
  same << to_json_line(protein("ACDE", 0.5)) << '\n' << to_json_line(protein("ACDE", 0.5)) << '\n';
  EXPECT_EQ(EmbeddingStore::parse(same).size(), 1u);
  std::stringstream conflict;
  conflict << to_json_line(protein("ACDE", 0.5)) << '\n' << to_json_line(protein("ACDE", 0.6)) << '\n';
  EXPECT_EQ(code_of([&] { EmbeddingStore::parse(conflict); }), ErrorCode::ConflictingDuplicate);
}

TEST(Store, SaveLoadRoundTrip) {
  EmbeddingStore store;
  auto r = protein("MKV", 0.0);
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = std::sin(0.1 * static_cast<double>(i)) / 3.0;
  store.add(r);
  store.add({content_key(EmbeddingKind::Molecule, "CCO"), EmbeddingKind::Molecule,
             fallback_featurizer(EmbeddingKind::Molecule, "CCO", kMoleculeDim)});
  store.manifest.protein_provider = "test";
  const std::string path = ::testing::TempDir() + "/store.jsonl";
  store.save(path);
  const auto loaded = EmbeddingStore::load(path);
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_EQ(*loaded.find(r.key), r);
  EXPECT_EQ(loaded.manifest.protein_provider, "test");
}

TEST(DarScaler, Examples) {
  const std::vector<double> train{2, 4, 6};
  const auto s = DarScaler::fit(train);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_NEAR(s.std, 1.63299, 1e-5);
  EXPECT_NEAR(s.scale(6), 1.0, 1e-12);
  EXPECT_NEAR(s.scale(4), 0.0, 1e-12);
  EXPECT_NEAR(s.scale(2), -1.0, 1e-12);
  const std::vector<double> flat{5, 5, 5};
  EXPECT_EQ(code_of([&] { DarScaler::fit(flat); }), ErrorCode::DegenerateColumn);
}

TEST(DarScaler, TrainingColumnInUnitRange) {
  const std::vector<double> train{1, 1, 2, 3.5, 8, 2, 4};
  const auto s = DarScaler::fit(train);
  double max_abs = 0.0;
  for (double v : train) {
    const double z = s.scale(v);
    EXPECT_LE(std::abs(z), 1.0 + 1e-12);
    max_abs = std::max(max_abs, std::abs(z));
  }
  EXPECT_NEAR(max_abs, 1.0, 1e-12);
}

TEST(Fuse, Dimensions) {
  EXPECT_EQ(fused_dim({}), 4353u);
  EXPECT_EQ(fused_dim({Component::Antigen}), 3073u);
  EXPECT_EQ(fused_dim(ComponentSet::parse("antibody")), 1793u);
  EXPECT_EQ(fused_dim({Component::Linker}), 4097u);
  EXPECT_EQ(fused_dim({Component::Payload}), 4097u);
  EXPECT_EQ(fused_dim({Component::Dar}), 4352u);
}

TEST(Fuse, SlicesReproduceInputs) {
  std::vector<double> linker(256), payload(256), heavy(1280), light(1280), antigen(1280);
  for (std::size_t i = 0; i < 256; ++i) {
    linker[i] = static_cast<double>(i);
    payload[i] = -static_cast<double>(i);
  }
  for (std::size_t i = 0; i < 1280; ++i) {
    heavy[i] = 1.0 + static_cast<double>(i);
    light[i] = 2.0 + static_cast<double>(i);
    antigen[i] = 3.0 + static_cast<double>(i);
  }
  const auto f = fuse({linker, payload, heavy, light, antigen, 0.5});
  ASSERT_EQ(f.x.size(), 4353u);
  const std::vector<double>* inputs[] = {&linker, &payload, &heavy, &light, &antigen};
  for (std::size_t k = 0; k < 5; ++k) {
    const Slice& s = f.layout[k];
    EXPECT_EQ(std::vector<double>(f.x.begin() + static_cast<long>(s.offset),
                                  f.x.begin() + static_cast<long>(s.offset + s.dim)),
              *inputs[k]);
  }
  EXPECT_EQ(f.layout.back().component, Component::Dar);
  EXPECT_DOUBLE_EQ(f.x.back(), 0.5);
  std::vector<double> wrong(100);
  EXPECT_EQ(code_of([&] { fuse({wrong, payload, heavy, light, antigen, 0.0}); }),
            ErrorCode::DimensionMismatch);
}

TEST(Fallback, DeterministicAndBounded) {
  EXPECT_EQ(fallback_featurizer(EmbeddingKind::Protein, "ACDE", 16),
            fallback_featurizer(EmbeddingKind::Protein, "acde", 16));
  const auto v = fallback_featurizer(EmbeddingKind::Molecule, "CCO", 4);
  ASSERT_EQ(v.size(), 4u);
  for (double x : v) {
    EXPECT_TRUE(std::isfinite(x));
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
  int differing = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = fallback_featurizer(EmbeddingKind::Molecule, "C" + std::to_string(i), 8);
    const auto b = fallback_featurizer(EmbeddingKind::Molecule, "N" + std::to_string(i), 8);
    differing += a != b;
  }
  EXPECT_EQ(differing, 1000);
  EXPECT_EQ(code_of([] { fallback_featurizer(EmbeddingKind::Molecule, "", 4); }), ErrorCode::EmptyContent);
}

TEST(Resolver, StoreProviderFallbackOrder) {
  EmbeddingStore store;
  store.add(protein("HEAVY", 0.1));
  FeatureResolver strict(&store, false);
  EXPECT_EQ(strict.resolve(Component::Heavy, "heavy").source, VectorSource::Store);
  try {
    strict.resolve(Component::Antigen, "ANTIGEN");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingEmbedding);
    EXPECT_NE(std::string(e.what()).find("antigen"), std::string::npos);
  }
  strict.set_provider(EmbeddingKind::Protein, [](EmbeddingKind, const std::string&) {
    return std::optional<std::vector<double>>(std::vector<double>(kProteinDim, 0.3));
  });
  EXPECT_EQ(strict.resolve(Component::Antigen, "ANTIGEN").source, VectorSource::Provider);
  FeatureResolver lenient(nullptr, true);
  EXPECT_EQ(lenient.resolve(Component::Linker, "CCO").source, VectorSource::Fallback);
}

TEST(Featurize, AblatedComponentsAreNotResolved) {
  FeatureResolver strict(nullptr, false);
  const std::vector<double> dars{1, 2, 3};
  const auto scaler = DarScaler::fit(dars);
  AdcInput input{"AAA", "CCC", "DDD", "CCO", "CCN", 2.0};
  EXPECT_EQ(code_of([&] { featurize(input, strict, scaler); }), ErrorCode::MissingEmbedding);
  ComponentSet everything_but_dar{Component::Linker, Component::Payload, Component::Heavy,
                                  Component::Light, Component::Antigen};
  const auto f = featurize(input, strict, scaler, everything_but_dar);
  ASSERT_EQ(f.feature.x.size(), 1u);
  EXPECT_DOUBLE_EQ(f.feature.x[0], 0.0);
}
