#pragma once

// A tiny trained-shape model plus a store covering one known conjugate.

#include <string>

#include "adcnet/embedding.hpp"
#include "adcnet/model/checkpoint.hpp"
#include "adcnet/service/predictor.hpp"

namespace adcnet::fixture {

inline service::PredictRequest known_request() {
  return {"EVQLVESGGGLVQPGGSLRLSCAASGFNIKDTYIHWVRQAPGKGLEWVARIYPTNGYTRYADSVKG",
          "DIQMTQSPSSLSASVGDRVTITCRASQDVNTAVAWYQQKPGKAPKLLIYSASFLYSGVPS",
          "TQVCTGTDMKLRLPASPETHLDMLRHLYQGCQVVQGNLELTYLPTNASLSFLQDIQEVQGYVLIAHNQVRQVPLQRLRIVRG",
          "O=C(NCCCCC(N)C(=O)O)CCCN1C(=O)C=CC1=O",
          "COc1ccc2c(c1)C(=O)N(C)CC2",
          4.0};
}

inline embedding::EmbeddingStore known_store(bool with_antigen = true) {
  using embedding::EmbeddingKind;
  const auto r = known_request();
  embedding::EmbeddingStore store;
  auto add = [&](EmbeddingKind kind, const std::string& content) {
    // Arbitrary but fixed values; the salt keeps them distinct from the fallback featurizer.
    auto values = embedding::fallback_featurizer(kind, content + "#stored", embedding::expected_dim(kind));
    store.add({embedding::content_key(kind, content), kind, values});
  };
  add(EmbeddingKind::Protein, r.heavy_chain);
  add(EmbeddingKind::Protein, r.light_chain);
  if (with_antigen) add(EmbeddingKind::Protein, r.antigen);
  add(EmbeddingKind::Molecule, r.linker_smiles);
  add(EmbeddingKind::Molecule, r.payload_smiles);
  return store;
}

inline model::Checkpoint small_checkpoint(std::uint64_t seed = 3) {
  model::Checkpoint c;
  c.model = model::MlpClassifier::initialize(embedding::fused_dim({}), 16, seed);
  c.config.hidden_dim = 16;
  c.layout = embedding::fused_layout({});
  const double dars[] = {2.0, 3.5, 4.0, 8.0};
  c.scaler = embedding::DarScaler::fit(dars);
  c.model_name = "ADCNet";
  c.trained_at = "2024-01-01T00:00:00Z";
  c.metrics["AUC"] = 0.9;
  return c;
}

}  // namespace adcnet::fixture
