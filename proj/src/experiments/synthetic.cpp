#include "adcnet/experiments/synthetic.hpp"

#include <cmath>
#include <set>
#include <tuple>

#include "adcnet/error.hpp"
#include "adcnet/random.hpp"

namespace adcnet::experiments {

namespace {

constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";

std::string random_sequence(Rng& rng, std::size_t length) {
  std::string s(length, 'A');
  for (char& c : s) c = kAminoAcids[uniform_index(rng, kAminoAcids.size())];
  return s;
}

std::string linker_smiles(std::size_t i) {
  static constexpr std::string_view heads[] = {"O=C(O)CC", "NC(=O)CC", "O=C1CCC(=O)N1OC(=O)CC", "SCC"};
  std::string s(heads[i % 4]);
  for (std::size_t k = 0; k <= i / 4; ++k) s += "OCC";
  s += "NC(=O)C(C)N";
  return s;
}

std::string payload_smiles(std::size_t i) {
  static constexpr std::string_view cores[] = {"c1ccc2ncc(cc2c1)", "c1ccc(cc1)", "c1cnc(nc1)", "C1CCC(CC1)"};
  std::string s(cores[i % 4]);
  for (std::size_t k = 0; k <= i / 4; ++k) s += "C";
  s += "N(C)C(=O)O";
  return s;
}

}  // namespace

std::vector<curation::AdcRecord> generate_synthetic_corpus(const SyntheticConfig& config) {
  if (config.antibodies == 0 || config.linkers == 0 || config.payloads == 0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic pools must be non-empty");
  }
  Rng rng(derive_seed(config.seed, 0));
  struct Antibody {
    std::string heavy, light, antigen;
    double potency;
  };
  std::vector<Antibody> antibodies;
  for (std::size_t i = 0; i < config.antibodies; ++i) {
    Antibody a{random_sequence(rng, 120), random_sequence(rng, 110), random_sequence(rng, 180), normal01(rng)};
    antibodies.push_back(std::move(a));
  }
  std::vector<double> linker_potency, payload_potency;
  for (std::size_t i = 0; i < config.linkers; ++i) linker_potency.push_back(0.5 * normal01(rng));
  for (std::size_t i = 0; i < config.payloads; ++i) payload_potency.push_back(normal01(rng));

  std::vector<curation::AdcRecord> out;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, int>> seen;
  const std::size_t capacity = config.antibodies * config.linkers * config.payloads * 61;
  if (config.records > capacity) throw Error(ErrorCode::InvalidArgument, "synthetic pools too small for record count");
  while (out.size() < config.records) {
    const auto a = static_cast<std::size_t>(uniform_index(rng, config.antibodies));
    const auto l = static_cast<std::size_t>(uniform_index(rng, config.linkers));
    const auto p = static_cast<std::size_t>(uniform_index(rng, config.payloads));
    const int dar_tenths = 20 + static_cast<int>(uniform_index(rng, 61));  // 2.0 .. 8.0
    const double noise = config.noise * normal01(rng);
    if (!seen.insert({a, l, p, dar_tenths}).second) continue;
    const double dar = dar_tenths / 10.0;
    const double potency =
        antibodies[a].potency + linker_potency[l] + payload_potency[p] + 0.15 * (dar - 5.0) + noise;
    const double ic50_nm = std::pow(10.0, 2.0 - potency);

    curation::AdcRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "syn%04zu", out.size() + 1);
    r.id = id;
    r.heavy_chain = antibodies[a].heavy;
    r.light_chain = antibodies[a].light;
    r.antigen = antibodies[a].antigen;
    r.linker_smiles = linker_smiles(l);
    r.payload_smiles = payload_smiles(p);
    r.dar = dar;
    r.status = curation::ClinicalStatus::Investigational;
    curation::BioactivityMeasurement m;
    m.kind = curation::ActivityKind::IC50;
    if (out.size() % 3 == 0) {
      m.unit = curation::Unit::uM;
      m.value = ic50_nm / 1000.0;
    } else {
      m.unit = curation::Unit::nM;
      m.value = ic50_nm;
    }
    r.measurements.push_back(m);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<curation::LabeledAdc> shuffle_labels(std::vector<curation::LabeledAdc> records, std::uint64_t seed) {
  std::vector<std::pair<curation::Label, std::optional<double>>> labels;
  for (const auto& r : records) labels.emplace_back(r.label, r.activity_nm);
  Rng rng(derive_seed(seed, 0x5eed));
  shuffle(labels, rng);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].label = labels[i].first;
    records[i].activity_nm = labels[i].second;
  }
  return records;
}

}  // namespace adcnet::experiments
