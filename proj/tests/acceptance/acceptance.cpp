// Acceptance checks. Each prints one PASS or FAIL line with its wall time and
// fails when the check is wrong or slower than its limit. The exit status is
// nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../support/service_fixture.hpp"
#include "adcnet/chem/descriptors.hpp"
#include "adcnet/chem/fingerprint.hpp"
#include "adcnet/chem/similarity.hpp"
#include "adcnet/chem/smiles.hpp"
#include "adcnet/csv.hpp"
#include "adcnet/curation.hpp"
#include "adcnet/embedding.hpp"
#include "adcnet/experiments/runner.hpp"
#include "adcnet/experiments/synthetic.hpp"
#include "adcnet/metrics.hpp"
#include "adcnet/model/checkpoint.hpp"
#include "adcnet/model/train.hpp"
#include "adcnet/random.hpp"
#include "adcnet/service/server.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace adcnet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// A check returns a short summary on success and throws Failure otherwise.
struct Failure {
  std::string reason;
};

[[noreturn]] void fail(const std::string& reason) { throw Failure{reason}; }

void require(bool ok, const std::string& reason) {
  if (!ok) fail(reason);
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- metrics

std::optional<double> frac(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string check_metric_oracle() {
  Rng rng(20240101);
  std::size_t degenerate = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Per-sample arrays; some regimes force a single label or prediction class.
    const std::size_t n = 1 + uniform_index(rng, 60);
    const int regime = static_cast<int>(uniform_index(rng, 10));
    std::vector<int> labels(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = regime == 1 ? 1 : regime == 2 ? 0 : static_cast<int>(uniform_index(rng, 2));
      predicted[i] = regime == 3 ? 1 : regime == 4 ? 0 : static_cast<int>(uniform_index(rng, 2));
    }
    shuffle(predicted, rng);

    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == 1 && predicted[i] == 1) ++tp;
      if (labels[i] == 0 && predicted[i] == 1) ++fp;
      if (labels[i] == 0 && predicted[i] == 0) ++tn;
      if (labels[i] == 1 && predicted[i] == 0) ++fn;
    }
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = predicted[i] ? 0.75 : 0.25;
    const auto counts = metrics::confusion(scores, labels);
    require(counts.tp == tp && counts.fp == fp && counts.tn == tn && counts.fn == fn,
            "confusion counts differ in trial " + std::to_string(trial));

    metrics::MetricReport want;
    want.ppv = frac(tp, tp + fp);
    want.npv = frac(tn, tn + fn);
    want.se = frac(tp, tp + fn);
    want.sp = frac(tn, tn + fp);
    want.acc = frac(tp + tn, tp + tn + fp + fn);
    want.f1 = frac(2 * tp, 2 * tp + fn + fp);
    if (want.se && want.sp) want.ba = (*want.se + *want.sp) / 2.0;
    const std::uint64_t mcc_den = (tp + fn) * (tp + fp) * (tn + fn) * (tn + fp);
    if (mcc_den != 0) {
      const double num = static_cast<double>(tp) * static_cast<double>(tn) -
                         static_cast<double>(fn) * static_cast<double>(fp);
      want.mcc = num / std::sqrt(static_cast<double>(mcc_den));
    } else {
      ++degenerate;
    }
    const auto got = metrics::compute_metrics(counts);
    require(got == want, "report mismatch in trial " + std::to_string(trial) + " (tp=" + std::to_string(tp) +
                             " fp=" + std::to_string(fp) + " tn=" + std::to_string(tn) +
                             " fn=" + std::to_string(fn) + ")");
  }
  bool threw = false;
  try {
    metrics::compute_metrics({});
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::Empty;
  }
  require(threw, "empty matrix did not raise Empty");
  return "1000 matrices exact, " + std::to_string(degenerate) + " with undefined MCC";
}

std::string check_auc_pairs() {
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(uniform_index(rng, 2));
    labels[0] = 1;
    labels[1] = 0;
    shuffle(labels, rng);
    // Half the sets draw from a handful of levels so ties are common.
    const bool coarse = trial % 2 == 0;
    std::vector<double> scores(n);
    for (auto& s : scores) {
      s = coarse ? static_cast<double>(uniform_index(rng, 5)) / 4.0 : std::ldexp(static_cast<double>(rng() >> 11), -53);
    }
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != 0) continue;
        ++pairs;
        if (scores[i] > scores[j]) wins += 1.0;
        else if (scores[i] == scores[j]) wins += 0.5;
      }
    }
    const double want = wins / static_cast<double>(pairs);
    const double got = metrics::roc_auc(scores, labels);
    worst = std::max(worst, std::abs(got - want));
    require(std::abs(got - want) <= 1e-12, "trial " + std::to_string(trial) + ": " + std::to_string(got) +
                                               " vs " + std::to_string(want));
  }
  std::ostringstream s;
  s << "500 sets, max deviation " << worst;
  return s.str();
}

// ------------------------------------------------------------------ model

std::string check_gradients() {
  Rng rng(4242);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t in = 2 + uniform_index(rng, 11);
    const std::size_t hidden = 1 + uniform_index(rng, 8);
    const std::size_t n = 3 + uniform_index(rng, 10);
    auto m = model::MlpClassifier::initialize(in, hidden, 5000 + static_cast<std::uint64_t>(trial));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(in));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(uniform_index(rng, 2));
      for (std::size_t j = 0; j < in; ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = normal01(rng);
      }
    }
    const double l2 = trial % 3 == 0 ? 0.0 : 1e-3;
    const auto analytic = model::MlpClassifier::flatten(m.loss_and_gradients(x, y, l2).grad);
    auto params = m.parameters();
    require(analytic.size() == params.size(), "gradient and parameter counts differ");
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double saved = params[k];
      params[k] = saved + 1e-5;
      m.set_parameters(params);
      const double up = m.loss_and_gradients(x, y, l2).loss;
      params[k] = saved - 1e-5;
      m.set_parameters(params);
      const double down = m.loss_and_gradients(x, y, l2).loss;
      params[k] = saved;
      m.set_parameters(params);
      const double numeric = (up - down) / 2e-5;
      const double scale = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6});
      const double rel = std::abs(numeric - analytic[k]) / scale;
      worst = std::max(worst, rel);
      require(rel < 1e-4, "trial " + std::to_string(trial) + " parameter " + std::to_string(k) +
                              ": relative error " + std::to_string(rel));
    }
  }
  std::ostringstream s;
  s << "100 networks, max relative error " << worst;
  return s.str();
}

std::string check_early_stopping() {
  Rng rng(9);
  auto make = [&](std::size_t n) {
    model::Dataset d;
    d.x.resize(static_cast<Eigen::Index>(n), 5);
    for (std::size_t i = 0; i < n; ++i) {
      d.y.push_back(static_cast<int>(i % 2));
      for (Eigen::Index j = 0; j < 5; ++j) d.x(static_cast<Eigen::Index>(i), j) = normal01(rng);
    }
    return d;
  };
  const auto train_set = make(40);
  const auto val_set = make(20);
  model::TrainConfig config;
  config.hidden_dim = 4;
  config.batch_size = 16;
  config.max_epochs = 200;
  config.patience = 30;
  // All-zero weights get zero gradients through the hidden layer and the
  // balanced labels keep the output bias near zero: scores stay constant.
  const auto r = model::train(train_set, val_set, config, model::MlpClassifier::zeros(5, 4));
  require(r.history.size() == 31, "ran " + std::to_string(r.history.size()) + " epochs");
  require(r.best_epoch == 1, "best epoch " + std::to_string(r.best_epoch));
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    require(!r.history[i].improved, "epoch " + std::to_string(i + 1) + " counted as an improvement");
  }
  return "halted after 31 epochs, best epoch 1";
}

std::string check_synthetic_run() {
  auto curated = curation::curate(experiments::generate_synthetic_corpus());
  require(curated.records.size() == 400, "synthetic corpus curated to " + std::to_string(curated.records.size()));
  embedding::FeatureResolver resolver(nullptr, true);
  const auto corpus = experiments::prepare_corpus(curated.records, resolver);
  const auto control = experiments::prepare_corpus(experiments::shuffle_labels(curated.records, 11), resolver);
  require(corpus.fallback_used, "expected fallback features");

  experiments::ExperimentPlan plan;
  plan.dataset = "synthetic";
  plan.allow_fallback = true;
  plan.output_dir.clear();
  require(plan.seeds.size() == 3, "default plan does not have 3 seeds");
  const auto model_table = experiments::run_benchmark(plan, corpus);
  const auto control_table = experiments::run_benchmark(plan, control);
  const auto full = model_table.cell(plan.model_name, "AUC");
  const auto shuffled = control_table.cell(plan.model_name, "AUC");
  require(full.mean && shuffled.mean, "AUC missing from a run");
  const std::string summary = "AUC " + fmt(*full.mean) + " ± " + fmt(full.std) + ", shuffled control " +
                              fmt(*shuffled.mean) + ", hidden " + std::to_string(plan.train.hidden_dim);
  require(*full.mean >= 0.9, summary);
  require(*full.mean - *shuffled.mean >= 0.3, summary);
  return summary;
}

std::string check_fusion_dims() {
  using embedding::Component;
  // Component widths: protein language model 1280, molecule encoder 256, DAR 1.
  constexpr std::size_t protein = 1280, molecule = 256, dar = 1;
  constexpr std::size_t full = 3 * protein + 2 * molecule + dar;
  struct Case {
    std::string name;
    embedding::ComponentSet ablated;
    std::size_t oracle;
    std::size_t stated;
  };
  const std::vector<Case> cases{
      {"full", {}, full, 4353},
      {"w/o antigen", {Component::Antigen}, full - protein, 3073},
      {"w/o antibody", {Component::Heavy, Component::Light}, full - 2 * protein, 1793},
      {"w/o linker", {Component::Linker}, full - molecule, 4097},
      {"w/o payload", {Component::Payload}, full - molecule, 4097},
      {"w/o DAR", {Component::Dar}, full - dar, 4352},
  };
  const std::vector<double> p(protein, 0.5), m(molecule, -0.5);
  std::ostringstream s;
  for (const auto& c : cases) {
    require(c.oracle == c.stated, c.name + ": oracle " + std::to_string(c.oracle));
    const auto dim = embedding::fused_dim(c.ablated);
    const auto fused = embedding::fuse({m, m, p, p, p, 0.25}, c.ablated);
    require(dim == c.oracle, c.name + ": fused_dim " + std::to_string(dim));
    require(fused.x.size() == c.oracle, c.name + ": fuse produced " + std::to_string(fused.x.size()));
    std::size_t covered = 0;
    for (const auto& slice : fused.layout) covered += slice.dim;
    require(covered == c.oracle, c.name + ": layout covers " + std::to_string(covered));
    s << (s.tellp() > 0 ? " " : "") << c.oracle;
  }
  return "dims " + s.str();
}

// --------------------------------------------------------------- curation

std::string check_curation_replay() {
  const std::string dir = ADCNET_TEST_DATA;
  const auto raw = curation::read_raw_csv_file(dir + "/curation_fixture.csv");
  require(raw.size() == 20, "fixture has " + std::to_string(raw.size()) + " records");
  const auto result = curation::curate(raw);

  std::ifstream in(dir + "/curation_fixture_expected.csv");
  const csv::Table expected(csv::read(in));
  const auto id_col = expected.column("id"), outcome_col = expected.column("outcome"),
             activity_col = expected.column("activity_nM");
  require(id_col && outcome_col && activity_col, "expected file lacks columns");

  std::size_t labeled = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& row = expected.row(i);
    const std::string id = row[*id_col], outcome = row[*outcome_col], activity = row[*activity_col];
    const auto rec = std::find_if(result.records.begin(), result.records.end(),
                                  [&](const curation::LabeledAdc& r) { return r.record.id == id; });
    const auto drop = std::find_if(result.drops.begin(), result.drops.end(),
                                   [&](const curation::CurationDrop& d) { return d.id == id; });
    if (outcome == "Positive" || outcome == "Negative") {
      require(rec != result.records.end(), id + " was not kept");
      require(std::string(curation::to_string(rec->label)) == outcome,
              id + " labeled " + std::string(curation::to_string(rec->label)));
      if (activity.empty()) {
        require(!rec->activity_nm, id + " has an unexpected activity");
      } else {
        const double want = std::stod(activity);
        require(rec->activity_nm && std::abs(*rec->activity_nm - want) <= 1e-9 * want,
                id + " activity differs from " + activity);
      }
      ++labeled;
    } else if (outcome == "merged") {
      require(rec == result.records.end() && drop == result.drops.end(), id + " should merge into a duplicate");
    } else {
      require(rec == result.records.end(), id + " should be dropped");
      require(drop != result.drops.end() && drop->reason == outcome, id + " should drop as " + outcome);
    }
  }
  require(result.records.size() == labeled, "kept records do not match the expected file");
  require(result.duplicates_merged == 1, "merged " + std::to_string(result.duplicates_merged));

  for (std::uint64_t seed : {0ull, 1ull, 7ull, 123456789ull}) {
    const auto s = curation::split_dataset(435, seed);
    require(s.train.size() == 348 && s.val.size() == 43 && s.test.size() == 44, "split sizes for seed " +
                                                                                  std::to_string(seed));
    require(curation::split_dataset(435, seed) == s, "split not deterministic for seed " + std::to_string(seed));
    std::vector<std::size_t> all;
    for (const auto* part : {&s.train, &s.val, &s.test}) all.insert(all.end(), part->begin(), part->end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) require(all[i] == i, "split is not a partition");
  }
  require(curation::split_dataset(435, 1).train != curation::split_dataset(435, 2).train,
          "different seeds gave the same split");
  return std::to_string(expected.size()) + " fixture rows match, split 348/43/44";
}

// ------------------------------------------------------------------- chem

// Valence-aware random SMILES writer. Every string it emits is valid.
class SmilesWriter {
 public:
  explicit SmilesWriter(Rng& rng) : rng_(rng) {}

  std::string molecule() {
    std::string out = chain();
    if (uniform_index(rng_, 10) == 0) out += "." + chain();
    return out;
  }

 private:
  struct Unit {
    std::string text;
    int capacity;  // bonds the unit can still take
    bool carbon;
    bool ring = false;
  };

  Unit atom(bool allow_terminal) {
    static const std::vector<std::pair<std::string, int>> inner{
        {"C", 4}, {"C", 4}, {"C", 4}, {"N", 3}, {"O", 2}, {"S", 2}, {"[C@@H]", 3}};
    static const std::vector<std::pair<std::string, int>> terminal{
        {"F", 1}, {"Cl", 1}, {"Br", 1}, {"[O-]", 1}, {"[NH3+]", 1}, {"I", 1}};
    if (allow_terminal && uniform_index(rng_, 4) == 0) {
      const auto& t = terminal[uniform_index(rng_, terminal.size())];
      return {t.first, t.second, false};
    }
    if (uniform_index(rng_, 6) == 0) return {"c1ccccc1", 2, false, true};
    auto pick = inner[uniform_index(rng_, inner.size())];
    return {pick.first, pick.second, pick.first == "C"};
  }

  std::string chain() {
    const std::size_t length = 1 + uniform_index(rng_, 12);
    std::vector<Unit> units;
    for (std::size_t i = 0; i < length; ++i) {
      const bool end = i == 0 || i + 1 == length;
      units.push_back(atom(end));
    }
    // Chain bonds, with the occasional double bond between carbons.
    std::vector<std::string> bond(length);
    for (std::size_t i = 1; i < length; ++i) {
      int order = 1;
      if (units[i - 1].carbon && units[i].carbon && units[i - 1].capacity >= 2 && units[i].capacity >= 3 &&
          uniform_index(rng_, 6) == 0) {
        order = 2;
        bond[i] = "=";
      }
      units[i - 1].capacity -= order;
      units[i].capacity -= order;
    }
    // Ring closures between chain atoms at least three apart. Digit 1 is
    // left to the benzene units.
    std::vector<std::string> closures(length);
    int digit = 2;
    std::size_t first_a = length, first_b = length;
    for (int attempt = 0; attempt < 2 && length >= 4; ++attempt) {
      const std::size_t a = uniform_index(rng_, length - 3);
      const std::size_t b = a + 3 + uniform_index(rng_, length - a - 3);
      if (units[a].ring || units[b].ring || units[a].capacity < 1 || units[b].capacity < 1) continue;
      if (uniform_index(rng_, 2) == 0 || (a == first_a && b == first_b)) continue;
      first_a = a;
      first_b = b;
      --units[a].capacity;
      --units[b].capacity;
      closures[a] += std::to_string(digit);
      closures[b] += std::to_string(digit);
      ++digit;
    }
    std::string out;
    for (std::size_t i = 0; i < length; ++i) {
      out += bond[i];
      if (units[i].ring) {
        out += units[i].text;
        continue;
      }
      out += units[i].text + closures[i];
      while (units[i].capacity >= 1 && uniform_index(rng_, 4) == 0) {
        --units[i].capacity;
        out += "(" + branch() + ")";
      }
    }
    return out;
  }

  std::string branch() {
    static const std::vector<std::string> body{"C", "CC", "O", "N", "F", "Cl", "C(=O)O", "OC", "C#N"};
    return body[uniform_index(rng_, body.size())];
  }

  Rng& rng_;
};

std::string mutate(Rng& rng, std::string s) {
  static const std::string alphabet = "CNOSPFIBrcnos()[]=#@+-1234567890%/\\.H: ";
  const std::size_t edits = 1 + uniform_index(rng, 4);
  for (std::size_t e = 0; e < edits; ++e) {
    const std::size_t op = uniform_index(rng, 3);
    const char c = alphabet[uniform_index(rng, alphabet.size())];
    if (op == 0 || s.empty()) {
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, s.size() + 1)), c);
    } else if (op == 1) {
      s.erase(uniform_index(rng, s.size()), 1);
    } else {
      s[uniform_index(rng, s.size())] = c;
    }
  }
  return s;
}

std::string check_chem_suite() {
  Rng rng(31337);
  SmilesWriter writer(rng);
  std::vector<chem::MolecularGraph> parsed;
  std::vector<std::string> sources;
  std::size_t rejected = 0;
  for (int i = 0; i < 10000; ++i) {
    const bool generated = i % 2 == 0;
    std::string smiles = writer.molecule();
    if (!generated) smiles = mutate(rng, smiles);
    try {
      auto g = chem::parse_smiles(smiles);
      if (generated && parsed.size() < 2000) {
        parsed.push_back(std::move(g));
        sources.push_back(smiles);
      }
    } catch (const Error&) {
      require(!generated, "well-formed SMILES rejected: " + smiles);
      ++rejected;
    } catch (const std::exception& e) {
      fail("non-domain exception " + std::string(e.what()) + " on " + smiles);
    }
  }

  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto again = chem::parse_smiles(sources[i]);
    for (auto kind : {chem::FingerprintKind::Maccs166, chem::FingerprintKind::Morgan1024,
                      chem::FingerprintKind::Ecfp4_2048}) {
      const auto a = chem::fingerprint(parsed[i], kind);
      require(a == chem::fingerprint(again, kind), "fingerprint not deterministic for " + sources[i]);
      require(a.size() == chem::fingerprint_length(kind), "fingerprint width");
      require(chem::tanimoto(a, a) == 1.0, "Tanimoto self-similarity is not 1 for " + sources[i]);
      const auto b = chem::fingerprint(parsed[(i * 7 + 3) % parsed.size()], kind);
      const double ab = chem::tanimoto(a, b);
      require(ab == chem::tanimoto(b, a), "Tanimoto not symmetric");
      require(ab >= 0.0 && ab <= 1.0, "Tanimoto out of [0, 1]");
    }
    const auto scaffold = chem::murcko_scaffold(parsed[i]);
    require(chem::murcko_scaffold(scaffold) == scaffold, "scaffold not idempotent for " + sources[i]);
  }

  for (int i = 0; i < 1000; ++i) {
    std::vector<double> values(1 + uniform_index(rng, 12));
    for (auto& v : values) v = uniform(rng, 1e-6, 1.0);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double arithmetic = sum / static_cast<double>(values.size());
    const double harmonic = chem::harmonic_mean_similarity(values);
    require(harmonic <= arithmetic * (1.0 + 1e-12), "harmonic mean above arithmetic mean");
    require(harmonic > 0.0, "non-positive harmonic mean");
  }
  bool rejected_zero = false;
  try {
    const double with_zero[] = {0.5, 0.0};
    chem::harmonic_mean_similarity(with_zero);
  } catch (const Error& e) {
    rejected_zero = e.code() == ErrorCode::NonPositiveScore;
  }
  require(rejected_zero, "a zero score was not rejected");
  return "10000 strings parsed without crashing (" + std::to_string(rejected) + " mutants rejected), " +
         std::to_string(parsed.size()) + " molecules checked";
}

// ---------------------------------------------------------- persistence

std::string check_checkpoint_round_trip() {
  model::Checkpoint c;
  c.model = model::MlpClassifier::initialize(embedding::fused_dim({}), 256, 17);
  c.layout = embedding::fused_layout({});
  const double dars[] = {1.0, 4.0, 8.0};
  c.scaler = embedding::DarScaler::fit(dars);
  c.model_name = "ADCNet";
  c.trained_at = "2024-01-01T00:00:00Z";
  // Perturb the biases so every parameter block carries non-trivial bits.
  Rng rng(5);
  for (Eigen::Index i = 0; i < c.model.hidden().bias.size(); ++i) c.model.hidden().bias[i] = normal01(rng) * 0.1;
  c.model.output().bias[0] = 0.3;

  const auto path = (fs::temp_directory_path() / "adcnet_acceptance.adcn").string();
  model::save_checkpoint(c, path);
  const auto loaded = model::load_checkpoint(path);
  fs::remove(path);
  require(loaded == c, "loaded checkpoint differs");
  std::vector<double> x(c.model.in_dim());
  for (int i = 0; i < 100; ++i) {
    for (auto& v : x) v = normal01(rng);
    const double a = c.model.forward(x), b = loaded.model.forward(x);
    require(std::memcmp(&a, &b, sizeof a) == 0, "forward differs on input " + std::to_string(i));
  }
  return "100 forward passes bit-identical";
}

// ---------------------------------------------------------------- service

std::string check_service() {
  using namespace service;
  const auto store = fixture::known_store();
  const auto checkpoint = fixture::small_checkpoint();
  auto predictor = std::make_shared<const Predictor>(checkpoint, "ADCNet-acceptance", store, false);

  ServiceConfig config;
  config.port = 0;
  config.threads = 4;
  Server server(config, predictor);
  const int port = server.bind();
  std::thread serving([&] { server.serve(); });
  server.wait_until_ready();
  struct Stop {
    Server& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{server, serving};

  httplib::Client client("127.0.0.1", port);
  const auto req = fixture::known_request();
  auto body_for = [](const PredictRequest& r) {
    return json{{"heavy_chain", r.heavy_chain},     {"light_chain", r.light_chain},
                {"antigen", r.antigen},             {"linker_smiles", r.linker_smiles},
                {"payload_smiles", r.payload_smiles}, {"dar", r.dar}}
        .dump();
  };

  // Library path, independent of the service's own featurization.
  embedding::FeatureResolver resolver(&store, false);
  auto library_score = [&](double dar) {
    const embedding::AdcInput input{req.heavy_chain, req.light_chain, req.antigen, req.linker_smiles,
                                    req.payload_smiles, dar};
    const auto f = embedding::featurize(input, resolver, checkpoint.scaler);
    return checkpoint.model.forward(f.feature.x);
  };

  auto res = client.Post("/api/predict", body_for(req), "application/json");
  require(res && res->status == 200, "predict did not return 200");
  const double served = json::parse(res->body)["score"].get<double>();
  require(served == library_score(req.dar), "served score differs from the library forward pass");

  // Batch with an invalid row in the middle; every row comes back in order.
  const std::vector<double> dars{2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
  std::string batch = "id,heavy_chain,light_chain,antigen,linker_smiles,payload_smiles,dar\n";
  for (std::size_t i = 0; i < dars.size(); ++i) {
    const std::string linker = i == 3 ? "C1CC(" : req.linker_smiles;
    batch += "row" + std::to_string(i) + "," + req.heavy_chain + "," + req.light_chain + "," + req.antigen + "," +
             csv::escape(linker) + "," + csv::escape(req.payload_smiles) + "," + fmt(dars[i], 1) + "\n";
  }
  res = client.Post("/api/predict/batch", batch, "text/csv");
  require(res && res->status == 200, "batch did not return 200");
  const csv::Table out(csv::parse(res->body));
  require(out.size() == dars.size(), "batch returned " + std::to_string(out.size()) + " rows");
  const auto id = out.column("id"), score = out.column("score"), error = out.column("error");
  require(id && score && error, "batch output lacks id, score or error");
  for (std::size_t i = 0; i < dars.size(); ++i) {
    const auto& row = out.row(i);
    require(row[*id] == "row" + std::to_string(i), "row order changed at " + std::to_string(i));
    if (i == 3) {
      require(row[*score].empty() && !row[*error].empty(), "invalid row was not reported in-band");
    } else {
      require(row[*error].empty(), "row " + std::to_string(i) + " failed: " + row[*error]);
      require(std::stod(row[*score]) == library_score(dars[i]), "batch score differs at row " + std::to_string(i));
    }
  }

  auto bad = req;
  bad.linker_smiles = "CC(=O";
  res = client.Post("/api/predict", body_for(bad), "application/json");
  require(res && res->status == 422, "invalid SMILES did not return 422");
  const auto err = json::parse(res->body)["error"];
  require(err["field"] == "linker_smiles", "error field is " + err["field"].dump());
  require(err["code"] == "InvalidSmiles", "error code is " + err["code"].dump());
  return "score matches library, batch of " + std::to_string(dars.size()) + " in order, 422 on linker_smiles";
}

struct Check {
  std::string name;
  double limit_seconds;  // 0 when untimed
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments restrict the run to the named checks.
  const std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<Check> checks{
      {"metric-oracle", 5, check_metric_oracle},
      {"auc-pair-equivalence", 30, check_auc_pairs},
      {"gradient-check", 60, check_gradients},
      {"early-stopping-trace", 10, check_early_stopping},
      {"synthetic-end-to-end", 300, check_synthetic_run},
      {"fusion-arithmetic", 0, check_fusion_dims},
      {"curation-replay", 5, check_curation_replay},
      {"chem-suite", 60, check_chem_suite},
      {"checkpoint-round-trip", 10, check_checkpoint_round_trip},
      {"service-integration", 30, check_service},
  };
  int failures = 0;
  for (const auto& check : checks) {
    if (!only.empty() && std::find(only.begin(), only.end(), check.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string outcome;
    bool ok = true;
    try {
      outcome = check.run();
    } catch (const Failure& f) {
      ok = false;
      outcome = f.reason;
    } catch (const std::exception& e) {
      ok = false;
      outcome = std::string("unexpected exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && check.limit_seconds > 0 && seconds >= check.limit_seconds) {
      ok = false;
      outcome += "; took " + fmt(seconds, 2) + " s, limit " + fmt(check.limit_seconds, 0) + " s";
    }
    std::cout << (ok ? "PASS " : "FAIL ") << check.name << ": " << outcome << " [" << fmt(seconds, 2) << " s]"
              << std::endl;
    if (!ok) ++failures;
  }
  std::cout << (failures == 0 ? "all acceptance checks passed" : std::to_string(failures) + " acceptance checks failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
