#include "adcnet/experiments/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adcnet/chem/fingerprint.hpp"
#include "adcnet/csv.hpp"
#include "adcnet/chem/similarity.hpp"
#include "adcnet/chem/smiles.hpp"
#include "adcnet/error.hpp"
#include "adcnet/hashing.hpp"
#include "adcnet/parallel.hpp"
#include "adcnet/random.hpp"
#include "adcnet/experiments/baselines.hpp"
#include "adcnet/model/train.hpp"
#include "json.hpp"

namespace adcnet::experiments {

namespace fs = std::filesystem;
using embedding::Component;
using nlohmann::json;

namespace {

constexpr std::array<Component, 5> kVectorComponents{Component::Linker, Component::Payload, Component::Heavy,
                                                     Component::Light, Component::Antigen};

const std::string& component_content(const curation::AdcRecord& r, Component c) {
  switch (c) {
    case Component::Linker: return r.linker_smiles;
    case Component::Payload: return r.payload_smiles;
    case Component::Heavy: return r.heavy_chain;
    case Component::Light: return r.light_chain;
    case Component::Antigen: return r.antigen;
    case Component::Dar: break;
  }
  throw Error(ErrorCode::InvalidArgument, "dar has no content");
}

std::string slug(std::string_view name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

json ids(const PreparedCorpus& corpus, const std::vector<std::size_t>& rows) {
  json a = json::array();
  for (auto r : rows) a.push_back(corpus.records[r].record.id);
  return a;
}

struct RunSpec {
  std::string model_name;
  std::uint64_t seed = 0;
  int fold = -1;
  std::uint64_t train_seed = 0;
  embedding::ComponentSet ablated;
};

struct RunOutcome {
  RunResult result;
  model::Checkpoint checkpoint;
};

RunOutcome run_split(const ExperimentPlan& plan, const PreparedCorpus& corpus, const curation::DatasetSplit& split,
                     const RunSpec& spec) {
  const auto scaler = fit_scaler(corpus, split.train);
  const auto train_set = build_dataset(corpus, split.train, scaler, spec.ablated);
  const auto val_set = build_dataset(corpus, split.val, scaler, spec.ablated);
  const auto test_set = build_dataset(corpus, split.test, scaler, spec.ablated);
  auto config = plan.train;
  config.seed = spec.train_seed;
  auto trained = model::train(train_set, val_set, config);
  const auto scores = trained.model.predict_vector(test_set.x);

  RunOutcome out;
  out.result.model = spec.model_name;
  out.result.seed = spec.seed;
  out.result.fold = spec.fold;
  out.result.split_hash = split_hash(corpus, split);
  out.result.input_dim = train_set.dim();
  out.result.best_epoch = trained.best_epoch;
  out.result.report = metrics::evaluate(scores, test_set.y);

  auto& c = out.checkpoint;
  c.config = config;
  c.ablated = spec.ablated;
  c.layout = embedding::fused_layout(spec.ablated);
  c.scaler = scaler;
  c.history = std::move(trained.history);
  c.best_epoch = trained.best_epoch;
  c.model = std::move(trained.model);
  c.model_name = spec.model_name;
  c.trained_at = model::current_timestamp();
  for (auto name : metrics::metric_names()) {
    if (const auto v = metrics::metric_value(out.result.report, name)) c.metrics[std::string(name)] = *v;
  }
  c.metrics["val_auc"] = trained.best_val_auc;
  return out;
}

void write_split_file(const ExperimentPlan& plan, const PreparedCorpus& corpus, const curation::DatasetSplit& split) {
  if (plan.output_dir.empty()) return;
  json j;
  j["seed"] = split.seed;
  j["hash"] = split_hash(corpus, split);
  j["train"] = ids(corpus, split.train);
  j["val"] = ids(corpus, split.val);
  j["test"] = ids(corpus, split.test);
  write_text(fs::path(plan.output_dir) / "splits" / (std::to_string(split.seed) + ".json"), j.dump(1) + "\n");
}

void write_checkpoint(const ExperimentPlan& plan, const model::Checkpoint& c, const std::string& run) {
  if (plan.output_dir.empty()) return;
  const auto dir = fs::path(plan.output_dir) / "checkpoints";
  fs::create_directories(dir);
  model::save_checkpoint(c, (dir / (run + ".adcn")).string());
}

const std::vector<double>& slot(const PreparedCorpus& corpus, std::size_t row, Component c) {
  const auto& v = corpus.vectors[row][static_cast<std::size_t>(c)];
  if (v.empty()) {
    throw Error(ErrorCode::MissingEmbedding, "record " + corpus.records[row].record.id + ": " +
                                                 std::string(embedding::to_string(c)) + " was not resolved");
  }
  return v;
}

}  // namespace

std::vector<int> PreparedCorpus::labels() const {
  std::vector<int> out;
  for (const auto& r : records) out.push_back(static_cast<int>(r.label));
  return out;
}

std::vector<double> PreparedCorpus::dars() const {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.record.dar.value_or(0.0));
  return out;
}

PreparedCorpus prepare_corpus(std::vector<curation::LabeledAdc> records, const embedding::FeatureResolver& resolver,
                              const embedding::ComponentSet& skip) {
  PreparedCorpus corpus;
  corpus.records = std::move(records);
  corpus.vectors.resize(corpus.records.size());
  std::map<std::pair<Component, std::string>, embedding::FeatureResolver::Resolved> cache;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& rec = corpus.records[i].record;
    if (!rec.dar) throw Error(ErrorCode::InvalidArgument, "record " + rec.id + ": dar is missing");
    for (Component c : kVectorComponents) {
      if (skip.contains(c)) continue;
      const std::string& content = component_content(rec, c);
      auto key = std::make_pair(c, content);
      auto it = cache.find(key);
      if (it == cache.end()) {
        try {
          it = cache.emplace(std::move(key), resolver.resolve(c, content)).first;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::MissingEmbedding) throw;
          throw Error(ErrorCode::MissingEmbedding, "record " + rec.id + ", component " +
                                                       std::string(embedding::to_string(c)) + ": " + e.detail());
        }
      }
      corpus.fallback_used |= it->second.source == embedding::VectorSource::Fallback;
      corpus.vectors[i][static_cast<std::size_t>(c)] = it->second.values;
    }
  }
  return corpus;
}

PreparedCorpus load_corpus(const ExperimentPlan& plan, const embedding::ComponentSet& skip) {
  const auto raw = curation::load_records(plan.dataset);
  auto curated = curation::curate(raw, plan.cutoff_nm);
  embedding::EmbeddingStore store;
  if (!plan.embeddings.empty()) store = embedding::EmbeddingStore::load(plan.embeddings);
  embedding::FeatureResolver resolver(plan.embeddings.empty() ? nullptr : &store, plan.allow_fallback);
  return prepare_corpus(std::move(curated.records), resolver, skip);
}

embedding::DarScaler fit_scaler(const PreparedCorpus& corpus, std::span<const std::size_t> rows) {
  std::vector<double> dars;
  for (auto r : rows) dars.push_back(corpus.records[r].record.dar.value_or(0.0));
  return embedding::DarScaler::fit(dars);
}

model::Dataset build_dataset(const PreparedCorpus& corpus, std::span<const std::size_t> rows,
                             const embedding::DarScaler& scaler, const embedding::ComponentSet& ablated) {
  model::Dataset data;
  const auto dim = embedding::fused_dim(ablated);
  data.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  static const std::vector<double> kNone;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    auto part = [&](Component c) -> std::span<const double> {
      return ablated.contains(c) ? std::span<const double>(kNone) : std::span<const double>(slot(corpus, r, c));
    };
    embedding::ComponentVectors parts{part(Component::Linker), part(Component::Payload), part(Component::Heavy),
                                      part(Component::Light),  part(Component::Antigen),
                                      scaler.scale(corpus.records[r].record.dar.value_or(0.0))};
    const auto fused = embedding::fuse(parts, ablated);
    data.x.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(fused.x.data(), static_cast<Eigen::Index>(fused.x.size()));
    data.y.push_back(static_cast<int>(corpus.records[r].label));
  }
  return data;
}

std::string split_hash(const PreparedCorpus& corpus, const curation::DatasetSplit& split) {
  std::string text;
  auto part = [&](const char* name, const std::vector<std::size_t>& rows) {
    text += name;
    for (auto r : rows) text += '\t' + corpus.records[r].record.id;
    text += '\n';
  };
  part("train", split.train);
  part("val", split.val);
  part("test", split.test);
  return sha256_hex(text);
}

std::vector<std::vector<std::size_t>> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (n < k) {
    throw Error(ErrorCode::TooFewRecords,
                std::to_string(n) + " records cannot fill " + std::to_string(k) + " folds");
  }
  Rng rng(derive_seed(seed, 0xf01d));
  const auto order = permutation(n, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

ResultTable run_benchmark(const ExperimentPlan& plan, const PreparedCorpus& corpus,
                          const embedding::ComponentSet& ablated) {
  plan.validate();
  const auto name = variant_name(plan.model_name, ablated);
  std::vector<RunResult> results(plan.seeds.size());
  parallel_for(plan.seeds.size(), plan.jobs, [&](std::size_t i) {
    const auto seed = plan.seeds[i];
    const auto split = curation::split_dataset(corpus.size(), seed);
    write_split_file(plan, corpus, split);
    auto outcome = run_split(plan, corpus, split, {name, seed, -1, seed, ablated});
    write_checkpoint(plan, outcome.checkpoint, slug(name) + "_seed" + std::to_string(seed));
    results[i] = std::move(outcome.result);
  });
  ResultTable table;
  for (auto& r : results) table.add(std::move(r));
  return table;
}

ResultTable cross_validate(const ExperimentPlan& plan, const PreparedCorpus& corpus) {
  plan.validate();
  const std::size_t k = plan.k_folds.value_or(5);
  const auto seed = plan.seeds.front();
  const auto folds = fold_assignment(corpus.size(), k, seed);
  const auto labels = corpus.labels();
  std::vector<curation::DatasetSplit> splits(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(rest.begin(), rest.end());
    // Stratified 10% carve-out of the training folds for early stopping.
    Rng rng(derive_seed(seed, 0xca00 + f));
    std::vector<std::size_t> val;
    for (int cls : {0, 1}) {
      std::vector<std::size_t> members;
      for (auto r : rest) {
        if (labels[r] == cls) members.push_back(r);
      }
      if (members.empty()) continue;
      shuffle(members, rng);
      const auto take = std::max<std::size_t>(1, (members.size() + 5) / 10);
      val.insert(val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(val.begin(), val.end());
    auto& s = splits[f];
    s.seed = seed;
    std::set_difference(rest.begin(), rest.end(), val.begin(), val.end(), std::back_inserter(s.train));
    s.val = std::move(val);
    s.test = folds[f];
  }
  if (!plan.output_dir.empty()) {
    json j;
    j["seed"] = seed;
    j["k"] = k;
    j["folds"] = json::array();
    for (const auto& f : folds) j["folds"].push_back(ids(corpus, f));
    write_text(fs::path(plan.output_dir) / "splits" / ("cv_" + std::to_string(seed) + ".json"), j.dump(1) + "\n");
  }
  std::vector<RunResult> results(k);
  parallel_for(k, plan.jobs, [&](std::size_t f) {
    auto outcome = run_split(plan, corpus, splits[f],
                             {plan.model_name, seed, static_cast<int>(f), derive_seed(seed, f + 1), {}});
    write_checkpoint(plan, outcome.checkpoint,
                     slug(plan.model_name) + "_cv" + std::to_string(seed) + "_fold" + std::to_string(f));
    results[f] = std::move(outcome.result);
  });
  ResultTable table;
  for (auto& r : results) table.add(std::move(r));
  return table;
}

ResultTable run_ablations(const ExperimentPlan& plan, const PreparedCorpus& corpus) {
  const auto variants = plan.ablations.empty() ? default_ablations() : plan.ablations;
  ResultTable table;
  for (const auto& v : variants) table.append(run_benchmark(plan, corpus, v));
  return table;
}

model::Dataset build_baseline_dataset(const PreparedCorpus& corpus, std::span<const std::size_t> rows,
                                      const embedding::DarScaler& scaler, chem::FingerprintKind fingerprint) {
  const std::size_t fp_len = chem::fingerprint_length(fingerprint);
  const std::size_t dim = 2 * fp_len + 3 * embedding::kProteinDim + 1;
  model::Dataset data;
  data.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  std::map<std::string, chem::Fingerprint> cache;
  auto fp = [&](const std::string& smiles) -> const chem::Fingerprint& {
    auto it = cache.find(smiles);
    if (it == cache.end()) it = cache.emplace(smiles, chem::fingerprint(chem::parse_smiles(smiles), fingerprint)).first;
    return it->second;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    const auto& rec = corpus.records[r].record;
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::Index col = 0;
    for (const auto* smiles : {&rec.linker_smiles, &rec.payload_smiles}) {
      const auto& bits = fp(*smiles).bits;
      for (std::size_t b = 0; b < fp_len; ++b) data.x(row, col + static_cast<Eigen::Index>(b)) = bits[b] ? 1.0 : 0.0;
      col += static_cast<Eigen::Index>(fp_len);
    }
    for (Component c : {Component::Heavy, Component::Light, Component::Antigen}) {
      const auto& v = slot(corpus, r, c);
      for (std::size_t b = 0; b < v.size(); ++b) data.x(row, col + static_cast<Eigen::Index>(b)) = v[b];
      col += static_cast<Eigen::Index>(v.size());
    }
    data.x(row, col) = scaler.scale(rec.dar.value_or(0.0));
    data.y.push_back(static_cast<int>(corpus.records[r].label));
  }
  return data;
}

ResultTable run_baseline(const BaselineSpec& spec, const ExperimentPlan& plan, const PreparedCorpus& corpus) {
  plan.validate();
  std::vector<RunResult> results(plan.seeds.size());
  // Trees parallelise internally, so seeds run one after another for RF.
  const std::size_t outer_jobs = spec.kind == BaselineKind::RF ? 1 : plan.jobs;
  parallel_for(plan.seeds.size(), outer_jobs, [&](std::size_t i) {
    const auto seed = plan.seeds[i];
    const auto split = curation::split_dataset(corpus.size(), seed);
    write_split_file(plan, corpus, split);
    const auto scaler = fit_scaler(corpus, split.train);
    const auto train_set = build_baseline_dataset(corpus, split.train, scaler, spec.fingerprint);
    const auto test_set = build_baseline_dataset(corpus, split.test, scaler, spec.fingerprint);
    std::vector<double> scores;
    if (spec.kind == BaselineKind::LR) {
      LogisticRegression lr;
      lr.fit(train_set);
      scores = lr.predict(test_set.x);
    } else {
      RandomForest rf;
      ForestConfig config;
      config.seed = seed;
      config.jobs = plan.jobs;
      rf.fit(train_set, config);
      scores = rf.predict(test_set.x);
    }
    RunResult r;
    r.model = spec.name();
    r.seed = seed;
    r.split_hash = split_hash(corpus, split);
    r.input_dim = train_set.dim();
    r.report = metrics::evaluate(scores, test_set.y);
    results[i] = std::move(r);
  });
  ResultTable table;
  for (auto& r : results) table.add(std::move(r));
  return table;
}

std::vector<ExternalScore> score_external(const std::vector<curation::AdcRecord>& external,
                                          const std::vector<curation::LabeledAdc>& reference,
                                          const model::Checkpoint& checkpoint,
                                          const embedding::FeatureResolver& resolver, double cutoff_nm) {
  if (reference.empty()) throw Error(ErrorCode::EmptyList, "reference corpus is empty");
  std::set<std::string> heavy, light, antigen, linker_smiles, payload_smiles;
  for (const auto& r : reference) {
    heavy.insert(curation::normalize_sequence(r.record.heavy_chain));
    light.insert(curation::normalize_sequence(r.record.light_chain));
    antigen.insert(curation::normalize_sequence(r.record.antigen));
    linker_smiles.insert(r.record.linker_smiles);
    payload_smiles.insert(r.record.payload_smiles);
  }
  auto fingerprints = [](const std::set<std::string>& smiles) {
    std::vector<chem::Fingerprint> out;
    for (const auto& s : smiles) out.push_back(chem::ecfp4_fingerprint(chem::parse_smiles(s)));
    return out;
  };
  const auto linker_fps = fingerprints(linker_smiles);
  const auto payload_fps = fingerprints(payload_smiles);
  auto best_identity = [](const std::string& seq, const std::set<std::string>& refs) {
    const auto s = curation::normalize_sequence(seq);
    double best = 0.0;
    for (const auto& r : refs) best = std::max(best, chem::sequence_identity(s, r));
    return best;
  };
  auto best_tanimoto = [](const std::string& smiles, const std::vector<chem::Fingerprint>& refs) {
    const auto fp = chem::ecfp4_fingerprint(chem::parse_smiles(smiles));
    double best = 0.0;
    for (const auto& r : refs) best = std::max(best, chem::tanimoto(fp, r));
    return best;
  };

  std::vector<ExternalScore> out;
  for (const auto& rec : external) {
    if (!rec.dar) throw Error(ErrorCode::InvalidArgument, "record " + rec.id + ": dar is missing");
    embedding::AdcInput input{rec.heavy_chain, rec.light_chain, rec.antigen, rec.linker_smiles, rec.payload_smiles,
                              *rec.dar};
    embedding::Featurized f;
    try {
      f = embedding::featurize(input, resolver, checkpoint.scaler, checkpoint.ablated);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingEmbedding) throw;
      throw Error(ErrorCode::MissingEmbedding, "record " + rec.id + ": " + e.detail());
    }
    ExternalScore s;
    s.id = rec.id;
    s.score = checkpoint.model.forward(f.feature.x);
    s.predicted = s.score >= metrics::kDefaultThreshold ? curation::Label::Positive : curation::Label::Negative;
    if (!rec.measurements.empty()) {
      try {
        s.observed = curation::assign_label(rec, cutoff_nm).label;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Unlabelable && e.code() != ErrorCode::MassConcentrationUnit) throw;
      }
    }
    s.component_similarity = {best_identity(rec.heavy_chain, heavy), best_identity(rec.light_chain, light),
                              best_identity(rec.antigen, antigen), best_tanimoto(rec.linker_smiles, linker_fps),
                              best_tanimoto(rec.payload_smiles, payload_fps)};
    const bool any_zero = std::any_of(s.component_similarity.begin(), s.component_similarity.end(),
                                      [](double v) { return !(v > 0.0); });
    s.similarity = any_zero ? 0.0 : chem::harmonic_mean_similarity(s.component_similarity);
    out.push_back(s);
  }
  return out;
}

std::string external_report_csv(const std::vector<ExternalScore>& scores) {
  std::ostringstream out;
  csv::write_row(out, {"id", "score", "predicted", "observed", "heavy_identity", "light_identity", "antigen_identity",
                       "linker_tanimoto", "payload_tanimoto", "similarity"});
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& s : scores) {
    csv::Row row{s.id, num(s.score), std::string(curation::to_string(s.predicted)),
                 s.observed ? std::string(curation::to_string(*s.observed)) : ""};
    for (double v : s.component_similarity) row.push_back(num(v));
    row.push_back(num(s.similarity));
    csv::write_row(out, row);
  }
  return out.str();
}

void write_results(const ResultTable& table, const std::string& dir, const std::vector<std::string_view>& md_columns) {
  write_text(fs::path(dir) / "results.csv", table.to_csv());
  write_text(fs::path(dir) / "results.md", table.to_markdown(md_columns));
}

}  // namespace adcnet::experiments
