#include "adcnet/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "adcnet/chem/fingerprint.hpp"
#include "adcnet/chem/smiles.hpp"
#include "adcnet/csv.hpp"
#include "adcnet/curation.hpp"
#include "adcnet/embedding.hpp"
#include "adcnet/error.hpp"
#include "adcnet/experiments/runner.hpp"
#include "adcnet/experiments/synthetic.hpp"
#include "adcnet/model/checkpoint.hpp"
#include "adcnet/model/hpo.hpp"
#include "adcnet/service/predictor.hpp"
#include "adcnet/service/server.hpp"
#include "json.hpp"

namespace adcnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

/// Writes to the path, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

std::string metrics_json(const metrics::MetricReport& report) {
  json j = json::object();
  for (auto name : metrics::metric_names()) {
    const auto v = metrics::metric_value(report, name);
    j[std::string(name)] = v ? json(*v) : json(nullptr);
  }
  return j.dump(2) + "\n";
}

struct Common {
  std::size_t jobs = 0;  // 0: keep the plan's value
};

experiments::ExperimentPlan plan_with_overrides(const std::string& path, const Common& common) {
  auto plan = experiments::load_plan(path);
  if (common.jobs) plan.jobs = common.jobs;
  return plan;
}

embedding::EmbeddingStore load_store(const std::string& path) {
  return path.empty() ? embedding::EmbeddingStore{} : embedding::EmbeddingStore::load(path);
}

void print_table(const experiments::ResultTable& t, const std::vector<std::string_view>& columns = {}) {
  std::cerr << t.to_markdown(columns);
}

// Runs the plan's search on the first seed's split and returns the winner.
model::TrainConfig search_config(const experiments::ExperimentPlan& plan, const experiments::PreparedCorpus& corpus,
                                 std::size_t trials, json* report) {
  const auto split = curation::split_dataset(corpus.size(), plan.seeds.front());
  const auto scaler = experiments::fit_scaler(corpus, split.train);
  const auto train_set = experiments::build_dataset(corpus, split.train, scaler);
  const auto val_set = experiments::build_dataset(corpus, split.val, scaler);
  model::RandomSearch strategy(plan.search.seed);
  const auto result = model::hyperparameter_search(train_set, val_set, model::SearchSpace{}, plan.train, trials,
                                                   plan.seeds, strategy, plan.jobs);
  if (report) {
    json trials_json = json::array();
    for (const auto& t : result.trials) {
      trials_json.push_back({{"trial", t.trial},
                             {"hidden_dim", t.config.hidden_dim},
                             {"learning_rate", t.config.learning_rate},
                             {"batch_size", t.config.batch_size},
                             {"l2_penalty", t.config.l2_penalty},
                             {"val_auc", t.val_auc},
                             {"diverged", t.diverged}});
    }
    (*report)["trials"] = trials_json;
    (*report)["best_trial"] = result.best_trial;
    (*report)["best"] = {{"hidden_dim", result.best.hidden_dim},
                         {"learning_rate", result.best.learning_rate},
                         {"batch_size", result.best.batch_size},
                         {"l2_penalty", result.best.l2_penalty}};
  }
  std::cerr << "search: best " << result.best.describe() << '\n';
  return result.best;
}

void add_subcommands(CLI::App& app, Common& common) {
  // curate
  {
    auto* cmd = app.add_subcommand("curate", "Normalize, filter, deduplicate and label a raw CSV");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();
    auto cutoff = std::make_shared<double>(curation::kDefaultCutoffNm);
    cmd->add_option("--in", *in, "Raw CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "Curated JSONL output")->required();
    cmd->add_option("--cutoff-nm", *cutoff, "Activity cutoff in nM (1000 for the relaxed variant)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--report", *report, "Write the curation report here instead of stderr");
    cmd->callback([=] {
      std::vector<std::string> warnings;
      const auto raw = curation::read_raw_csv_file(*in, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      const auto result = curation::curate(raw, *cutoff);
      std::ostringstream jsonl;
      curation::write_curated_jsonl(jsonl, result.records);
      write_file(*out, jsonl.str());
      if (report->empty()) {
        std::cerr << result.report();
      } else {
        write_file(*report, result.report());
      }
    });
  }
  // featurize
  {
    auto* cmd = app.add_subcommand("featurize", "Compute molecular fingerprints for SMILES (one per line)");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>("ecfp4");
    cmd->add_option("--in", *in, "Text file with one SMILES per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--kind", *kind, "maccs, morgan or ecfp4")->check(CLI::IsMember({"maccs", "morgan", "ecfp4"}));
    cmd->add_option("--out", *out, "JSONL output (stdout when omitted)");
    cmd->callback([=] {
      const auto fk = chem::fingerprint_kind_from_string(*kind);
      std::ostringstream text;
      for (const auto& smiles : read_lines(*in)) {
        const auto fp = chem::fingerprint(chem::parse_smiles(smiles), fk);
        text << json{{"smiles", smiles}, {"kind", std::string(chem::to_string(fk))}, {"hex", fp.to_hex()}}.dump()
             << '\n';
      }
      emit(*out, text.str());
    });
  }
  // similarity
  {
    auto* cmd = app.add_subcommand("similarity", "Pairwise Tanimoto matrix for SMILES (one per line)");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>("ecfp4");
    cmd->add_option("--in", *in, "Text file with one SMILES per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--kind", *kind, "maccs, morgan or ecfp4")->check(CLI::IsMember({"maccs", "morgan", "ecfp4"}));
    cmd->add_option("--out", *out, "CSV output (stdout when omitted)");
    cmd->callback([=] {
      const auto fk = chem::fingerprint_kind_from_string(*kind);
      const auto smiles = read_lines(*in);
      std::vector<chem::Fingerprint> fps;
      for (const auto& s : smiles) fps.push_back(chem::fingerprint(chem::parse_smiles(s), fk));
      std::ostringstream text;
      csv::Row header{"smiles"};
      header.insert(header.end(), smiles.begin(), smiles.end());
      csv::write_row(text, header);
      for (std::size_t i = 0; i < fps.size(); ++i) {
        csv::Row row{smiles[i]};
        for (std::size_t j = 0; j < fps.size(); ++j) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6f", chem::tanimoto(fps[i], fps[j]));
          row.emplace_back(buf);
        }
        csv::write_row(text, row);
      }
      emit(*out, text.str());
    });
  }
  // embed-import
  {
    auto* cmd = app.add_subcommand("embed-import", "Validate embedding JSON lines and merge them into a store");
    auto in = std::make_shared<std::vector<std::string>>();
    auto store_path = std::make_shared<std::string>();
    auto manifest = std::make_shared<embedding::Manifest>();
    cmd->add_option("--in", *in, "Embedding JSONL file(s)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--store", *store_path, "Store to create or extend")->required();
    cmd->add_option("--protein-provider", manifest->protein_provider, "Protein embedder name for the manifest");
    cmd->add_option("--protein-version", manifest->protein_version, "Protein embedder version");
    cmd->add_option("--molecule-provider", manifest->molecule_provider, "Molecule embedder name");
    cmd->add_option("--molecule-version", manifest->molecule_version, "Molecule embedder version");
    cmd->callback([=] {
      auto store = fs::exists(*store_path) ? embedding::EmbeddingStore::load(*store_path) : embedding::EmbeddingStore{};
      const auto before = store.size();
      for (const auto& path : *in) {
        std::ifstream f(path);
        store.merge(embedding::EmbeddingStore::parse(f));
      }
      auto& m = store.manifest;
      if (!manifest->protein_provider.empty()) m.protein_provider = manifest->protein_provider;
      if (!manifest->protein_version.empty()) m.protein_version = manifest->protein_version;
      if (!manifest->molecule_provider.empty()) m.molecule_provider = manifest->molecule_provider;
      if (!manifest->molecule_version.empty()) m.molecule_version = manifest->molecule_version;
      store.save(*store_path);
      std::cerr << "store " << *store_path << ": " << store.size() << " vectors (" << store.size() - before
                << " new; protein " << store.count(embedding::EmbeddingKind::Protein) << ", molecule "
                << store.count(embedding::EmbeddingKind::Molecule) << ")\n";
    });
  }
  // train
  {
    auto* cmd = app.add_subcommand("train", "Run the seeded benchmark described by a plan");
    auto plan_path = std::make_shared<std::string>();
    cmd->add_option("--plan", *plan_path, "Experiment plan JSON")->required()->check(CLI::ExistingFile);
    cmd->callback([=, &common] {
      auto plan = plan_with_overrides(*plan_path, common);
      const auto corpus = experiments::load_corpus(plan);
      if (corpus.fallback_used) std::cerr << "warning: placeholder vectors used for missing embeddings\n";
      if (plan.search.trials > 0) {
        json report;
        plan.train = search_config(plan, corpus, plan.search.trials, &report);
        write_file((fs::path(plan.output_dir) / "search.json").string(), report.dump(2) + "\n");
      }
      auto table = experiments::run_benchmark(plan, corpus);
      for (const auto& b : plan.baselines) table.append(experiments::run_baseline(b, plan, corpus));
      experiments::write_results(table, plan.output_dir);
      print_table(table);
    });
  }
  // evaluate
  {
    auto* cmd = app.add_subcommand("evaluate", "Score a curated dataset with a checkpoint and report metrics");
    auto ckpt = std::make_shared<std::string>();
    auto dataset = std::make_shared<std::string>();
    auto store_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto fallback = std::make_shared<bool>(false);
    auto cutoff = std::make_shared<double>(curation::kDefaultCutoffNm);
    cmd->add_option("--checkpoint", *ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--dataset", *dataset, "Raw CSV or curated JSONL")->required()->check(CLI::ExistingFile);
    cmd->add_option("--embeddings", *store_path, "Embedding store")->check(CLI::ExistingFile);
    cmd->add_option("--cutoff-nm", *cutoff, "Activity cutoff in nM")->check(CLI::PositiveNumber);
    cmd->add_flag("--allow-fallback", *fallback, "Use placeholder vectors for missing embeddings");
    cmd->add_option("--out", *out, "Metrics JSON output (stdout when omitted)");
    cmd->callback([=] {
      const auto checkpoint = model::load_checkpoint(*ckpt);
      const auto curated = curation::curate(curation::load_records(*dataset), *cutoff);
      const auto store = load_store(*store_path);
      embedding::FeatureResolver resolver(store_path->empty() ? nullptr : &store, *fallback);
      const auto corpus = experiments::prepare_corpus(curated.records, resolver, checkpoint.ablated);
      std::vector<std::size_t> rows(corpus.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      const auto data = experiments::build_dataset(corpus, rows, checkpoint.scaler, checkpoint.ablated);
      std::vector<double> scores;
      for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        const Eigen::RowVectorXd row = data.x.row(i);
        scores.push_back(checkpoint.model.forward(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))));
      }
      emit(*out, metrics_json(metrics::evaluate(scores, data.y)));
    });
  }
  // cross-validate
  {
    auto* cmd = app.add_subcommand("cross-validate", "k-fold cross-validation over the whole corpus");
    auto plan_path = std::make_shared<std::string>();
    auto k = std::make_shared<std::size_t>(0);
    cmd->add_option("--plan", *plan_path, "Experiment plan JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--k", *k, "Fold count (overrides the plan)")->check(CLI::Range(2, 1000));
    cmd->callback([=, &common] {
      auto plan = plan_with_overrides(*plan_path, common);
      if (*k) plan.k_folds = *k;
      const auto corpus = experiments::load_corpus(plan);
      const auto table = experiments::cross_validate(plan, corpus);
      experiments::write_results(table, (fs::path(plan.output_dir) / "cv").string());
      print_table(table);
    });
  }
  // ablate
  {
    auto* cmd = app.add_subcommand("ablate", "Train one model per ablation variant");
    auto plan_path = std::make_shared<std::string>();
    cmd->add_option("--plan", *plan_path, "Experiment plan JSON")->required()->check(CLI::ExistingFile);
    cmd->callback([=, &common] {
      const auto plan = plan_with_overrides(*plan_path, common);
      const auto corpus = experiments::load_corpus(plan);
      const auto table = experiments::run_ablations(plan, corpus);
      const std::vector<std::string_view> cols{"MCC", "BA", "ACC", "AUC"};
      experiments::write_results(table, (fs::path(plan.output_dir) / "ablation").string(), cols);
      print_table(table, cols);
    });
  }
  // baseline
  {
    auto* cmd = app.add_subcommand("baseline", "Logistic regression / random forest on fingerprints");
    auto plan_path = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>();
    auto fp = std::make_shared<std::string>("morgan");
    cmd->add_option("--plan", *plan_path, "Experiment plan JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--kind", *kind, "LR or RF (default: the plan's baselines)")->check(CLI::IsMember({"LR", "RF"}));
    cmd->add_option("--fingerprint", *fp, "maccs, morgan or ecfp4")->check(CLI::IsMember({"maccs", "morgan", "ecfp4"}));
    cmd->callback([=, &common] {
      const auto plan = plan_with_overrides(*plan_path, common);
      std::vector<experiments::BaselineSpec> specs = plan.baselines;
      if (!kind->empty()) specs = {{*experiments::parse_baseline_kind(*kind), chem::fingerprint_kind_from_string(*fp)}};
      if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "no baselines in the plan; pass --kind");
      const auto corpus = experiments::load_corpus(plan);
      experiments::ResultTable table;
      for (const auto& s : specs) table.append(experiments::run_baseline(s, plan, corpus));
      experiments::write_results(table, (fs::path(plan.output_dir) / "baselines").string());
      print_table(table);
    });
  }
  // score-external
  {
    auto* cmd = app.add_subcommand("score-external", "Score an external set and report novelty against a corpus");
    auto ckpt = std::make_shared<std::string>();
    auto external = std::make_shared<std::string>();
    auto reference = std::make_shared<std::string>();
    auto store_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto fallback = std::make_shared<bool>(false);
    auto cutoff = std::make_shared<double>(curation::kDefaultCutoffNm);
    cmd->add_option("--checkpoint", *ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--external", *external, "External records (raw CSV or JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--reference", *reference, "Training corpus (raw CSV or JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--embeddings", *store_path, "Embedding store")->check(CLI::ExistingFile);
    cmd->add_option("--cutoff-nm", *cutoff, "Activity cutoff in nM")->check(CLI::PositiveNumber);
    cmd->add_flag("--allow-fallback", *fallback, "Use placeholder vectors for missing embeddings");
    cmd->add_option("--out", *out, "CSV report (stdout when omitted)");
    cmd->callback([=] {
      const auto checkpoint = model::load_checkpoint(*ckpt);
      const auto ext = curation::load_records(*external);
      const auto ref = curation::curate(curation::load_records(*reference), *cutoff).records;
      const auto store = load_store(*store_path);
      embedding::FeatureResolver resolver(store_path->empty() ? nullptr : &store, *fallback);
      const auto scores = experiments::score_external(ext, ref, checkpoint, resolver, *cutoff);
      emit(*out, experiments::external_report_csv(scores));
      std::size_t known = 0, correct = 0;
      for (const auto& s : scores) {
        if (!s.observed) continue;
        ++known;
        correct += *s.observed == s.predicted;
      }
      if (known) std::cerr << "accuracy on " << known << " labelled records: " << double(correct) / double(known) << '\n';
    });
  }
  // predict
  {
    auto* cmd = app.add_subcommand("predict", "Batch prediction for a CSV of conjugates");
    auto config = std::make_shared<service::ServiceConfig>();
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--checkpoint", config->checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--in", *in, "CSV: id,heavy_chain,light_chain,antigen,linker_smiles,payload_smiles,dar")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--embeddings", config->embeddings, "Embedding store")->check(CLI::ExistingFile);
    cmd->add_flag("--allow-fallback", config->allow_fallback, "Use placeholder vectors for missing embeddings");
    cmd->add_option("--out", *out, "CSV output (stdout when omitted)");
    cmd->callback([=] {
      const auto predictor = service::Predictor::from_config(*config);
      emit(*out, predictor.predict_batch_csv(read_file(*in)));
    });
  }
  // serve
  {
    auto* cmd = app.add_subcommand("serve", "Run the HTTP prediction service");
    auto config_path = std::make_shared<std::string>();
    auto port = std::make_shared<int>(-1);
    auto ckpt = std::make_shared<std::string>();
    cmd->add_option("--config", *config_path, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--port", *port, "Port (overrides config and environment)")->check(CLI::Range(0, 65535));
    cmd->add_option("--checkpoint", *ckpt, "Checkpoint (overrides config and environment)")->check(CLI::ExistingFile);
    cmd->callback([=] {
      auto config = config_path->empty() ? service::ServiceConfig{} : service::ServiceConfig::load(*config_path);
      config.apply_env();
      if (*port >= 0) config.port = *port;
      if (!ckpt->empty()) config.checkpoint = *ckpt;
      service::run_service(config);
    });
  }
  // hpo
  {
    auto* cmd = app.add_subcommand("hpo", "Random hyperparameter search on the first seed's split");
    auto plan_path = std::make_shared<std::string>();
    auto trials = std::make_shared<std::size_t>(20);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--plan", *plan_path, "Experiment plan JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--trials", *trials, "Number of configurations to try")->check(CLI::PositiveNumber);
    cmd->add_option("--out", *out, "Search report JSON (stdout when omitted)");
    cmd->callback([=, &common] {
      const auto plan = plan_with_overrides(*plan_path, common);
      const auto corpus = experiments::load_corpus(plan);
      json report;
      search_config(plan, corpus, *trials, &report);
      emit(*out, report.dump(2) + "\n");
    });
  }
  // synth
  {
    auto* cmd = app.add_subcommand("synth", "Write a synthetic raw corpus for smoke runs");
    auto out = std::make_shared<std::string>();
    auto config = std::make_shared<experiments::SyntheticConfig>();
    cmd->add_option("--out", *out, "Raw CSV output")->required();
    cmd->add_option("--records", config->records, "Record count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", config->seed, "Generator seed");
    cmd->callback([=] {
      std::ostringstream text;
      curation::write_raw_csv(text, experiments::generate_synthetic_corpus(*config));
      write_file(*out, text.str());
    });
  }
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"ADC activity prediction toolkit", "adcnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("adcnet ") + kVersion + " (checkpoint format " +
                                        std::to_string(model::kCheckpointFormatVersion) + ")");
  Common common;
  app.add_option("--jobs", common.jobs, "Worker threads for seeds, folds, trials and trees")
      ->check(CLI::PositiveNumber);
  add_subcommands(app, common);
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--jobs") {
      ++i;
      continue;
    }
    if (arg.rfind("-", 0) == 0) continue;
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known |= sub->get_name() == arg;
    if (!known) {
      std::cerr << "error: unknown subcommand '" << arg << "'\n" << app.help();
      return 2;
    }
    break;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    std::cerr << "Run 'adcnet" << (sub ? " " + sub->get_name() : std::string()) << " --help' for usage.\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace adcnet::cli
