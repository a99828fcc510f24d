#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adcnet/cli.hpp"
#include "adcnet/curation.hpp"
#include "adcnet/experiments/synthetic.hpp"
#include "adcnet/model/checkpoint.hpp"

using adcnet::cli::dispatch;
namespace fs = std::filesystem;

namespace {

fs::path workspace(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("adcnet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(dispatch({"adcnet"}), 2);
  EXPECT_EQ(dispatch({"adcnet", "frobnicate"}), 2);
  EXPECT_EQ(dispatch({"adcnet", "curate", "--in", "/no/such/file.csv", "--out", "x"}), 2);
  EXPECT_EQ(dispatch({"adcnet", "curate", "--bogus"}), 2);
  EXPECT_EQ(dispatch({"adcnet", "--version"}), 0);
}

TEST(Cli, CurateWritesDatasetAndReport) {
  const auto dir = workspace("curate");
  const auto raw = dir / "raw.csv";
  ASSERT_EQ(dispatch({"adcnet", "synth", "--out", raw.string(), "--records", "40"}), 0);
  const auto out = dir / "data.jsonl";
  const auto report = dir / "report.txt";
  ASSERT_EQ(dispatch({"adcnet", "curate", "--in", raw.string(), "--out", out.string(), "--cutoff-nm", "1000",
                      "--report", report.string()}),
            0);
  const auto records = adcnet::curation::read_curated_jsonl_file(out.string());
  EXPECT_EQ(records.size(), 40u);
  EXPECT_NE(slurp(report).find("cutoff_nM: 1000"), std::string::npos);
  const auto first = slurp(out);
  ASSERT_EQ(dispatch({"adcnet", "curate", "--in", raw.string(), "--out", out.string(), "--cutoff-nm", "1000",
                      "--report", report.string()}),
            0);
  EXPECT_EQ(slurp(out), first);
}

TEST(Cli, DomainErrorsExitOne) {
  const auto dir = workspace("domain");
  std::ofstream(dir / "raw.csv") << "id,heavy_chain\n1,EVQL\n";
  EXPECT_EQ(dispatch({"adcnet", "curate", "--in", (dir / "raw.csv").string(), "--out", (dir / "o.jsonl").string()}),
            1);
  std::ofstream(dir / "plan.json") << R"({"dataset": "missing.csv"})";
  EXPECT_EQ(dispatch({"adcnet", "train", "--plan", (dir / "plan.json").string()}), 1);
}

TEST(Cli, FeaturizeAndSimilarity) {
  const auto dir = workspace("chem");
  std::ofstream(dir / "smi.txt") << "CCO\nc1ccccc1O\n";
  ASSERT_EQ(dispatch({"adcnet", "featurize", "--in", (dir / "smi.txt").string(), "--kind", "morgan", "--out",
                      (dir / "fp.jsonl").string()}),
            0);
  const auto fp = slurp(dir / "fp.jsonl");
  EXPECT_EQ(std::count(fp.begin(), fp.end(), '\n'), 2);
  EXPECT_NE(fp.find("\"kind\":\"Morgan1024\""), std::string::npos);
  ASSERT_EQ(dispatch({"adcnet", "similarity", "--in", (dir / "smi.txt").string(), "--out",
                      (dir / "sim.csv").string()}),
            0);
  const auto sim = slurp(dir / "sim.csv");
  EXPECT_NE(sim.find("CCO,1.000000,"), std::string::npos);
  std::ofstream(dir / "bad.txt") << "C1CC\n";
  EXPECT_EQ(dispatch({"adcnet", "featurize", "--in", (dir / "bad.txt").string()}), 1);
}

TEST(Cli, TrainPredictAndEvaluateFromPlan) {
  const auto dir = workspace("train");
  ASSERT_EQ(dispatch({"adcnet", "synth", "--out", (dir / "raw.csv").string(), "--records", "80"}), 0);
  std::ofstream(dir / "plan.json") << R"({"dataset": "raw.csv", "allow_fallback": true, "seeds": [1],
    "output_dir": "out", "baselines": ["LR"], "train": {"hidden_dim": 8, "max_epochs": 5, "patience": 5}})";
  ASSERT_EQ(dispatch({"adcnet", "--jobs", "2", "train", "--plan", (dir / "plan.json").string()}), 0);
  const auto results = slurp(dir / "out" / "results.csv");
  EXPECT_NE(results.find("\nADCNet,1,"), std::string::npos);
  EXPECT_NE(results.find("\nLR-Morgan,1,"), std::string::npos);
  ASSERT_TRUE(fs::exists(dir / "out" / "splits" / "1.json"));
  const auto ckpt = dir / "out" / "checkpoints" / "ADCNet_seed1.adcn";
  ASSERT_TRUE(fs::exists(ckpt));

  ASSERT_EQ(dispatch({"adcnet", "train", "--plan", (dir / "plan.json").string()}), 0);
  EXPECT_EQ(slurp(dir / "out" / "results.csv"), results);

  ASSERT_EQ(dispatch({"adcnet", "evaluate", "--checkpoint", ckpt.string(), "--dataset", (dir / "raw.csv").string(),
                      "--allow-fallback", "--out", (dir / "metrics.json").string()}),
            0);
  EXPECT_NE(slurp(dir / "metrics.json").find("\"AUC\""), std::string::npos);
  EXPECT_EQ(dispatch({"adcnet", "evaluate", "--checkpoint", ckpt.string(), "--dataset", (dir / "raw.csv").string()}),
            1);

  std::ofstream(dir / "batch.csv") << "id,heavy_chain,light_chain,antigen,linker_smiles,payload_smiles,dar\n";
  ASSERT_EQ(dispatch({"adcnet", "predict", "--checkpoint", ckpt.string(), "--in", (dir / "batch.csv").string(),
                      "--out", (dir / "scored.csv").string()}),
            0);
  EXPECT_EQ(slurp(dir / "scored.csv"),
            "id,heavy_chain,light_chain,antigen,linker_smiles,payload_smiles,dar,score,label,error\n");

  ASSERT_EQ(dispatch({"adcnet", "score-external", "--checkpoint", ckpt.string(), "--external",
                      (dir / "raw.csv").string(), "--reference", (dir / "raw.csv").string(), "--allow-fallback",
                      "--out", (dir / "external.csv").string()}),
            0);
  const auto ext = slurp(dir / "external.csv");
  EXPECT_EQ(std::count(ext.begin(), ext.end(), '\n'), 81);
}

TEST(Cli, EmbedImportBuildsStoreWithManifest) {
  const auto dir = workspace("embed");
  const auto key = adcnet::embedding::content_key(adcnet::embedding::EmbeddingKind::Molecule, "CCO");
  const auto values = adcnet::embedding::fallback_featurizer(adcnet::embedding::EmbeddingKind::Molecule, "CCO", 256);
  std::ofstream(dir / "vec.jsonl") << adcnet::embedding::to_json_line(
                                          {key, adcnet::embedding::EmbeddingKind::Molecule, values})
                                   << '\n';
  const auto store = dir / "store.jsonl";
  ASSERT_EQ(dispatch({"adcnet", "embed-import", "--in", (dir / "vec.jsonl").string(), "--store", store.string(),
                      "--molecule-provider", "mol-embedder", "--molecule-version", "1.2"}),
            0);
  const auto loaded = adcnet::embedding::EmbeddingStore::load(store.string());
  EXPECT_EQ(loaded.size(), 1u);
  EXPECT_EQ(loaded.manifest.molecule_provider, "mol-embedder");
  ASSERT_EQ(dispatch({"adcnet", "embed-import", "--in", (dir / "vec.jsonl").string(), "--store", store.string()}), 0);
  EXPECT_EQ(adcnet::embedding::EmbeddingStore::load(store.string()).manifest.molecule_version, "1.2");

  std::ofstream(dir / "short.jsonl") << R"({"key":")" << key << R"(","kind":"molecule","values":[1,2]})" << '\n';
  EXPECT_EQ(dispatch({"adcnet", "embed-import", "--in", (dir / "short.jsonl").string(), "--store", store.string()}),
            1);
}
