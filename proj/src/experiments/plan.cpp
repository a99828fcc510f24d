#include "adcnet/experiments/plan.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adcnet/error.hpp"
#include "json.hpp"

namespace adcnet::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(BaselineKind kind) { return kind == BaselineKind::LR ? "LR" : "RF"; }

std::optional<BaselineKind> parse_baseline_kind(std::string_view text) {
  if (text == "LR" || text == "lr") return BaselineKind::LR;
  if (text == "RF" || text == "rf") return BaselineKind::RF;
  return std::nullopt;
}

namespace {

std::string_view fingerprint_tag(chem::FingerprintKind kind) {
  switch (kind) {
    case chem::FingerprintKind::Maccs166: return "MACCS";
    case chem::FingerprintKind::Morgan1024: return "Morgan";
    case chem::FingerprintKind::Ecfp4_2048: return "ECFP4";
  }
  return "";
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, "plan: " + what); }

BaselineSpec parse_baseline(const json& j) {
  BaselineSpec spec;
  std::string kind;
  std::string fp = "morgan";
  if (j.is_string()) {
    // "LR" or "LR-MACCS"
    const std::string s = j.get<std::string>();
    const auto dash = s.find('-');
    kind = s.substr(0, dash);
    if (dash != std::string::npos) fp = s.substr(dash + 1);
  } else if (j.is_object()) {
    kind = j.value("kind", "");
    fp = j.value("fingerprint", fp);
  } else {
    bad("baseline entries must be strings or objects");
  }
  const auto k = parse_baseline_kind(kind);
  if (!k) bad("unknown baseline '" + kind + "'");
  spec.kind = *k;
  spec.fingerprint = chem::fingerprint_kind_from_string(lower(fp));
  return spec;
}

embedding::ComponentSet parse_ablation(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "none" || s == "full") return {};
    return embedding::ComponentSet::parse(s);
  }
  if (!j.is_array()) bad("ablation entries must be strings or arrays");
  embedding::ComponentSet set;
  for (const auto& item : j) {
    const auto part = embedding::ComponentSet::parse(item.get<std::string>());
    for (auto c : embedding::kAllComponents) {
      if (part.contains(c)) set.insert(c);
    }
  }
  return set;
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty() || base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
T get_number(const json& j, const char* key) {
  if (!j.is_number()) bad(std::string(key) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer() || (j.is_number_integer() && j.get<long long>() < 0)) {
      bad(std::string(key) + " must be a non-negative integer");
    }
  }
  return j.get<T>();
}

void parse_train(const json& j, model::TrainConfig& c) {
  if (!j.is_object()) bad("train must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "max_epochs") c.max_epochs = get_number<std::size_t>(v, "max_epochs");
    else if (key == "patience") c.patience = get_number<std::size_t>(v, "patience");
    else if (key == "learning_rate") c.learning_rate = get_number<double>(v, "learning_rate");
    else if (key == "batch_size") c.batch_size = get_number<std::size_t>(v, "batch_size");
    else if (key == "hidden_dim") c.hidden_dim = get_number<std::size_t>(v, "hidden_dim");
    else if (key == "l2_penalty") c.l2_penalty = get_number<double>(v, "l2_penalty");
    else if (key == "leaky_slope") c.leaky_slope = get_number<double>(v, "leaky_slope");
    else bad("unknown train key '" + key + "'");
  }
}

}  // namespace

std::string BaselineSpec::name() const {
  return std::string(to_string(kind)) + "-" + std::string(fingerprint_tag(fingerprint));
}

void ExperimentPlan::validate() const {
  if (seeds.empty()) bad("seeds must be non-empty");
  if (!(cutoff_nm > 0.0)) bad("cutoff_nM must be positive");
  if (k_folds && *k_folds < 2) bad("k_folds must be at least 2");
  if (dataset.empty()) bad("dataset is required");
  if (jobs == 0) bad("jobs must be at least 1");
  train.validate();
}

std::vector<embedding::ComponentSet> default_ablations() {
  using embedding::Component;
  return {{},
          {Component::Antigen},
          {Component::Heavy, Component::Light},
          {Component::Linker},
          {Component::Payload},
          {Component::Dar}};
}

ExperimentPlan parse_plan(std::string_view json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("plan: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  ExperimentPlan plan;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "dataset") plan.dataset = v.get<std::string>();
      else if (key == "embeddings") plan.embeddings = v.is_null() ? "" : v.get<std::string>();
      else if (key == "allow_fallback") plan.allow_fallback = v.get<bool>();
      else if (key == "seeds") {
        plan.seeds.clear();
        for (const auto& s : v) plan.seeds.push_back(get_number<std::uint64_t>(s, "seeds"));
      } else if (key == "cutoff_nM" || key == "cutoff_nm") plan.cutoff_nm = get_number<double>(v, "cutoff_nM");
      else if (key == "ablations") {
        for (const auto& a : v) plan.ablations.push_back(parse_ablation(a));
      } else if (key == "baselines") {
        for (const auto& b : v) plan.baselines.push_back(parse_baseline(b));
      } else if (key == "k_folds") {
        if (!v.is_null()) plan.k_folds = get_number<std::size_t>(v, "k_folds");
      } else if (key == "output_dir") plan.output_dir = v.get<std::string>();
      else if (key == "model_name") plan.model_name = v.get<std::string>();
      else if (key == "train") parse_train(v, plan.train);
      else if (key == "search") {
        plan.search.trials = get_number<std::size_t>(v.value("trials", json(0)), "trials");
        plan.search.seed = get_number<std::uint64_t>(v.value("seed", json(0)), "seed");
      } else if (key == "jobs") plan.jobs = get_number<std::size_t>(v, "jobs");
      else bad("unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  plan.dataset = resolve_path(plan.dataset, base_dir);
  plan.embeddings = resolve_path(plan.embeddings, base_dir);
  plan.output_dir = resolve_path(plan.output_dir, base_dir);
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open plan " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan(text.str(), fs::path(path).parent_path().string());
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json j;
  j["dataset"] = plan.dataset;
  j["embeddings"] = plan.embeddings;
  j["allow_fallback"] = plan.allow_fallback;
  j["seeds"] = plan.seeds;
  j["cutoff_nM"] = plan.cutoff_nm;
  j["ablations"] = json::array();
  for (const auto& a : plan.ablations) j["ablations"].push_back(a.to_string());
  j["baselines"] = json::array();
  for (const auto& b : plan.baselines) j["baselines"].push_back(b.name());
  if (plan.k_folds) j["k_folds"] = *plan.k_folds;
  j["output_dir"] = plan.output_dir;
  j["model_name"] = plan.model_name;
  const auto& t = plan.train;
  j["train"] = {{"max_epochs", t.max_epochs},       {"patience", t.patience},   {"learning_rate", t.learning_rate},
                {"batch_size", t.batch_size},       {"hidden_dim", t.hidden_dim}, {"l2_penalty", t.l2_penalty},
                {"leaky_slope", t.leaky_slope}};
  j["search"] = {{"trials", plan.search.trials}, {"seed", plan.search.seed}};
  j["jobs"] = plan.jobs;
  return j.dump(2) + "\n";
}

std::string variant_name(const std::string& model_name, const embedding::ComponentSet& ablated) {
  using embedding::Component;
  if (ablated.empty()) return model_name;
  if (ablated == embedding::ComponentSet{Component::Heavy, Component::Light}) return "w/o antibody";
  return "w/o " + ablated.to_string();
}

}  // namespace adcnet::experiments
