#include "adcnet/service/predictor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adcnet/chem/smiles.hpp"
#include "adcnet/csv.hpp"
#include "adcnet/hashing.hpp"
#include "json.hpp"

namespace adcnet::service {

using embedding::Component;
using nlohmann::json;

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view field_of(Component c) {
  switch (c) {
    case Component::Linker: return "linker_smiles";
    case Component::Payload: return "payload_smiles";
    case Component::Heavy: return "heavy_chain";
    case Component::Light: return "light_chain";
    case Component::Antigen: return "antigen";
    case Component::Dar: return "dar";
  }
  return "";
}

const std::string& content_of(const PredictRequest& r, Component c) {
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

void validate(const PredictRequest& r) {
  for (Component c : {Component::Heavy, Component::Light, Component::Antigen}) {
    const auto field = std::string(field_of(c));
    const auto seq = curation::normalize_sequence(content_of(r, c));
    if (seq.empty()) throw RequestError(ErrorCode::InvalidArgument, field, "must not be empty");
    if (!curation::is_valid_sequence(seq)) {
      throw RequestError(ErrorCode::InvalidArgument, field, "contains characters outside the amino-acid alphabet");
    }
  }
  for (Component c : {Component::Linker, Component::Payload}) {
    const auto field = std::string(field_of(c));
    const auto& smiles = content_of(r, c);
    if (smiles.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw RequestError(ErrorCode::InvalidArgument, field, "must not be empty");
    }
    try {
      chem::parse_smiles(smiles);
    } catch (const chem::SmilesParseError& e) {
      throw RequestError(ErrorCode::InvalidSmiles, field,
                         e.reason() + " at offset " + std::to_string(e.offset()), e.offset());
    }
  }
  if (!std::isfinite(r.dar) || r.dar < 0.0) {
    throw RequestError(ErrorCode::InvalidArgument, "dar", "must be a finite number >= 0");
  }
}

std::string require_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw RequestError(ErrorCode::InvalidArgument, key, "is required");
  if (!it->is_string()) throw RequestError(ErrorCode::InvalidArgument, key, "must be a string");
  return it->get<std::string>();
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSmiles:
    case ErrorCode::MissingEmbedding: return 422;
    case ErrorCode::ModelNotLoaded: return 503;
    case ErrorCode::InvalidArgument:
    case ErrorCode::FormatError:
    case ErrorCode::MalformedCsv:
    case ErrorCode::ParseError:
    case ErrorCode::EmptySequence:
    case ErrorCode::EmptyContent:
    case ErrorCode::DimensionMismatch: return 400;
    default: return 500;
  }
}

std::string error_json(const Error& e) {
  json err;
  err["code"] = std::string(to_string(e.code()));
  if (const auto* re = dynamic_cast<const RequestError*>(&e)) {
    err["field"] = re->field();
    err["message"] = re->message();
    if (re->offset()) err["offset"] = *re->offset();
  } else {
    err["field"] = "";
    err["message"] = e.detail();
  }
  return json{{"error", err}}.dump();
}

PredictRequest parse_predict_request(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw RequestError(ErrorCode::FormatError, "", std::string("request body is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw RequestError(ErrorCode::FormatError, "", "request body must be a JSON object");
  PredictRequest r;
  r.heavy_chain = require_string(j, "heavy_chain");
  r.light_chain = require_string(j, "light_chain");
  r.antigen = require_string(j, "antigen");
  r.linker_smiles = require_string(j, "linker_smiles");
  r.payload_smiles = require_string(j, "payload_smiles");
  const auto dar = j.find("dar");
  if (dar == j.end() || dar->is_null()) throw RequestError(ErrorCode::InvalidArgument, "dar", "is required");
  if (!dar->is_number()) throw RequestError(ErrorCode::InvalidArgument, "dar", "must be a number");
  r.dar = dar->get<double>();
  return r;
}

std::string to_json(const PredictResponse& response) {
  json j;
  j["score"] = response.score;
  j["label"] = std::string(curation::to_string(response.label));
  j["threshold"] = kLabelThreshold;
  j["model_version"] = response.model_version;
  j["warnings"] = response.warnings;
  json sources = json::object();
  for (const auto& [c, s] : response.sources) sources[std::string(field_of(c))] = std::string(embedding::to_string(s));
  j["sources"] = sources;
  return j.dump();
}

std::vector<DarReference> load_dar_reference(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open DAR reference " + path);
  csv::Table table(csv::read(in));
  const auto antibody = table.column("antibody");
  const auto lo = table.column("dar_min");
  const auto hi = table.column("dar_max");
  const auto note = table.column("note");
  if (!antibody || !lo || !hi) throw Error(ErrorCode::MalformedCsv, "DAR reference needs antibody,dar_min,dar_max");
  std::vector<DarReference> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    DarReference r;
    r.antibody = std::string(table.get(i, *antibody));
    try {
      r.dar_min = std::stod(std::string(table.get(i, *lo)));
      r.dar_max = std::stod(std::string(table.get(i, *hi)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedCsv, "DAR reference row " + std::to_string(i + 2) + ": bad number");
    }
    if (note) r.note = std::string(table.get(i, *note));
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_json(const std::vector<DarReference>& table) {
  json entries = json::array();
  for (const auto& r : table) {
    entries.push_back({{"antibody", r.antibody}, {"dar_min", r.dar_min}, {"dar_max", r.dar_max}, {"note", r.note}});
  }
  return json{{"entries", entries}}.dump();
}

Predictor::Predictor(model::Checkpoint checkpoint, std::string model_version, embedding::EmbeddingStore store,
                     bool allow_fallback)
    : checkpoint_(std::make_shared<const model::Checkpoint>(std::move(checkpoint))),
      version_(std::move(model_version)),
      store_(std::make_shared<const embedding::EmbeddingStore>(std::move(store))),
      resolver_(std::make_shared<embedding::FeatureResolver>(store_.get(), allow_fallback)) {}

Predictor Predictor::from_config(const ServiceConfig& config) {
  if (config.checkpoint.empty()) return Predictor();
  std::ifstream in(config.checkpoint, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open checkpoint " + config.checkpoint);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto checkpoint = model::deserialize(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
  const auto version = (checkpoint.model_name.empty() ? std::string("model") : checkpoint.model_name) + "-" +
                       sha256_hex(bytes).substr(0, 12);
  embedding::EmbeddingStore store;
  if (!config.embeddings.empty()) store = embedding::EmbeddingStore::load(config.embeddings);
  Predictor p(std::move(checkpoint), version, std::move(store), config.allow_fallback);
  if (!config.protein_provider.empty()) {
    p.set_provider(embedding::EmbeddingKind::Protein, make_provider(config.protein_provider));
  }
  if (!config.molecule_provider.empty()) {
    p.set_provider(embedding::EmbeddingKind::Molecule, make_provider(config.molecule_provider));
  }
  return p;
}

void Predictor::set_provider(embedding::EmbeddingKind kind, embedding::Provider provider) {
  if (!resolver_) throw Error(ErrorCode::ModelNotLoaded, "no checkpoint loaded");
  resolver_->set_provider(kind, std::move(provider));
}

const model::Checkpoint& Predictor::checkpoint() const {
  if (!checkpoint_) throw RequestError(ErrorCode::ModelNotLoaded, "", "no checkpoint loaded");
  return *checkpoint_;
}

embedding::Featurized Predictor::featurize(const PredictRequest& request) const {
  const auto& ckpt = checkpoint();
  validate(request);
  embedding::Featurized out;
  std::array<std::vector<double>, 5> vectors;
  for (Component c : embedding::kAllComponents) {
    if (c == Component::Dar || ckpt.ablated.contains(c)) continue;
    try {
      auto resolved = resolver_->resolve(c, content_of(request, c));
      vectors[static_cast<std::size_t>(c)] = std::move(resolved.values);
      out.sources.emplace_back(c, resolved.source);
    } catch (const RequestError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingEmbedding) throw;
      throw RequestError(ErrorCode::MissingEmbedding, std::string(field_of(c)), e.detail());
    }
  }
  auto span_of = [&](Component c) { return std::span<const double>(vectors[static_cast<std::size_t>(c)]); };
  embedding::ComponentVectors parts{span_of(Component::Linker), span_of(Component::Payload),
                                    span_of(Component::Heavy),  span_of(Component::Light),
                                    span_of(Component::Antigen), ckpt.scaler.scale(request.dar)};
  out.feature = embedding::fuse(parts, ckpt.ablated);
  return out;
}

PredictResponse Predictor::predict(const PredictRequest& request) const {
  const auto featurized = featurize(request);
  const auto& ckpt = checkpoint();
  PredictResponse response;
  response.score = ckpt.model.forward(featurized.feature.x);
  response.label = response.score >= kLabelThreshold ? curation::Label::Positive : curation::Label::Negative;
  response.model_version = version_;
  response.sources = featurized.sources;
  const auto& s = ckpt.scaler;
  if (request.dar < s.train_min || request.dar > s.train_max) {
    response.warnings.push_back("dar " + shortest(request.dar) + " is outside the training range [" +
                                shortest(s.train_min) + ", " + shortest(s.train_max) + "]");
  }
  for (const auto& [c, source] : featurized.sources) {
    if (source == embedding::VectorSource::Fallback) {
      response.warnings.push_back(std::string(field_of(c)) +
                                  ": no stored embedding, a deterministic placeholder vector was used");
    }
  }
  return response;
}

std::string Predictor::predict_batch_csv(std::string_view csv_text) const {
  auto rows = csv::parse(csv_text);
  while (!rows.empty() && rows.back().size() == 1 && rows.back()[0].empty()) rows.pop_back();
  if (rows.empty()) throw Error(ErrorCode::MalformedCsv, "missing header row");
  const csv::Row header = rows.front();
  static constexpr std::string_view kRequired[] = {"id",           "heavy_chain",    "light_chain", "antigen",
                                                   "linker_smiles", "payload_smiles", "dar"};
  std::array<std::size_t, 7> col{};
  for (std::size_t k = 0; k < 7; ++k) {
    const auto it = std::find(header.begin(), header.end(), kRequired[k]);
    if (it == header.end()) throw Error(ErrorCode::MalformedCsv, "header is missing column '" + std::string(kRequired[k]) + "'");
    col[k] = static_cast<std::size_t>(it - header.begin());
  }
  std::ostringstream out;
  csv::Row out_header = header;
  out_header.insert(out_header.end(), {"score", "label", "error"});
  csv::write_row(out, out_header);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    csv::Row row = rows[i];
    std::string score, label, error;
    try {
      if (row.size() != header.size()) {
        throw RequestError(ErrorCode::MalformedCsv, "",
                           "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(row.size()));
      }
      PredictRequest req{row[col[1]], row[col[2]], row[col[3]], row[col[4]], row[col[5]], 0.0};
      const std::string& dar_text = row[col[6]];
      const auto [ptr, ec] = std::from_chars(dar_text.data(), dar_text.data() + dar_text.size(), req.dar);
      if (dar_text.empty() || ec != std::errc() || ptr != dar_text.data() + dar_text.size()) {
        throw RequestError(ErrorCode::InvalidArgument, "dar", "'" + dar_text + "' is not a number");
      }
      const auto response = predict(req);
      score = shortest(response.score);
      label = std::string(curation::to_string(response.label));
    } catch (const Error& e) {
      error = e.what();
    }
    row.resize(header.size());
    row.insert(row.end(), {score, label, error});
    csv::write_row(out, row);
  }
  return out.str();
}

std::string Predictor::model_info_json() const {
  const auto& c = checkpoint();
  json j;
  j["version"] = version_;
  j["model_name"] = c.model_name;
  j["input_dim"] = c.model.in_dim();
  j["hidden_dim"] = c.model.hidden_dim();
  j["trained_at"] = c.trained_at;
  j["best_epoch"] = c.best_epoch;
  j["ablated"] = c.ablated.to_string();
  j["dar_range"] = {c.scaler.train_min, c.scaler.train_max};
  j["metrics"] = c.metrics;
  json layout = json::array();
  for (const auto& s : c.layout) {
    layout.push_back({{"component", std::string(embedding::to_string(s.component))}, {"offset", s.offset}, {"dim", s.dim}});
  }
  j["layout"] = layout;
  return j.dump();
}

}  // namespace adcnet::service
