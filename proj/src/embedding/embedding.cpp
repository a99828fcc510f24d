#include "adcnet/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "adcnet/error.hpp"
#include "adcnet/hashing.hpp"
#include "adcnet/random.hpp"
#include "json.hpp"

namespace adcnet::embedding {
namespace {

using nlohmann::json;

bool is_hex_key(std::string_view key) {
  return key.size() == 64 && std::all_of(key.begin(), key.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

std::string_view to_string(EmbeddingKind kind) {
  return kind == EmbeddingKind::Protein ? "protein" : "molecule";
}

std::optional<EmbeddingKind> parse_embedding_kind(std::string_view text) {
  if (text == "protein" || text == "Protein") return EmbeddingKind::Protein;
  if (text == "molecule" || text == "Molecule") return EmbeddingKind::Molecule;
  return std::nullopt;
}

std::size_t expected_dim(EmbeddingKind kind) {
  return kind == EmbeddingKind::Protein ? kProteinDim : kMoleculeDim;
}

std::string normalize_content(EmbeddingKind kind, std::string_view content) {
  std::string out;
  if (kind == EmbeddingKind::Protein) {
    for (char c : content) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
  }
  std::size_t b = 0;
  std::size_t e = content.size();
  while (b < e && std::isspace(static_cast<unsigned char>(content[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(content[e - 1]))) --e;
  return std::string(content.substr(b, e - b));
}

std::string content_key(EmbeddingKind kind, std::string_view content) {
  const std::string normalized = normalize_content(kind, content);
  if (normalized.empty()) {
    throw Error(ErrorCode::EmptyContent, std::string(to_string(kind)) + " content is empty");
  }
  return sha256_hex(normalized);
}

void validate(const EmbeddingRecord& record) {
  if (!is_hex_key(record.key)) {
    throw Error(ErrorCode::FormatError, "key '" + record.key + "' is not 64 lowercase hex characters");
  }
  if (record.values.size() != expected_dim(record.kind)) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(to_string(record.kind)) + " record " + record.key + " has dim " +
                    std::to_string(record.values.size()) + ", expected " +
                    std::to_string(expected_dim(record.kind)));
  }
  for (double v : record.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::FormatError, "record " + record.key + " has a non-finite value");
  }
}

std::string to_json_line(const EmbeddingRecord& record) {
  return json{{"key", record.key},
              {"kind", to_string(record.kind)},
              {"dim", record.values.size()},
              {"values", record.values}}
      .dump();
}

EmbeddingRecord embedding_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("key") || !j.contains("kind") || !j.contains("values") ||
      !j.at("key").is_string() || !j.at("kind").is_string() || !j.at("values").is_array()) {
    throw Error(ErrorCode::FormatError, "embedding record needs string key, kind and a values array");
  }
  EmbeddingRecord r;
  r.key = j.at("key").get<std::string>();
  const auto kind = parse_embedding_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::FormatError, "unknown kind '" + j.at("kind").get<std::string>() + "'");
  r.kind = *kind;
  r.values.reserve(j.at("values").size());
  for (const auto& v : j.at("values")) {
    if (!v.is_number()) throw Error(ErrorCode::FormatError, "non-numeric embedding value");
    r.values.push_back(v.get<double>());
  }
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_unsigned()) throw Error(ErrorCode::FormatError, "dim must be a count");
    if (j.at("dim").get<std::size_t>() != r.values.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "record " + r.key + " declares dim " + std::to_string(j.at("dim").get<std::size_t>()) +
                      " but has " + std::to_string(r.values.size()) + " values");
    }
  }
  validate(r);
  return r;
}

std::string manifest_path(const std::string& store_path) { return store_path + ".manifest.json"; }

std::optional<Manifest> read_manifest(const std::string& store_path) {
  std::ifstream in(manifest_path(store_path));
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    Manifest m;
    m.protein_provider = j.value("protein_provider", "");
    m.protein_version = j.value("protein_version", "");
    m.molecule_provider = j.value("molecule_provider", "");
    m.molecule_version = j.value("molecule_version", "");
    m.notes = j.value("notes", "");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, "invalid manifest: " + std::string(e.what()));
  }
}

void write_manifest(const std::string& store_path, const Manifest& m) {
  std::ofstream out(manifest_path(store_path));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + manifest_path(store_path));
  out << json{{"protein_provider", m.protein_provider},
              {"protein_version", m.protein_version},
              {"molecule_provider", m.molecule_provider},
              {"molecule_version", m.molecule_version},
              {"notes", m.notes}}
             .dump(2)
      << '\n';
}

void EmbeddingStore::add(EmbeddingRecord record) {
  validate(record);
  auto it = records_.find(record.key);
  if (it != records_.end()) {
    if (it->second != record) {
      throw Error(ErrorCode::ConflictingDuplicate, "key " + record.key + " appears with different vectors");
    }
    return;
  }
  std::string key = record.key;
  records_.emplace(std::move(key), std::move(record));
}

void EmbeddingStore::merge(const EmbeddingStore& other) {
  for (const auto& [key, record] : other.records_) add(record);
}

const EmbeddingRecord* EmbeddingStore::find(std::string_view key) const {
  auto it = records_.find(std::string(key));
  return it == records_.end() ? nullptr : &it->second;
}

const EmbeddingRecord* EmbeddingStore::find(EmbeddingKind kind, std::string_view content) const {
  const EmbeddingRecord* r = find(content_key(kind, content));
  return r && r->kind == kind ? r : nullptr;
}

std::size_t EmbeddingStore::count(EmbeddingKind kind) const {
  return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(),
                                                [&](const auto& kv) { return kv.second.kind == kind; }));
}

std::vector<const EmbeddingRecord*> EmbeddingStore::sorted() const {
  std::vector<const EmbeddingRecord*> out;
  out.reserve(records_.size());
  for (const auto& [key, record] : records_) out.push_back(&record);
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->key < b->key; });
  return out;
}

void EmbeddingStore::write_jsonl(std::ostream& out) const {
  for (const auto* r : sorted()) out << to_json_line(*r) << '\n';
}

void EmbeddingStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_jsonl(out);
  write_manifest(path, manifest);
}

EmbeddingStore EmbeddingStore::parse(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      store.add(embedding_from_json_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(number) + ": " + e.detail());
    }
  }
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open embedding store " + path);
  EmbeddingStore store = parse(in);
  if (auto m = read_manifest(path)) store.manifest = *m;
  return store;
}

DarScaler DarScaler::fit(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::DegenerateColumn, "need at least two DAR values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateColumn, "all DAR values are equal");
  DarScaler s;
  s.mean = mean;
  s.std = sd;
  s.z_max = 0.0;
  s.train_min = *std::min_element(values.begin(), values.end());
  s.train_max = *std::max_element(values.begin(), values.end());
  for (double v : values) s.z_max = std::max(s.z_max, std::abs((v - mean) / sd));
  return s;
}

double DarScaler::scale(double dar) const { return (dar - mean) / std / std::max(1.0, z_max); }

std::string_view to_string(Component c) {
  switch (c) {
    case Component::Linker: return "linker";
    case Component::Payload: return "payload";
    case Component::Heavy: return "heavy_chain";
    case Component::Light: return "light_chain";
    case Component::Antigen: return "antigen";
    case Component::Dar: return "dar";
  }
  return "?";
}

std::optional<Component> parse_component(std::string_view text) {
  for (Component c : kAllComponents)
    if (to_string(c) == text) return c;
  if (text == "heavy") return Component::Heavy;
  if (text == "light") return Component::Light;
  if (text == "linker_smiles") return Component::Linker;
  if (text == "payload_smiles") return Component::Payload;
  return std::nullopt;
}

std::size_t component_dim(Component c) {
  switch (c) {
    case Component::Linker:
    case Component::Payload: return kMoleculeDim;
    case Component::Heavy:
    case Component::Light:
    case Component::Antigen: return kProteinDim;
    case Component::Dar: return 1;
  }
  return 0;
}

std::optional<EmbeddingKind> component_kind(Component c) {
  switch (c) {
    case Component::Linker:
    case Component::Payload: return EmbeddingKind::Molecule;
    case Component::Dar: return std::nullopt;
    default: return EmbeddingKind::Protein;
  }
}

ComponentSet::ComponentSet(std::initializer_list<Component> items) {
  for (Component c : items) insert(c);
}

std::string ComponentSet::to_string() const {
  std::string out;
  for (Component c : kAllComponents) {
    if (!contains(c)) continue;
    if (!out.empty()) out += ",";
    out += embedding::to_string(c);
  }
  return out;
}

ComponentSet ComponentSet::parse(std::string_view text) {
  ComponentSet set;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (item.empty()) continue;
    if (item == "antibody") {
      set.insert(Component::Heavy);
      set.insert(Component::Light);
      continue;
    }
    const auto c = parse_component(item);
    if (!c) throw Error(ErrorCode::InvalidArgument, "unknown component '" + std::string(item) + "'");
    set.insert(*c);
  }
  return set;
}

std::vector<Slice> fused_layout(const ComponentSet& ablated) {
  std::vector<Slice> layout;
  std::size_t offset = 0;
  for (Component c : kAllComponents) {
    if (ablated.contains(c)) continue;
    layout.push_back({c, offset, component_dim(c)});
    offset += component_dim(c);
  }
  return layout;
}

std::size_t fused_dim(const ComponentSet& ablated) {
  std::size_t n = 0;
  for (const Slice& s : fused_layout(ablated)) n += s.dim;
  return n;
}

FusedFeature fuse(const ComponentVectors& parts, const ComponentSet& ablated) {
  FusedFeature out;
  out.layout = fused_layout(ablated);
  out.x.reserve(fused_dim(ablated));
  for (const Slice& s : out.layout) {
    std::span<const double> v;
    switch (s.component) {
      case Component::Linker: v = parts.linker; break;
      case Component::Payload: v = parts.payload; break;
      case Component::Heavy: v = parts.heavy; break;
      case Component::Light: v = parts.light; break;
      case Component::Antigen: v = parts.antigen; break;
      case Component::Dar: out.x.push_back(parts.dar_scaled); continue;
    }
    if (v.size() != s.dim) {
      throw Error(ErrorCode::DimensionMismatch, std::string(to_string(s.component)) + " vector has dim " +
                                                    std::to_string(v.size()) + ", expected " +
                                                    std::to_string(s.dim));
    }
    out.x.insert(out.x.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<double> fallback_featurizer(EmbeddingKind kind, std::string_view content, std::size_t dim) {
  const std::string key = content_key(kind, content);
  std::uint64_t seed = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    const char c = key[i];
    seed = seed << 4 | static_cast<std::uint64_t>(c <= '9' ? c - '0' : c - 'a' + 10);
  }
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint64_t draw = splitmix64(seed + i);
    out[i] = static_cast<double>(draw >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return out;
}

std::string_view to_string(VectorSource source) {
  switch (source) {
    case VectorSource::Store: return "store";
    case VectorSource::Provider: return "provider";
    case VectorSource::Fallback: return "fallback";
  }
  return "?";
}

void FeatureResolver::set_provider(EmbeddingKind kind, Provider provider) {
  providers_[kind] = std::move(provider);
}

FeatureResolver::Resolved FeatureResolver::resolve(Component component, const std::string& content) const {
  const auto kind = component_kind(component);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "dar has no embedding");
  if (normalize_content(*kind, content).empty()) {
    throw Error(ErrorCode::MissingEmbedding, std::string(to_string(component)) + ": content is empty");
  }
  if (store_) {
    if (const EmbeddingRecord* r = store_->find(*kind, content)) return {r->values, VectorSource::Store};
  }
  if (auto it = providers_.find(*kind); it != providers_.end() && it->second) {
    if (auto v = it->second(*kind, normalize_content(*kind, content))) {
      if (v->size() != expected_dim(*kind)) {
        throw Error(ErrorCode::DimensionMismatch, std::string(to_string(component)) +
                                                      ": provider returned dim " + std::to_string(v->size()));
      }
      return {std::move(*v), VectorSource::Provider};
    }
  }
  if (allow_fallback_) {
    return {fallback_featurizer(*kind, content, expected_dim(*kind)), VectorSource::Fallback};
  }
  throw Error(ErrorCode::MissingEmbedding, std::string(to_string(component)) + ": no " +
                                               std::string(to_string(*kind)) + " embedding for key " +
                                               content_key(*kind, content));
}

Featurized featurize(const AdcInput& input, const FeatureResolver& resolver, const DarScaler& scaler,
                     const ComponentSet& ablated) {
  Featurized out;
  std::vector<double> vectors[5];
  const std::pair<Component, const std::string*> items[5] = {
      {Component::Linker, &input.linker_smiles}, {Component::Payload, &input.payload_smiles},
      {Component::Heavy, &input.heavy_chain},    {Component::Light, &input.light_chain},
      {Component::Antigen, &input.antigen}};
  for (std::size_t i = 0; i < 5; ++i) {
    if (ablated.contains(items[i].first)) continue;
    auto resolved = resolver.resolve(items[i].first, *items[i].second);
    vectors[i] = std::move(resolved.values);
    out.sources.emplace_back(items[i].first, resolved.source);
  }
  ComponentVectors parts{vectors[0], vectors[1], vectors[2], vectors[3], vectors[4], scaler.scale(input.dar)};
  out.feature = fuse(parts, ablated);
  return out;
}

}  // namespace adcnet::embedding
