#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adcnet::embedding {

enum class EmbeddingKind { Protein, Molecule };

constexpr std::size_t kProteinDim = 1280;
constexpr std::size_t kMoleculeDim = 256;

std::string_view to_string(EmbeddingKind kind);  // "protein" / "molecule"
std::optional<EmbeddingKind> parse_embedding_kind(std::string_view text);
std::size_t expected_dim(EmbeddingKind kind);

/// Protein: uppercase with all whitespace removed. Molecule: trimmed.
std::string normalize_content(EmbeddingKind kind, std::string_view content);
/// Lowercase hex SHA-256 of the normalized content. Throws EmptyContent.
std::string content_key(EmbeddingKind kind, std::string_view content);

struct EmbeddingRecord {
  std::string key;
  EmbeddingKind kind = EmbeddingKind::Protein;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingRecord&) const = default;
};

/// Validates key shape, dimension and finiteness. Throws FormatError or
/// DimensionMismatch.
void validate(const EmbeddingRecord& record);

std::string to_json_line(const EmbeddingRecord& record);
EmbeddingRecord embedding_from_json_line(std::string_view line);

/// Free-text provenance of the vectors in a store file.
struct Manifest {
  std::string protein_provider;
  std::string protein_version;
  std::string molecule_provider;
  std::string molecule_version;
  std::string notes;

  bool operator==(const Manifest&) const = default;
};

std::string manifest_path(const std::string& store_path);
std::optional<Manifest> read_manifest(const std::string& store_path);
void write_manifest(const std::string& store_path, const Manifest& manifest);

class EmbeddingStore {
 public:
  /// Throws DimensionMismatch / FormatError on an invalid record and
  /// ConflictingDuplicate when the key exists with a different vector.
  void add(EmbeddingRecord record);
  void merge(const EmbeddingStore& other);

  const EmbeddingRecord* find(std::string_view key) const;
  const EmbeddingRecord* find(EmbeddingKind kind, std::string_view content) const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t count(EmbeddingKind kind) const;

  /// Records sorted by key.
  std::vector<const EmbeddingRecord*> sorted() const;
  void write_jsonl(std::ostream& out) const;
  void save(const std::string& path) const;

  /// Errors carry the 1-based line number.
  static EmbeddingStore parse(std::istream& in);
  static EmbeddingStore load(const std::string& path);

  Manifest manifest;

 private:
  std::unordered_map<std::string, EmbeddingRecord> records_;
};

/// Standardization then division by the largest absolute standardized
/// training value, so the training column lands in [-1, 1].
struct DarScaler {
  double mean = 0.0;
  double std = 1.0;
  double z_max = 1.0;
  double train_min = 0.0;
  double train_max = 0.0;

  /// Population standard deviation. Throws DegenerateColumn when every value
  /// is equal (or fewer than two values are given).
  static DarScaler fit(std::span<const double> training_dars);
  double scale(double dar) const;
  bool operator==(const DarScaler&) const = default;
};

enum class Component { Linker, Payload, Heavy, Light, Antigen, Dar };
constexpr std::array<Component, 6> kAllComponents{Component::Linker, Component::Payload,
                                                  Component::Heavy,  Component::Light,
                                                  Component::Antigen, Component::Dar};

std::string_view to_string(Component c);  // linker, payload, heavy_chain, light_chain, antigen, dar
std::optional<Component> parse_component(std::string_view text);
std::size_t component_dim(Component c);
/// Embedding kind for vector components; nullopt for Dar.
std::optional<EmbeddingKind> component_kind(Component c);

/// Set of components, used for ablation.
class ComponentSet {
 public:
  ComponentSet() = default;
  ComponentSet(std::initializer_list<Component> items);
  void insert(Component c) { bits_ |= bit(c); }
  bool contains(Component c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::uint8_t bits() const { return bits_; }
  /// Comma separated component names, "" when empty.
  std::string to_string() const;
  /// Accepts comma separated names; "antibody" means heavy and light chain.
  static ComponentSet parse(std::string_view text);
  bool operator==(const ComponentSet&) const = default;

 private:
  static std::uint8_t bit(Component c) { return static_cast<std::uint8_t>(1u << static_cast<int>(c)); }
  std::uint8_t bits_ = 0;
};

struct Slice {
  Component component;
  std::size_t offset;
  std::size_t dim;
  bool operator==(const Slice&) const = default;
};

struct FusedFeature {
  std::vector<double> x;
  std::vector<Slice> layout;
};

/// Layout for the given ablation, in the fixed order linker, payload, heavy,
/// light, antigen, dar.
std::vector<Slice> fused_layout(const ComponentSet& ablated);
std::size_t fused_dim(const ComponentSet& ablated);

struct ComponentVectors {
  std::span<const double> linker;
  std::span<const double> payload;
  std::span<const double> heavy;
  std::span<const double> light;
  std::span<const double> antigen;
  double dar_scaled = 0.0;
};

/// Throws DimensionMismatch when a present component has the wrong length.
FusedFeature fuse(const ComponentVectors& parts, const ComponentSet& ablated = {});

/// Deterministic, non-scientific stand-in vector seeded from the content key,
/// values uniform in [-1, 1]. Throws EmptyContent.
std::vector<double> fallback_featurizer(EmbeddingKind kind, std::string_view content, std::size_t dim);

enum class VectorSource { Store, Provider, Fallback };
std::string_view to_string(VectorSource source);

/// External embedder hook: returns a vector for the content or nullopt.
using Provider = std::function<std::optional<std::vector<double>>(EmbeddingKind, const std::string&)>;

/// Looks a component's content up in the store, then the provider for its
/// kind, then (when allowed) the fallback featurizer. Throws
/// Error(MissingEmbedding) naming the component when nothing supplies it.
class FeatureResolver {
 public:
  FeatureResolver(const EmbeddingStore* store, bool allow_fallback)
      : store_(store), allow_fallback_(allow_fallback) {}
  void set_provider(EmbeddingKind kind, Provider provider);

  struct Resolved {
    std::vector<double> values;
    VectorSource source;
  };
  Resolved resolve(Component component, const std::string& content) const;

 private:
  const EmbeddingStore* store_;
  bool allow_fallback_;
  std::map<EmbeddingKind, Provider> providers_;
};

/// The five component strings and DAR of one conjugate.
struct AdcInput {
  std::string heavy_chain;
  std::string light_chain;
  std::string antigen;
  std::string linker_smiles;
  std::string payload_smiles;
  double dar = 0.0;
};

struct Featurized {
  FusedFeature feature;
  std::vector<std::pair<Component, VectorSource>> sources;  // vector components only
};

Featurized featurize(const AdcInput& input, const FeatureResolver& resolver, const DarScaler& scaler,
                     const ComponentSet& ablated = {});

}  // namespace adcnet::embedding
