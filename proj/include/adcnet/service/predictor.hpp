#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adcnet/curation.hpp"
#include "adcnet/embedding.hpp"
#include "adcnet/error.hpp"
#include "adcnet/model/checkpoint.hpp"
#include "adcnet/service/config.hpp"

namespace adcnet::service {

struct PredictRequest {
  std::string heavy_chain;
  std::string light_chain;
  std::string antigen;
  std::string linker_smiles;
  std::string payload_smiles;
  double dar = 0.0;
};

struct PredictResponse {
  double score = 0.0;
  curation::Label label = curation::Label::Negative;
  std::string model_version;
  std::vector<std::string> warnings;
  std::vector<std::pair<embedding::Component, embedding::VectorSource>> sources;
};

constexpr double kLabelThreshold = 0.5;

/// Error tied to one request field ("" when it concerns the whole request).
class RequestError : public Error {
 public:
  RequestError(ErrorCode code, std::string field, const std::string& message,
               std::optional<std::size_t> offset = std::nullopt)
      : Error(code, field.empty() ? message : field + ": " + message),
        field_(std::move(field)),
        message_(message),
        offset_(offset) {}
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  std::string field_;
  std::string message_;
  std::optional<std::size_t> offset_;
};

/// 422 for InvalidSmiles and MissingEmbedding, 503 for ModelNotLoaded,
/// 400 for other request problems and 500 otherwise.
int http_status(ErrorCode code);

/// {"error": {"code", "field", "message"[, "offset"]}}
std::string error_json(const Error& e);

PredictRequest parse_predict_request(std::string_view json_text);
std::string to_json(const PredictResponse& response);

/// Antibody-specific DAR ranges served to the UI; user supplied, may be empty.
struct DarReference {
  std::string antibody;
  double dar_min = 0.0;
  double dar_max = 0.0;
  std::string note;
};
std::vector<DarReference> load_dar_reference(const std::string& path);
std::string to_json(const std::vector<DarReference>& table);

/// Builds a provider from a config value (URL or cmd:...). Empty spec gives
/// an empty function.
embedding::Provider make_provider(const std::string& spec);

/// Immutable prediction state shared by all request handlers.
class Predictor {
 public:
  /// No model: every prediction fails with ModelNotLoaded.
  Predictor() = default;
  Predictor(model::Checkpoint checkpoint, std::string model_version, embedding::EmbeddingStore store,
            bool allow_fallback);
  static Predictor from_config(const ServiceConfig& config);

  void set_provider(embedding::EmbeddingKind kind, embedding::Provider provider);

  bool loaded() const { return checkpoint_ != nullptr; }
  const model::Checkpoint& checkpoint() const;
  const std::string& model_version() const { return version_; }

  /// Validates, resolves, scales, fuses and runs the model's forward pass.
  /// Throws RequestError.
  PredictResponse predict(const PredictRequest& request) const;

  /// Featurized vector exactly as predict() sees it.
  embedding::Featurized featurize(const PredictRequest& request) const;

  /// Batch CSV in, same rows plus score,label,error out. Throws
  /// Error(MalformedCsv) only for header or quoting problems.
  std::string predict_batch_csv(std::string_view csv_text) const;

  std::string model_info_json() const;

 private:
  std::shared_ptr<const model::Checkpoint> checkpoint_;
  std::string version_;
  std::shared_ptr<const embedding::EmbeddingStore> store_;
  std::shared_ptr<embedding::FeatureResolver> resolver_;
};

}  // namespace adcnet::service
