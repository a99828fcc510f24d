#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adcnet {

enum class ErrorCode {
  // curation
  MassConcentrationUnit,
  Unlabelable,
  TooFewRecords,
  // chem
  ParseError,
  KindMismatch,
  NonPositiveScore,
  EmptyList,
  EmptySequence,
  // embedding store
  EmptyContent,
  FormatError,
  DimensionMismatch,
  ConflictingDuplicate,
  DegenerateColumn,
  // model
  SingleClassValidation,
  IoError,
  VersionMismatch,
  CorruptChecksum,
  // metrics
  LengthMismatch,
  Empty,
  SingleClass,
  NoPositives,
  // experiments / service
  MissingEmbedding,
  InvalidSmiles,
  ModelNotLoaded,
  MalformedCsv,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every module. The code identifies the failure
/// class; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace adcnet
