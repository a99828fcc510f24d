#include "adcnet/error.hpp"

namespace adcnet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MassConcentrationUnit: return "MassConcentrationUnit";
    case ErrorCode::Unlabelable: return "Unlabelable";
    case ErrorCode::TooFewRecords: return "TooFewRecords";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::NonPositiveScore: return "NonPositiveScore";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::EmptyContent: return "EmptyContent";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConflictingDuplicate: return "ConflictingDuplicate";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::SingleClassValidation: return "SingleClassValidation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptChecksum: return "CorruptChecksum";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::InvalidSmiles: return "InvalidSmiles";
    case ErrorCode::ModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace adcnet
