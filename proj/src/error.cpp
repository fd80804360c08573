#include "boxer/error.hpp"

namespace boxer {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::LabelOutOfVocabulary: return "LabelOutOfVocabulary";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DuplicateInstanceId: return "DuplicateInstanceId";
    case ErrorCode::UnknownClassifier: return "UnknownClassifier";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::UniverseMismatch: return "UniverseMismatch";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MissingSelection: return "MissingSelection";
    case ErrorCode::NonDecomposableMetric: return "NonDecomposableMetric";
    case ErrorCode::TooFewClassifiers: return "TooFewClassifiers";
    case ErrorCode::InvalidPage: return "InvalidPage";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UnknownView: return "UnknownView";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::InvalidSize: return "InvalidSize";
  }
  return "Unknown";
}

}  // namespace boxer
