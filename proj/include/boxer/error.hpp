#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boxer {

enum class ErrorCode {
  MissingFile,
  SchemaViolation,
  LabelOutOfVocabulary,
  LengthMismatch,
  DuplicateInstanceId,
  UnknownClassifier,
  UnknownFeature,
  UnknownLabel,
  UnknownCategory,
  UniverseMismatch,
  InvalidQuery,
  ParseError,
  IndexOutOfRange,
  MissingSelection,
  NonDecomposableMetric,
  TooFewClassifiers,
  InvalidPage,
  InvalidParameter,
  UnknownView,
  UnknownDataset,
  UnknownSession,
  InvalidSize,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the engine. `detail_path` names the offending
/// field (e.g. `features[2].kind` or `data.csv:14`) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail_path = {})
      : std::runtime_error(message), code_(code), detail_path_(std::move(detail_path)) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }
  const std::string& detail_path() const noexcept { return detail_path_; }

 private:
  ErrorCode code_;
  std::string detail_path_;
};

}  // namespace boxer
