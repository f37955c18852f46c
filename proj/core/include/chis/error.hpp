#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chis {

enum class ErrorCode {
  InvalidArgument,
  Io,
  // corpus
  MissingColumn,
  BadLabel,
  EmptyText,
  MalformedCsv,
  ConflictingQueryText,
  UnlabeledRecord,
  // lexicons
  MalformedLine,
  ScoreOutOfRange,
  // features
  EmptyCorpus,
  VocabNotFitted,
  // svm
  DimensionMismatch,
  SingleClassInput,
  NonFinite,
  VersionMismatch,
  CorruptModel,
  SchemaMismatch,
  // pipeline
  MissingStanceLabel,
  AlignmentError,
  LengthMismatch,
  EmptyInput,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported as a chis::Error. `row()` carries the
/// 1-based data row or line number for file-format errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace chis
