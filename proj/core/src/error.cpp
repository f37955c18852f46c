#include "chis/error.hpp"

namespace chis {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::ConflictingQueryText: return "ConflictingQueryText";
    case ErrorCode::UnlabeledRecord: return "UnlabeledRecord";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::VocabNotFitted: return "VocabNotFitted";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::MissingStanceLabel: return "MissingStanceLabel";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> row) {
  std::string out(to_string(code));
  if (row) out += " (row " + std::to_string(*row) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row)
    : std::runtime_error(decorate(code, message, row)), code_(code), row_(row) {}

}  // namespace chis
