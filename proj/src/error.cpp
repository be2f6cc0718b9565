#include "pathguide/error.hpp"

#include <utility>

namespace pathguide {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyQuestion: return "EmptyQuestion";
    case ErrorCode::kTaggerFailure: return "TaggerFailure";
    case ErrorCode::kMissingSubstitution: return "MissingSubstitution";
    case ErrorCode::kUnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::kUnknownSkill: return "UnknownSkill";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kReplayMiss: return "ReplayMiss";
    case ErrorCode::kStorageError: return "StorageError";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kUnparseableScore: return "UnparseableScore";
    case ErrorCode::kMissingScore: return "MissingScore";
    case ErrorCode::kUnparseableStrategy: return "UnparseableStrategy";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyAnswer: return "EmptyAnswer";
    case ErrorCode::kEmptyCollection: return "EmptyCollection";
    case ErrorCode::kCorruptCollection: return "CorruptCollection";
    case ErrorCode::kSegmentNotInDocument: return "SegmentNotInDocument";
    case ErrorCode::kTemplateSlotMissing: return "TemplateSlotMissing";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kUnmatchedQuestionId: return "UnmatchedQuestionId";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail,
                    const std::string& stage) {
  std::string out(error_code_name(code));
  if (!stage.empty()) out += " [" + stage + "]";
  out += ": ";
  out += detail;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : Error(code, message, std::string{}) {}

Error::Error(ErrorCode code, std::string detail, std::string stage)
    : std::runtime_error(compose(code, detail, stage)),
      code_(code),
      detail_(std::move(detail)),
      stage_(std::move(stage)) {}

Error Error::with_stage(std::string_view stage) const {
  std::string path(stage);
  if (!stage_.empty()) path += "/" + stage_;
  return Error(code_, detail_, std::move(path));
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pathguide
