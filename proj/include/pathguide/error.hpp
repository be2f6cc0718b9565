#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pathguide {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyQuestion,
  kTaggerFailure,
  kMissingSubstitution,
  kUnknownPlaceholder,
  kUnknownSkill,
  kTransportError,
  kBudgetExceeded,
  kReplayMiss,
  kStorageError,
  kProviderError,
  kNoCandidates,
  kUnparseableScore,
  kMissingScore,
  kUnparseableStrategy,
  kLengthMismatch,
  kEmptyAnswer,
  kEmptyCollection,
  kCorruptCollection,
  kSegmentNotInDocument,
  kTemplateSlotMissing,
  kEmptyReference,
  kZeroDenominator,
  kEmptyInput,
  kParseError,
  kValidationError,
  kUnmatchedQuestionId,
  kConfigError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library. The message carries optional stage
// labels ("answer/extract: ...") so pipeline errors read as a path.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& stage() const noexcept { return stage_; }

  // Returns a copy with `stage` prepended to the stage path.
  Error with_stage(std::string_view stage) const;

 private:
  Error(ErrorCode code, std::string detail, std::string stage);

  ErrorCode code_;
  std::string detail_;
  std::string stage_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace pathguide
