#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pathguide/answerer.hpp"
#include "pathguide/provider.hpp"

namespace pathguide {

// Longest common subsequence length of two token sequences.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Whole-string LCS F1 (beta = 1) over text::normalized_words tokens.
// Throws kEmptyReference when the reference has no tokens.
double rouge_l(std::string_view candidate, std::string_view reference);

// Lowercase, trim, collapse whitespace, drop the articles a/an/the and any
// terminal punctuation.
std::string normalize_answer(std::string_view s);

// 1 when the normalized prediction equals any normalized gold answer.
// Throws kEmptyInput for an empty gold list.
int exact_match(std::string_view prediction, const std::vector<std::string>& gold_answers);

struct SupportSets {
  std::set<SentenceRef> cited;  // P_q
  std::set<SentenceRef> gold;   // G_q
};

enum class ErrorFormula {
  kLiteral,  // sum 1[P not subset G] / sum (1[P superset G] + 1[P not subset G])
  kFdr,      // sum |P \ G| / sum |P| over cited sentences
};

struct HitsError {
  double hits = 0.0;
  std::optional<double> error;  // nullopt when the denominator is zero
  std::size_t questions = 0;
  double error_numerator = 0.0;
  double error_denominator = 0.0;
};

// Hits = sum 1[P superset G] / |Q|. Throws kEmptyInput for no records.
HitsError hits_and_error(std::span<const SupportSets> records,
                         ErrorFormula formula = ErrorFormula::kLiteral);

// Throws kZeroDenominator when Error is undefined.
double error_value(const HitsError& he);

// Document sentence j counts as cited when some sentence of `model_text`
// contains at least `threshold` of j's distinct normalized tokens.
std::set<SentenceRef> attribute_citations(std::string_view model_text, const DocumentSet& docs,
                                          double threshold = 0.8);

// Repair-cue list, loaded from a versioned JSON file
// ({"version": 1, "cues": [...]}).
struct RetraceConfig {
  int version = 0;
  std::vector<std::string> cues;  // lowercase

  static const RetraceConfig& bundled();
  static RetraceConfig parse(std::string_view json_text);
  static RetraceConfig load(const std::filesystem::path& path);
};

struct AnswerSpan {
  std::size_t begin = 0;  // offset of the marker
  std::size_t end = 0;    // offset just past the span
  std::string text;
};

// Provisional answers stated in a reasoning chain: "the answer is X",
// "answer: X" and "<answer>X</answer>", in text order.
std::vector<AnswerSpan> answer_spans(std::string_view chain);

// True when <answer> appears more than once, or when a repair cue is
// followed by an answer span that differs from the last span before it.
bool detect_retrace(std::string_view chain, const RetraceConfig& config = RetraceConfig::bundled());

// Mean of the flags. Throws kEmptyInput.
double retrace_rate(const std::vector<bool>& flags);

struct TokenStats {
  double token_mean = 0.0;
  double time_mean_ms = 0.0;
  std::size_t n = 0;
};

struct UsageSample {
  TokenUsage usage;
  double latency_ms = 0.0;
};

// Throws kEmptyInput.
TokenStats token_stats(std::span<const UsageSample> samples);

// (baseline - mean) / baseline. Throws kInvalidArgument for baseline <= 0.
double reduction_vs(double mean, double baseline);

struct EvalRecord {
  std::string question_id;
  std::string prediction;
  std::vector<std::string> gold_answers;
  std::set<SentenceRef> cited_sentences;
  std::optional<std::set<SentenceRef>> gold_sentences;
  std::string chain_text;
  TokenUsage usage;
  double latency_ms = 0.0;
};

struct RecordMetrics {
  std::string question_id;
  double rouge_l = 0.0;  // best over gold answers
  int em = 0;
  std::optional<bool> hit;       // P superset G
  std::optional<bool> spurious;  // P not subset G
  bool retrace = false;
  std::int64_t total_tokens = 0;
  double latency_ms = 0.0;
};

struct EvalReport {
  std::size_t n = 0;
  double rouge_l_mean = 0.0;
  double em_mean = 0.0;
  std::optional<HitsError> support;  // absent when no record has gold sentences
  ErrorFormula error_formula = ErrorFormula::kLiteral;
  double retrace_rate = 0.0;
  double token_mean = 0.0;
  double time_mean_ms = 0.0;
  std::optional<double> baseline_token_mean;
  std::optional<double> reduction;
  std::vector<RecordMetrics> records;
};

struct EvalOptions {
  ErrorFormula error_formula = ErrorFormula::kLiteral;
  const RetraceConfig* retrace = nullptr;  // bundled when null
  std::optional<double> baseline_token_mean;
};

// Throws kEmptyInput for no records, kValidationError for a record without
// gold answers.
EvalReport evaluate(const std::vector<EvalRecord>& records, const EvalOptions& options = {});

// Undefined Error is written as the string "undefined".
nlohmann::ordered_json report_to_json(const EvalReport& report);
// Tab-separated per-record table with a header row.
std::string records_to_tsv(const EvalReport& report);
// Human-readable block printed by the CLI.
std::string report_summary(const EvalReport& report);

}  // namespace pathguide
