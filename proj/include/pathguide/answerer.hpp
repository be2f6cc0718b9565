#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pathguide/collection.hpp"
#include "pathguide/matcher.hpp"
#include "pathguide/prompts.hpp"
#include "pathguide/provider.hpp"

namespace pathguide {

// (document index, sentence index), both zero-based.
using SentenceRef = std::pair<std::size_t, std::size_t>;

// Sentence segmentation shared by extraction, corpus validation and
// citation attribution.
class DocumentSet {
 public:
  explicit DocumentSet(std::vector<std::string> documents);

  const std::vector<std::string>& documents() const noexcept { return documents_; }
  const std::vector<std::vector<std::string>>& sentences() const noexcept { return sentences_; }
  const std::string& sentence(SentenceRef ref) const { return sentences_[ref.first][ref.second]; }
  std::size_t sentence_count() const noexcept { return flat_.size(); }
  // Sentences in reading order across all documents.
  const std::vector<SentenceRef>& flat() const noexcept { return flat_; }
  // Reading-order match of `text` against a sentence, compared in
  // text::comparable form.
  std::optional<SentenceRef> find(std::string_view text) const;
  // Documents joined by blank lines.
  std::string joined() const;

 private:
  std::vector<std::string> documents_;
  std::vector<std::vector<std::string>> sentences_;
  std::vector<SentenceRef> flat_;
};

struct FocusedSegment {
  std::string text;                 // document sentences joined by spaces
  std::vector<SentenceRef> sources; // in the order the provider gave them
};

struct ExtractionOutcome {
  FocusedSegment segment;
  TokenUsage usage;
  double latency_ms = 0.0;
  std::size_t calls = 0;
};

// Asks the provider for the sentences most relevant to `skill`. Every line
// of the reply must match a document sentence (leading "[n]" markers and
// quotes are ignored; a bare "[n]" selects sentence n). A reply with
// invented text is retried once with a corrective note, then raises
// kSegmentNotInDocument. A single-sentence document is returned without a
// call. The question is part of the prompt.
ExtractionOutcome extract_relevant_segment(const std::string& question, const DocumentSet& docs,
                                           Skill skill, Provider& provider,
                                           const PromptLibrary& prompts = PromptLibrary::defaults());

// Fills the answer template: [Q] question, [D] focused segments labelled by
// skill, [R] the example's numbered subquestions with skill names, [S] the
// skill sequence followed by the worked demonstration example.
std::string format_prompt(const std::string& question, const std::vector<FocusedSegment>& segments,
                          const SimilarExample& example,
                          const PromptLibrary& prompts = PromptLibrary::defaults());

// Contents of the last <answer>...</answer> span, trimmed.
std::optional<std::string> marked_answer(std::string_view completion);

struct AnswerTrace {
  std::string question_id;
  std::string question;
  std::size_t selected_example_id = 0;
  std::optional<MatchResult> selection;  // absent for explicit-index runs
  std::vector<FocusedSegment> focused_segments;  // one per strategy position
  std::string prompt;
  std::string prompt_hash;
  std::string answer;  // marked span when present, else the whole completion
  std::string chain;   // full completion text
  TokenUsage usage;    // every call of the run
  double latency_ms = 0.0;
  std::size_t calls = 0;
};

struct AnswerOptions {
  SelectionOptions selection;
  std::size_t parallelism = 1;
  const PromptLibrary* prompts = nullptr;  // defaults when null
};

// Reasoning-path guided answering with the example index given.
// Extraction runs once per distinct skill of the strategy (concurrently up
// to `parallelism`) and is copied to each position using that skill.
AnswerTrace run_guided_answer(const std::string& question, const DocumentSet& docs,
                              const ExampleCollection& collection, std::size_t example_index,
                              Provider& provider, const AnswerOptions& options = {});

// select_best, then run_guided_answer. Errors carry "select", "extract" or
// "answer" stage labels.
AnswerTrace answer(const std::string& question, const DocumentSet& docs,
                   const ExampleCollection& collection, SelectionMode mode, Provider& provider,
                   const AnswerOptions& options = {});

// Run-log line: {question_id, selected_example_id, segments, prompt_hash,
// answer, chain, usage{prompt_tokens, completion_tokens, total_tokens,
// latency_ms}}.
nlohmann::ordered_json trace_to_json(const AnswerTrace& trace);

// Fields needed downstream of the run log.
struct RunLogEntry {
  std::string question_id;
  std::size_t selected_example_id = 0;
  std::vector<std::string> segments;
  std::string prompt_hash;
  std::string answer;
  std::string chain;
  TokenUsage usage;
  double latency_ms = 0.0;
};

// Throws kParseError naming the line, kStorageError when unreadable.
std::vector<RunLogEntry> load_run_log(const std::filesystem::path& path);

}  // namespace pathguide
