#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathguide/decompose.hpp"
#include "pathguide/prompts.hpp"
#include "pathguide/provider.hpp"
#include "pathguide/taxonomy.hpp"

namespace pathguide {

enum class ConstructionMode { kRandomFill, kGuidedFill, kTemplateVariation };

// "random_fill", "guided_fill", "template_variation".
std::string_view construction_mode_key(ConstructionMode mode);
// Accepts underscores or dashes. Throws kInvalidArgument.
ConstructionMode parse_construction_mode(std::string_view text);

struct CandidateQuestion {
  std::string text;
  std::map<std::string, std::string> substitutions;  // empty for paraphrases
  std::optional<int> similarity_score;
};

// One subquestion per step, one skill per step.
struct ReasoningStrategy {
  std::vector<std::string> subquestions;
  std::vector<Skill> skills;

  // Throws kUnparseableStrategy when empty or misaligned.
  void validate() const;
  bool operator==(const ReasoningStrategy&) const = default;
};

struct SimilarExample {
  std::string question;
  ReasoningStrategy strategy;
  std::vector<std::string> reference_docs;  // aligned with subquestions
  std::string answer;
  ConstructionMode construction_mode = ConstructionMode::kGuidedFill;

  bool operator==(const SimilarExample&) const = default;
};

struct GenerationConfig {
  int delta = 7;                    // keep candidates scoring >= delta
  std::size_t target_count = 5;     // desired collection size
  ConstructionMode mode = ConstructionMode::kGuidedFill;
  std::size_t max_candidates = 10;  // cap on raw generations
  std::uint64_t seed = 0;           // random_fill sampling
  std::size_t parallelism = 1;

  // Throws kInvalidArgument.
  void validate() const;
};

// Type -> entity list used by random_fill.
class EntityPool {
 public:
  static const EntityPool& bundled();
  static EntityPool parse(std::string_view json_text);
  static EntityPool load(const std::filesystem::path& path);

  int version() const noexcept { return version_; }
  // nullptr when the type has no entries.
  const std::vector<std::string>* entries(const std::string& type) const;

 private:
  int version_ = 0;
  std::map<std::string, std::vector<std::string>> by_type_;
};

// Numbered lines ("1. text", "2) text", "Step 3: text") in reply order.
std::vector<std::pair<int, std::string>> numbered_lines(std::string_view reply);

// Candidates keep input order; duplicates under case/whitespace folding are
// dropped. Throws kNoCandidates when nothing usable was produced.
std::vector<CandidateQuestion> generate_candidates(
    const QuestionTemplate& tmpl, const GenerationConfig& config, Provider& provider,
    const PromptLibrary& prompts = PromptLibrary::defaults(),
    const EntityPool& pool = EntityPool::bundled());

// Reads the 1..10 score that ends a similarity reply.
// Throws kUnparseableScore.
int parse_similarity_score(std::string_view reply);

int score_similarity(const std::string& original, const std::string& candidate, Provider& provider,
                     const PromptLibrary& prompts = PromptLibrary::defaults());

// Keeps score >= delta in input order. Throws kMissingScore.
std::vector<CandidateQuestion> filter_candidates(const std::vector<CandidateQuestion>& candidates,
                                                 int delta);

struct StrategyReply {
  ReasoningStrategy strategy;
  std::string answer;  // "Generated Answer:" line, may be empty
};

// Parses numbered "N. text (skill)" steps. When no step carries a skill, a
// "Reasoning Skill Used:" list of the same length is used instead.
// Throws kUnparseableStrategy (unknown skills included).
StrategyReply parse_strategy_reply(std::string_view reply);

StrategyReply build_strategy(const std::string& question, Provider& provider,
                             const PromptLibrary& prompts = PromptLibrary::defaults());

// One reference segment per subquestion, in subquestion order.
// Throws kProviderError for an empty segment.
std::vector<std::string> build_reference_docs(const ReasoningStrategy& strategy,
                                              const std::string& question, Provider& provider,
                                              std::size_t parallelism = 1,
                                              const PromptLibrary& prompts = PromptLibrary::defaults());

// Throws kLengthMismatch / kEmptyAnswer.
SimilarExample assemble_example(std::string question, ReasoningStrategy strategy,
                                std::vector<std::string> docs, std::string answer,
                                ConstructionMode mode);

// Replaces tagged entities in every text field with [PROPERTY], [ENTITY_A],
// [VALUE_A], [ATTRIBUTE] style labels that are consistent across the
// example. Letters are assigned per family in order of first appearance; a
// family with one member gets the bare label. Skills are untouched.
SimilarExample anonymize_example(const SimilarExample& example,
                                 const EntityTagger& tagger = default_tagger());

struct GenerationOutcome {
  std::vector<SimilarExample> examples;
  std::size_t candidates = 0;
  std::size_t scored = 0;       // parseable similarity replies
  std::size_t retained = 0;     // passed the threshold
  std::size_t skipped = 0;      // retained but unusable strategy/answer
};

// Candidates -> similarity filter -> strategy -> reference docs -> example,
// until target_count examples exist or retained candidates run out.
// Throws kNoCandidates when nothing passes the threshold or every retained
// candidate is unusable.
GenerationOutcome generate_examples(const QuestionTemplate& tmpl, const GenerationConfig& config,
                                    Provider& provider,
                                    const PromptLibrary& prompts = PromptLibrary::defaults(),
                                    const EntityPool& pool = EntityPool::bundled());

}  // namespace pathguide
