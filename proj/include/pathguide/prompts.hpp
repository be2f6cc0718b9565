#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pathguide {

enum class PromptKind {
  kStrategy,      // similar example + reasoning path generation
  kSimilarity,    // structural similarity score 1..10
  kAnswer,        // guided final answer
  kSubstitutes,   // guided slot filling
  kParaphrase,    // template variation
  kReferenceDoc,  // one reference segment per subquestion
  kSegment,       // skill-relevant sentence extraction
};

inline constexpr std::array<PromptKind, 7> kAllPromptKinds{
    PromptKind::kStrategy,  PromptKind::kSimilarity,   PromptKind::kAnswer,
    PromptKind::kSubstitutes, PromptKind::kParaphrase, PromptKind::kReferenceDoc,
    PromptKind::kSegment};

// File name under data/prompts/, e.g. "strategy.txt".
std::string_view prompt_file_name(PromptKind kind);

// Named slots ("{{NAME}}") in order of first appearance.
std::vector<std::string> template_slots(std::string_view tmpl);

// Replaces every slot; throws kTemplateSlotMissing for an unfilled one.
std::string fill_slots(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Prompt templates. Defaults are compiled in from data/prompts; a directory
// of same-named files overrides them one by one.
class PromptLibrary {
 public:
  static const PromptLibrary& defaults();
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const std::string& text(PromptKind kind) const;
  std::string render(PromptKind kind, const std::map<std::string, std::string>& values) const {
    return fill_slots(text(kind), values);
  }

 private:
  std::map<PromptKind, std::string> templates_;
};

// Bundled data files by relative name ("repair_cues.json",
// "entity_pool.json", "prompts/answer.txt"). Empty when unknown.
std::string_view bundled_data(std::string_view name);

}  // namespace pathguide
