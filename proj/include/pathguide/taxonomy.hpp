#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pathguide {

// The fixed reasoning-skill taxonomy. Declaration order is the canonical
// iteration order used in every report and file.
enum class Skill : std::uint8_t {
  kDeductive,
  kInductive,
  kAbductive,
  kCauseEffect,
  kAnalogical,
  kCriticalThinking,
  kDecompositional,
};

inline constexpr std::size_t kSkillCount = 7;

struct ReasoningSkill {
  Skill id;
  std::string_view name;         // display form, e.g. "Cause & Effect"
  std::string_view key;          // serialized form, e.g. "cause & effect"
  std::string_view description;
  std::string_view example;
};

std::span<const ReasoningSkill, kSkillCount> all_skills() noexcept;

const ReasoningSkill& skill_info(Skill skill) noexcept;
std::string_view skill_name(Skill skill) noexcept;
// Lowercase canonical name used in every file format.
std::string_view skill_key(Skill skill) noexcept;

constexpr std::size_t skill_index(Skill skill) noexcept {
  return static_cast<std::size_t>(skill);
}

// Case-, whitespace- and punctuation-tolerant lookup against canonical names
// and the alias table below. Throws Error(kUnknownSkill).
//
// Aliases: "cause and effect", "cause-effect", "causal", "cause" ->
// CauseEffect; "critical", "critical reasoning" -> CriticalThinking;
// "deduction", "induction", "abduction", "analogy", "decomposition" map to
// their skills. LaTeX escapes ("cause \& effect") are accepted.
Skill parse_skill(std::string_view label);

// Multi-line "name: description Example: ..." listing fed to the
// example-generation prompt.
std::string describe_taxonomy();

}  // namespace pathguide
