#include "pathguide/taxonomy.hpp"

#include <cctype>
#include <utility>

#include "pathguide/error.hpp"

namespace pathguide {
namespace {

constexpr std::array<ReasoningSkill, kSkillCount> kSkills{{
    {Skill::kDeductive, "Deductive", "deductive",
     "Applies an established general rule to a specific case; if the rule "
     "holds and the case falls under it, the conclusion is certain.",
     "Every mammal is warm-blooded and a whale is a mammal, so a whale is "
     "warm-blooded."},
    {Skill::kInductive, "Inductive", "inductive",
     "Generalizes from repeated observations to a conclusion that is "
     "probable but not guaranteed.",
     "The ferry has left on time every morning this month, so it will "
     "probably leave on time tomorrow."},
    {Skill::kAbductive, "Abductive", "abductive",
     "Infers the most plausible explanation for an incomplete set of "
     "observations.",
     "The grass is wet but the street is dry, so the sprinklers most likely "
     "ran this morning."},
    {Skill::kCauseEffect, "Cause & Effect", "cause & effect",
     "Links an event to the consequences it produces: if x happens, y "
     "follows.",
     "The river rose above its banks after a week of storms, so the low "
     "farmland flooded."},
    {Skill::kAnalogical, "Analogical", "analogical",
     "Transfers conclusions between cases that already share relevant "
     "properties.",
     "Two cities with similar climates grow the same crops, so a crop that "
     "thrives in one should thrive in the other."},
    {Skill::kCriticalThinking, "Critical Thinking", "critical thinking",
     "Weighs all available evidence and its reliability before settling on "
     "a judgement.",
     "A supplier missed three of the last four deadlines, so relying on it "
     "for an urgent order is risky."},
    {Skill::kDecompositional, "Decompositional", "decompositional",
     "Breaks a problem into parts, resolves each part, and recombines the "
     "partial results into the whole answer.",
     "To compare two laptops, rate battery, weight and speed separately, "
     "then combine the ratings."},
}};

// Folds a label to lowercase alphanumerics; '&' reads as "and".
std::string fold(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (char c : label) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      out.push_back(static_cast<char>(std::tolower(uc)));
    } else if (c == '&') {
      out += "and";
    }
  }
  return out;
}

constexpr std::array<std::pair<std::string_view, Skill>, 13> kAliases{{
    {"causeandeffect", Skill::kCauseEffect},
    {"causeeffect", Skill::kCauseEffect},
    {"causal", Skill::kCauseEffect},
    {"cause", Skill::kCauseEffect},
    {"critical", Skill::kCriticalThinking},
    {"criticalreasoning", Skill::kCriticalThinking},
    {"criticalthinking", Skill::kCriticalThinking},
    {"deduction", Skill::kDeductive},
    {"induction", Skill::kInductive},
    {"abduction", Skill::kAbductive},
    {"analogy", Skill::kAnalogical},
    {"decomposition", Skill::kDecompositional},
    {"decompose", Skill::kDecompositional},
}};

}  // namespace

std::span<const ReasoningSkill, kSkillCount> all_skills() noexcept {
  return kSkills;
}

const ReasoningSkill& skill_info(Skill skill) noexcept {
  return kSkills[skill_index(skill)];
}

std::string_view skill_name(Skill skill) noexcept {
  return skill_info(skill).name;
}

std::string_view skill_key(Skill skill) noexcept {
  return skill_info(skill).key;
}

Skill parse_skill(std::string_view label) {
  const std::string folded = fold(label);
  if (!folded.empty()) {
    for (const auto& s : kSkills) {
      if (fold(s.name) == folded) return s.id;
    }
    for (const auto& [alias, skill] : kAliases) {
      if (alias == folded) return skill;
    }
    // "deductive reasoning", "analogical thinking"
    for (std::string_view suffix : {"reasoning", "thinking", "skill"}) {
      if (folded.size() > suffix.size() &&
          folded.ends_with(suffix)) {
        const std::string stem = folded.substr(0, folded.size() - suffix.size());
        for (const auto& s : kSkills) {
          if (fold(s.name) == stem) return s.id;
        }
        for (const auto& [alias, skill] : kAliases) {
          if (alias == stem) return skill;
        }
      }
    }
  }
  fail(ErrorCode::kUnknownSkill,
       "no reasoning skill matches '" + std::string(label) + "'");
}

std::string describe_taxonomy() {
  std::string out;
  for (const auto& s : kSkills) {
    out += "- ";
    out += s.name;
    out += ": ";
    out += s.description;
    out += " Example: ";
    out += s.example;
    out += '\n';
  }
  return out;
}

}  // namespace pathguide
