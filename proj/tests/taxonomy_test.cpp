#include <gtest/gtest.h>

#include <set>

#include "pathguide/error.hpp"
#include "pathguide/taxonomy.hpp"

using namespace pathguide;

TEST(Taxonomy, HasSevenSkillsInDeclarationOrder) {
  const auto skills = all_skills();
  ASSERT_EQ(skills.size(), 7u);
  for (std::size_t i = 0; i < skills.size(); ++i) {
    EXPECT_EQ(skill_index(skills[i].id), i);
  }
  EXPECT_EQ(skill_key(Skill::kCauseEffect), "cause & effect");
  EXPECT_EQ(skill_key(Skill::kCriticalThinking), "critical thinking");
}

TEST(Taxonomy, KeysAndNamesAreUnique) {
  std::set<std::string_view> keys;
  std::set<std::string_view> names;
  for (const auto& s : all_skills()) {
    keys.insert(s.key);
    names.insert(s.name);
    EXPECT_FALSE(s.description.empty());
    EXPECT_FALSE(s.example.empty());
  }
  EXPECT_EQ(keys.size(), 7u);
  EXPECT_EQ(names.size(), 7u);
}

TEST(Taxonomy, ParseRoundTripsEveryKeyAndName) {
  for (const auto& s : all_skills()) {
    EXPECT_EQ(parse_skill(s.key), s.id);
    EXPECT_EQ(parse_skill(s.name), s.id);
  }
}

TEST(Taxonomy, ParseToleratesCommonSpellings) {
  EXPECT_EQ(parse_skill("Cause and Effect"), Skill::kCauseEffect);
  EXPECT_EQ(parse_skill("cause-effect"), Skill::kCauseEffect);
  EXPECT_EQ(parse_skill("Cause \\& Effect"), Skill::kCauseEffect);
  EXPECT_EQ(parse_skill("  DEDUCTIVE reasoning "), Skill::kDeductive);
  EXPECT_EQ(parse_skill("deduction"), Skill::kDeductive);
  EXPECT_EQ(parse_skill("analogy"), Skill::kAnalogical);
  EXPECT_EQ(parse_skill("critical"), Skill::kCriticalThinking);
  EXPECT_EQ(parse_skill("Decompositional Thinking"), Skill::kDecompositional);
}

TEST(Taxonomy, UnknownSkillIsRejected) {
  try {
    parse_skill("telepathic");
    FAIL() << "expected UnknownSkill";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownSkill);
  }
  EXPECT_THROW(parse_skill(""), Error);
}

TEST(Taxonomy, DescriptionListsEverySkill) {
  const std::string listing = describe_taxonomy();
  for (const auto& s : all_skills()) {
    EXPECT_NE(listing.find(std::string(s.name)), std::string::npos) << s.name;
  }
}
