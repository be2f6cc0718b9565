#include <gtest/gtest.h>

#include <random>

#include "pathguide/decompose.hpp"
#include "pathguide/error.hpp"
#include "pathguide/text.hpp"
#include "support.hpp"

using namespace pathguide;

namespace {

std::vector<std::string> entity_surfaces(const QuestionTemplate& t) {
  std::vector<std::string> out;
  for (const auto& p : t.placeholders) out.push_back(p.surface());
  return out;
}

}  // namespace

TEST(Decompose, ComparisonQuestionGivesTypedTemplate) {
  const auto t = decompose_question("Which is taller, the Eiffel Tower or the Empire State Building?");
  EXPECT_EQ(t.template_text, "Which is [adj], [place 1] or [place 2]?");
  ASSERT_EQ(t.placeholders.size(), 3u);
  EXPECT_EQ(t.placeholders[0].type, "adj");
  EXPECT_EQ(t.placeholders[1].text, "Eiffel Tower");
  EXPECT_EQ(t.placeholders[1].determiner, "the");
  EXPECT_EQ(t.placeholders[2].label(), "place 2");
}

TEST(Decompose, SingleEntityQuestion) {
  const auto t = decompose_question("Who invented the telephone?");
  EXPECT_EQ(t.template_text, "Who invented [object]?");
  EXPECT_EQ(t.placeholders.at(0).label(), "object");
}

TEST(Decompose, DatesPeopleAndProperties) {
  const auto a = decompose_question("Did Marie Curie win the Nobel Prize in 1903?");
  EXPECT_EQ(a.template_text, "Did [person] win [object] in [date]?");
  const auto b = decompose_question("What is the melting point of sodium?");
  EXPECT_EQ(b.template_text, "What is [property] of [object]?");
  const auto c = decompose_question("How many people lived in Berlin in March 1990?");
  EXPECT_EQ(entity_surfaces(c), (std::vector<std::string>{"Berlin", "March 1990"}));
}

TEST(Decompose, EveryTokenGetsOneLabelAndIndicesAreContiguous) {
  const auto tokens = classify_tokens("Is Mount Fuji higher than Big Ben?");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    EXPECT_EQ(tokens[i].index, i);
    EXPECT_EQ(tokens[i].label == TokenLabel::kEntity, !tokens[i].entity_type.empty());
  }
}

TEST(Decompose, QuestionWithoutEntitiesHasNoPlaceholders) {
  const auto t = decompose_question("Why is the sky blue?");
  for (const auto& p : t.placeholders) EXPECT_NE(p.type, "person");
  const auto none = decompose_question("What happened next?");
  EXPECT_TRUE(none.placeholders.empty());
  EXPECT_EQ(none.template_text, "What happened next?");
}

TEST(Decompose, EmptyOrPunctuationOnlyQuestionIsRejected) {
  for (const std::string q : {"", "   ", "?!"}) {
    try {
      decompose_question(q);
      FAIL() << "expected EmptyQuestion for '" << q << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptyQuestion);
    }
  }
}

namespace {

class ShortTagger final : public EntityTagger {
 public:
  std::vector<TokenTag> tag(std::span<const text::SurfaceToken> tokens) const override {
    return std::vector<TokenTag>(tokens.size() - 1);
  }
};

class UntypedEntityTagger final : public EntityTagger {
 public:
  std::vector<TokenTag> tag(std::span<const text::SurfaceToken> tokens) const override {
    std::vector<TokenTag> tags(tokens.size());
    tags[0].label = TokenLabel::kEntity;
    return tags;
  }
};

class CountingTagger final : public EntityTagger {
 public:
  std::vector<TokenTag> tag(std::span<const text::SurfaceToken> tokens) const override {
    std::vector<TokenTag> tags(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].text == "X") tags[i] = TokenTag{TokenLabel::kEntity, "thing", false};
    }
    return tags;
  }
  bool thread_safe() const noexcept override { return false; }
};

}  // namespace

TEST(Decompose, MalformedTaggerOutputIsTaggerFailure) {
  for (const EntityTagger* tagger :
       std::initializer_list<const EntityTagger*>{new ShortTagger, new UntypedEntityTagger}) {
    try {
      classify_tokens("Who built it?", *tagger);
      ADD_FAILURE() << "expected TaggerFailure";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTaggerFailure);
    }
    delete tagger;
  }
}

TEST(Decompose, CustomTaggerDrivesPlaceholders) {
  const auto t = decompose_question("Is X bigger than X?", CountingTagger{});
  EXPECT_EQ(t.template_text, "Is [thing 1] bigger than [thing 2]?");
}

TEST(Decompose, BuildTemplateRejectsNonContiguousTokens) {
  auto tokens = classify_tokens("Who invented the telephone?");
  tokens[1].index = 7;
  try {
    build_template(tokens);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Render, SubstitutesEverySlot) {
  const auto t = decompose_question("Which is taller, the Eiffel Tower or the Empire State Building?");
  const std::string out = render_template(
      t, {{"adj", "older"}, {"place 1", "Big Ben"}, {"place 2", "the Colosseum"}});
  EXPECT_EQ(out, "Which is older, Big Ben or the Colosseum?");
}

TEST(Render, MissingAndUnknownSlotsAreErrors) {
  const auto t = decompose_question("Which is taller, the Eiffel Tower or the Empire State Building?");
  try {
    render_template(t, {{"adj", "older"}, {"place 1", "Big Ben"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingSubstitution);
  }
  try {
    render_template(t, {{"adj", "older"}, {"place 1", "a"}, {"place 2", "b"}, {"person", "c"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownPlaceholder);
  }
}

TEST(Render, RoundTripPropertyOverGeneratedQuestions) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto q = testsupport::random_question(rng);
    const auto t = decompose_question(q.text);
    const std::string back = render_template(t, t.original_substitutions());
    EXPECT_EQ(text::collapse_whitespace(back), text::collapse_whitespace(q.text)) << q.text;
  }
}

TEST(Render, RenderTokensUsesCallbackForEntities) {
  const auto tokens = classify_tokens("Was Alan Turing born in London?");
  const std::string out = render_tokens(tokens, [](const Token& t) { return "<" + t.entity_type + ">"; });
  EXPECT_EQ(out, "Was <person> born in <place>?");
}

TEST(Json, TemplateSerializesPlaceholders) {
  const auto t = decompose_question("Which is taller, the Eiffel Tower or the Empire State Building?");
  const auto j = template_to_json(t);
  EXPECT_EQ(j.at("template_text"), "Which is [adj], [place 1] or [place 2]?");
  ASSERT_EQ(j.at("placeholders").size(), 3u);
  EXPECT_EQ(j.at("placeholders")[1].at("determiner"), "the");
  EXPECT_EQ(j.at("placeholders")[2].at("ordinal"), 2);
}
