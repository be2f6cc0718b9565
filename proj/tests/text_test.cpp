#include <gtest/gtest.h>

#include <random>

#include "pathguide/text.hpp"

using namespace pathguide::text;

TEST(Tokenize, DetachesPunctuationButKeepsWordInternalJoiners) {
  const auto toks = tokenize("Which is taller, the Eiffel Tower or O'Neil's 1,000.5-metre mast?");
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  const std::vector<std::string> expected = {"Which", "is",  "taller", ",",    "the",
                                             "Eiffel", "Tower", "or",   "O'Neil's",
                                             "1,000.5-metre", "mast", "?"};
  EXPECT_EQ(words, expected);
  EXPECT_FALSE(toks[3].is_word);
  EXPECT_FALSE(toks[3].space_before);
}

TEST(Tokenize, DetokenizeRestoresSingleSpacedText) {
  for (const std::string s : {"Who invented the telephone?", "Is it 97.8 °C (boiling)?",
                              "\"Quoted\" text, with: colons; and-dashes."}) {
    EXPECT_EQ(detokenize(tokenize(s)), s);
  }
}

TEST(Tokenize, RoundTripPropertyOnRandomText) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcXYZ019 ,.?!'-\"()";
  for (int i = 0; i < 300; ++i) {
    std::string s;
    const std::size_t len = rng() % 40;
    for (std::size_t k = 0; k < len; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
    EXPECT_EQ(collapse_whitespace(trim(detokenize(tokenize(s)))),
              collapse_whitespace(trim(detokenize(tokenize(detokenize(tokenize(s)))))));
  }
}

TEST(Sentences, SplitsOnTerminalPunctuationBeforeCapitals) {
  const auto s = split_sentences(
      "The tower is tall. It was built in 1889! Was it? Yes.");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], "The tower is tall.");
  EXPECT_EQ(s[3], "Yes.");
}

TEST(Sentences, AbbreviationsAndInitialsDoNotSplit) {
  const auto s = split_sentences("Dr. Smith met J. R. R. Tolkien in the U.S. in 1950. He left.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1], "He left.");
}

TEST(Sentences, DecimalNumbersAndLowercaseContinuationsStay) {
  const auto s = split_sentences("It is 324.5 m tall. the end");
  ASSERT_EQ(s.size(), 1u);
}

TEST(Sentences, ParagraphBreaksSplitAndEmptyInputGivesNothing) {
  EXPECT_EQ(split_sentences("First line without stop\n\nSecond one").size(), 2u);
  EXPECT_TRUE(split_sentences("   \n ").empty());
}

TEST(Normalization, NormalizedWordsStripsPunctuationAndCase) {
  const std::vector<std::string> expected = {"the", "cat", "sat", "on", "mat"};
  EXPECT_EQ(normalized_words("The cat, sat -- on MAT!"), expected);
}

TEST(Normalization, ComparableIgnoresQuotesCaseAndTrailingStops) {
  EXPECT_EQ(comparable("  \"The  Tower is tall.\" "), comparable("the tower is tall"));
  EXPECT_NE(comparable("the tower is tall"), comparable("the tower is short"));
}

TEST(Hashing, Sha256MatchesKnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Helpers, TrimCollapseLowerStartsWith) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_EQ(collapse_whitespace("a \t\n b"), "a b");
  EXPECT_EQ(to_lower("AbC"), "abc");
  EXPECT_TRUE(starts_with_ci("Generated Answer: x", "generated answer:"));
  EXPECT_FALSE(starts_with_ci("Gen", "generated"));
}
