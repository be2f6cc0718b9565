#include <gtest/gtest.h>

#include <fstream>

#include "pathguide/answerer.hpp"
#include "pathguide/error.hpp"
#include "pathguide/eval.hpp"
#include "support.hpp"

using namespace pathguide;
using testsupport::code_of;

// --- ROUGE-L ------------------------------------------------------------------

TEST(RougeL, Fixtures) {
  EXPECT_EQ(rouge_l("the cat sat on the mat", "the cat sat on the mat"), 1.0);
  EXPECT_EQ(rouge_l("red green", "blue yellow"), 0.0);
  EXPECT_NEAR(rouge_l("the cat sat", "the cat ran fast"), 4.0 / 7.0, 1e-12);
  EXPECT_NEAR(rouge_l("the cat sat", "the cat ran fast"), 0.571429, 1e-6);
  EXPECT_EQ(rouge_l("The Cat, sat!", "the cat sat"), 1.0);
  EXPECT_EQ(rouge_l("", "x"), 0.0);
  EXPECT_EQ(code_of([] { rouge_l("x", " ... "); }), ErrorCode::kEmptyReference);
}

TEST(RougeL, MatchesMemoizedOracleAndBounds) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const std::string a = testsupport::random_sentence(rng, 12);
    const std::string b = testsupport::random_sentence(rng, 12);
    const double v = rouge_l(a, b);
    EXPECT_EQ(v, testsupport::oracle_rouge_l(a, b)) << a << " | " << b;
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(rouge_l(a, a), 1.0);
    EXPECT_EQ(v, rouge_l(b, a));
  }
}

TEST(Lcs, SmallCases) {
  EXPECT_EQ(lcs_length({"a", "b", "c", "d"}, {"b", "d"}), 2u);
  EXPECT_EQ(lcs_length({}, {"a"}), 0u);
  EXPECT_EQ(lcs_length({"a", "b", "a"}, {"b", "a", "b"}), 2u);
}

// --- exact match --------------------------------------------------------------

TEST(ExactMatch, Normalization) {
  EXPECT_EQ(exact_match("Paris", {"Paris"}), 1);
  EXPECT_EQ(exact_match("the Paris ", {"paris"}), 1);
  EXPECT_EQ(exact_match("Lyon", {"Paris"}), 0);
  EXPECT_EQ(exact_match("Lyon", {"Paris", "lyon."}), 1);
  EXPECT_EQ(exact_match("New   York", {"new york"}), 1);
  EXPECT_EQ(exact_match("an apple", {"Apple!"}), 1);
  EXPECT_EQ(exact_match("Paris, France", {"Paris"}), 0);
  EXPECT_EQ(normalize_answer("  The  Empire State Building. "), "empire state building");
  EXPECT_EQ(code_of([] { exact_match("x", {}); }), ErrorCode::kEmptyInput);
}

// --- Hits / Error ---------------------------------------------------------------

namespace {

std::set<SentenceRef> to_set(unsigned mask) {
  std::set<SentenceRef> out;
  for (std::size_t i = 0; i < 8; ++i) {
    if (mask & (1u << i)) out.insert({0, i});
  }
  return out;
}

SupportSets sets(unsigned cited, unsigned gold) { return {to_set(cited), to_set(gold)}; }

}  // namespace

TEST(HitsError, SpecCases) {
  // s1 = bit 0, s2 = bit 1
  const SupportSets same[] = {sets(0b11, 0b11)};
  auto he = hits_and_error(same);
  EXPECT_EQ(he.hits, 1.0);
  EXPECT_EQ(he.error, 0.0);

  const SupportSets missing[] = {sets(0b01, 0b11)};
  he = hits_and_error(missing);
  EXPECT_EQ(he.hits, 0.0);
  EXPECT_FALSE(he.error.has_value());
  EXPECT_EQ(code_of([&] { error_value(he); }), ErrorCode::kZeroDenominator);

  const SupportSets extra[] = {sets(0b11, 0b01)};
  he = hits_and_error(extra);
  EXPECT_EQ(he.hits, 1.0);
  EXPECT_EQ(he.error_numerator, 1.0);
  EXPECT_EQ(he.error_denominator, 2.0);
  EXPECT_EQ(he.error, 0.5);

  EXPECT_EQ(code_of([] { hits_and_error({}); }), ErrorCode::kEmptyInput);
}

TEST(HitsError, ExhaustiveSingleRecordsOverFourElements) {
  for (unsigned p = 0; p < 16; ++p) {
    for (unsigned g = 0; g < 16; ++g) {
      const SupportSets r[] = {sets(p, g)};
      const auto he = hits_and_error(r);
      const auto o = testsupport::oracle_hits_error({{p, g}});
      EXPECT_EQ(he.hits, static_cast<double>(o.hits));
      EXPECT_EQ(he.error_numerator, static_cast<double>(o.spurious));
      EXPECT_EQ(he.error_denominator, static_cast<double>(o.hits + o.spurious));
      EXPECT_EQ(he.error.has_value(), o.hits + o.spurious > 0);
    }
  }
}

TEST(HitsError, RandomBatchesMatchOracleForBothFormulas) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<testsupport::OracleSupport> oracle_in(1 + rng() % 8);
    std::vector<SupportSets> in;
    for (auto& r : oracle_in) {
      r.cited = static_cast<unsigned>(rng() % 64);
      r.gold = static_cast<unsigned>(rng() % 64);
      in.push_back(sets(r.cited, r.gold));
    }
    const auto o = testsupport::oracle_hits_error(oracle_in);
    const auto lit = hits_and_error(in);
    EXPECT_DOUBLE_EQ(lit.hits, static_cast<double>(o.hits) / static_cast<double>(o.questions));
    if (o.hits + o.spurious > 0) {
      ASSERT_TRUE(lit.error.has_value());
      EXPECT_DOUBLE_EQ(*lit.error, static_cast<double>(o.spurious) / static_cast<double>(o.hits + o.spurious));
    } else {
      EXPECT_FALSE(lit.error.has_value());
    }
    const auto fdr = hits_and_error(in, ErrorFormula::kFdr);
    EXPECT_EQ(fdr.hits, lit.hits);
    if (o.cited > 0) {
      ASSERT_TRUE(fdr.error.has_value());
      EXPECT_DOUBLE_EQ(*fdr.error, static_cast<double>(o.extra) / static_cast<double>(o.cited));
    } else {
      EXPECT_FALSE(fdr.error.has_value());
    }
  }
}

// --- citation attribution ---------------------------------------------------------

TEST(Citations, ContainmentThreshold) {
  const DocumentSet docs({"John Lennon was born in Liverpool, England. He formed The Beatles.",
                          "Nowhere Boy is a film about the early life of John Lennon."});
  const auto cited = attribute_citations(
      "As the text says, John Lennon was born in Liverpool England. The film covers his youth.", docs);
  EXPECT_EQ(cited, (std::set<SentenceRef>{{0, 0}}));
  // 4 of 5 distinct tokens of "He formed The Beatles." is exactly 0.8.
  const auto partial = attribute_citations("He formed the band Beatles.", docs);
  EXPECT_EQ(partial, (std::set<SentenceRef>{{0, 1}}));
  EXPECT_TRUE(attribute_citations("Unrelated words only.", docs).empty());
}

// --- retrace ------------------------------------------------------------------------

TEST(Retrace, PositiveFixtures) {
  for (const auto& chain : testsupport::retrace_positive_fixtures()) {
    EXPECT_TRUE(detect_retrace(chain)) << chain;
  }
}

TEST(Retrace, CleanFixtures) {
  EXPECT_FALSE(detect_retrace("The answer is Paris."));
  for (const auto& chain : testsupport::retrace_clean_fixtures(200, 4)) {
    EXPECT_FALSE(detect_retrace(chain)) << chain;
  }
}

TEST(Retrace, CueWithoutAChangedAnswerIsNotARetrace) {
  EXPECT_FALSE(detect_retrace("Actually, the answer is Paris."));
  EXPECT_FALSE(detect_retrace("The answer is Paris. Wait, let me check. The answer is Paris."));
  EXPECT_FALSE(detect_retrace("The answer is Paris. Sorry for the long explanation."));
  // Cue words inside other words do not count.
  EXPECT_FALSE(detect_retrace("The answer is Awaiting. It was factually the answer."));
}

TEST(Retrace, AnswerSpans) {
  const auto spans = answer_spans("First the answer is 12. Then answer: 13\n<answer> 14 </answer>");
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[0].text, "12");
  EXPECT_EQ(spans[1].text, "13");
  EXPECT_EQ(spans[2].text, "14");
  EXPECT_LT(spans[0].end, spans[1].begin);
}

TEST(Retrace, RateAndConfig) {
  EXPECT_EQ(retrace_rate({true, false, false, true}), 0.5);
  EXPECT_EQ(retrace_rate({false, false}), 0.0);
  EXPECT_EQ(retrace_rate({true}), 1.0);
  EXPECT_EQ(code_of([] { retrace_rate({}); }), ErrorCode::kEmptyInput);

  const auto& bundled = RetraceConfig::bundled();
  EXPECT_GE(bundled.version, 1);
  for (const char* cue : {"sorry", "actually", "let me rethink", "wait"}) {
    EXPECT_NE(std::find(bundled.cues.begin(), bundled.cues.end(), cue), bundled.cues.end()) << cue;
  }
  const auto custom = RetraceConfig::parse(R"({"version": 2, "cues": ["On Second Thought"]})");
  EXPECT_EQ(custom.cues, std::vector<std::string>{"on second thought"});
  EXPECT_TRUE(detect_retrace("The answer is 3. On second thought, the answer is 4.", custom));
  EXPECT_FALSE(detect_retrace("The answer is 3. Wait, the answer is 4.", custom));
  EXPECT_EQ(code_of([] { RetraceConfig::parse("{\"cues\": 1}"); }), ErrorCode::kParseError);
}

// --- tokens ---------------------------------------------------------------------------

TEST(Tokens, MeansAndReduction) {
  std::vector<UsageSample> samples(3);
  for (int i = 0; i < 3; ++i) {
    samples[i].usage.total_tokens = 100 * (i + 1);
    samples[i].latency_ms = 10.0 * (i + 1);
  }
  const auto s = token_stats(samples);
  EXPECT_EQ(s.token_mean, 200.0);
  EXPECT_EQ(s.time_mean_ms, 20.0);
  EXPECT_EQ(s.n, 3u);
  EXPECT_NEAR(100 * reduction_vs(1469.24, 1723.83), 14.8, 0.05);
  EXPECT_NEAR(100 * reduction_vs(1547.22, 2068.34), 25.2, 0.05);
  EXPECT_EQ(reduction_vs(500.0, 500.0), 0.0);
  EXPECT_EQ(reduction_vs(400.0, 500.0), -reduction_vs(600.0, 500.0));
  EXPECT_EQ(code_of([] { reduction_vs(1.0, 0.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { token_stats({}); }), ErrorCode::kEmptyInput);
}

// --- report ---------------------------------------------------------------------------

namespace {

EvalRecord record(const std::string& id, const std::string& prediction, const std::string& gold,
                  std::int64_t tokens) {
  EvalRecord r;
  r.question_id = id;
  r.prediction = prediction;
  r.gold_answers = {gold};
  r.chain_text = "The answer is " + prediction + ".";
  r.usage.total_tokens = tokens;
  r.latency_ms = 5.0;
  return r;
}

}  // namespace

TEST(Report, AggregatesAndSerializes) {
  auto a = record("a", "Paris", "Paris", 100);
  a.cited_sentences = to_set(0b01);
  a.gold_sentences = to_set(0b11);
  auto b = record("b", "Lyon", "Paris", 300);
  b.chain_text = "<answer>Paris</answer> <answer>Lyon</answer>";
  EvalOptions opts;
  opts.baseline_token_mean = 400.0;
  const auto report = evaluate({a, b}, opts);
  EXPECT_EQ(report.n, 2u);
  EXPECT_EQ(report.rouge_l_mean, 0.5);
  EXPECT_EQ(report.em_mean, 0.5);
  EXPECT_EQ(report.retrace_rate, 0.5);
  EXPECT_EQ(report.token_mean, 200.0);
  EXPECT_EQ(report.reduction, 0.5);
  ASSERT_TRUE(report.support.has_value());
  EXPECT_EQ(report.support->questions, 1u);
  EXPECT_EQ(report.support->hits, 0.0);
  EXPECT_FALSE(report.support->error.has_value());

  const auto j = report_to_json(report);
  EXPECT_EQ(j.at("error"), "undefined");
  EXPECT_EQ(j.at("hits"), 0.0);
  EXPECT_EQ(j.at("n"), 2);

  const auto tsv = records_to_tsv(report);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')),
            "question_id\trouge_l\tem\thit\tspurious\tretrace\ttotal_tokens\tlatency_ms");
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 3);
  EXPECT_NE(report_summary(report).find("undefined"), std::string::npos);
}

TEST(Report, RequiresGoldAnswers) {
  auto r = record("a", "x", "x", 1);
  r.gold_answers.clear();
  EXPECT_EQ(code_of([&] { evaluate({r}); }), ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { evaluate({}); }), ErrorCode::kEmptyInput);
}
