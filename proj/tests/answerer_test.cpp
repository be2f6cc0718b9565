#include <gtest/gtest.h>

#include <fstream>

#include "pathguide/answerer.hpp"
#include "pathguide/error.hpp"
#include "pathguide/scripted.hpp"
#include "support.hpp"

using namespace pathguide;
using testsupport::code_of;
using testsupport::make_example;

namespace {

const std::vector<std::string> kLennonDocs = {
    "John Lennon, the iconic musician and member of The Beatles, was born in Liverpool, England.",
    "Nowhere Boy is a film that explores the early life of John Lennon, highlighting his formative "
    "years and influences."};
const char* kLennonQuestion = "In what city was the subject of the film Nowhere Boy born?";

const std::vector<std::string> kEiffelDocs = {
    "The Eiffel Tower is a wrought-iron lattice tower located on the Champ de Mars in Paris, France. "
    "It was constructed in 1889 as the entrance to the 1889 World's Fair. The tower stands "
    "approximately 324 meters tall and is one of the most recognized structures in the world."};
const char* kEiffelQuestion = "In what year was the Eiffel Tower constructed?";

ScriptedResponder fixture_responder() {
  return ScriptedResponder::load(testsupport::fixture("replay/mock_script.json"));
}

ExampleCollection bridge_collection() {
  auto a = make_example({Skill::kDeductive, Skill::kDecompositional, Skill::kDeductive},
                        "In what city was the director of the film Star Run born?");
  auto b = make_example({Skill::kDeductive}, "Where was the author of Blue Hill born?");
  return build_collection({a, b});
}

}  // namespace

TEST(DocumentSetTest, SplitsSentencesAndFindsThem) {
  const DocumentSet docs(kEiffelDocs);
  ASSERT_EQ(docs.sentence_count(), 3u);
  EXPECT_EQ(docs.sentence({0, 1}), "It was constructed in 1889 as the entrance to the 1889 World's Fair.");
  EXPECT_EQ(docs.find("it was constructed in 1889 as the entrance to the 1889 world's fair"),
            SentenceRef(0, 1));
  EXPECT_FALSE(docs.find("It was built in 1887.").has_value());
  EXPECT_EQ(DocumentSet(kLennonDocs).flat().back(), SentenceRef(1, 0));
}

TEST(Extraction, LennonDeductiveSegment) {
  MockProvider mock{MockProvider::Responder(ScriptedResponder())};
  const auto out = extract_relevant_segment(kLennonQuestion, DocumentSet(kLennonDocs),
                                            Skill::kDeductive, mock);
  EXPECT_NE(out.segment.text.find("John Lennon"), std::string::npos);
  EXPECT_NE(out.segment.text.find("was born in Liverpool"), std::string::npos);
  EXPECT_EQ(out.calls, 1u);
}

TEST(Extraction, SingleSentenceNeedsNoCall) {
  MockProvider mock("should not be asked");
  const auto out = extract_relevant_segment("Q?", DocumentSet({"Only one sentence here."}),
                                            Skill::kInductive, mock);
  EXPECT_EQ(out.segment.text, "Only one sentence here.");
  EXPECT_EQ(mock.calls(), 0u);
}

TEST(Extraction, InventedTextIsRetriedOnceThenRejected) {
  MockProvider inventive("John Lennon was born in Manchester.");
  EXPECT_EQ(code_of([&] {
              extract_relevant_segment(kLennonQuestion, DocumentSet(kLennonDocs), Skill::kDeductive,
                                       inventive);
            }),
            ErrorCode::kSegmentNotInDocument);
  EXPECT_EQ(inventive.calls(), 2u);

  int calls = 0;
  MockProvider recovers([&](const CompletionRequest& r) {
    if (calls++ == 0) return std::string("Lennon came from Manchester.");
    EXPECT_NE(r.prompt.find("word for word"), std::string::npos);
    return std::string("[2]");
  });
  const auto out = extract_relevant_segment(kLennonQuestion, DocumentSet(kLennonDocs),
                                            Skill::kDeductive, recovers);
  EXPECT_EQ(out.segment.sources, (std::vector<SentenceRef>{{1, 0}}));
  EXPECT_EQ(out.calls, 2u);
}

TEST(Extraction, AcceptsMarkersQuotesAndSeveralSentences) {
  MockProvider mock(
      "- \"It was constructed in 1889 as the entrance to the 1889 World's Fair.\"\n"
      "[1] The Eiffel Tower is a wrought-iron lattice tower located on the Champ de Mars in Paris, "
      "France.");
  const auto out = extract_relevant_segment(kEiffelQuestion, DocumentSet(kEiffelDocs),
                                            Skill::kDeductive, mock);
  EXPECT_EQ(out.segment.sources, (std::vector<SentenceRef>{{0, 1}, {0, 0}}));
  EXPECT_EQ(out.segment.text.rfind("It was constructed in 1889", 0), 0u);
}

TEST(Extraction, SegmentsAreContainedInTheDocuments) {
  MockProvider mock{MockProvider::Responder(ScriptedResponder())};
  const DocumentSet docs(kEiffelDocs);
  for (std::size_t k = 0; k < kSkillCount; ++k) {
    const auto out = extract_relevant_segment(kEiffelQuestion, docs, static_cast<Skill>(k), mock);
    for (const auto& ref : out.segment.sources) {
      EXPECT_NE(out.segment.text.find(docs.sentence(ref)), std::string::npos);
      EXPECT_NE(kEiffelDocs[ref.first].find(docs.sentence(ref)), std::string::npos);
    }
  }
}

TEST(Prompt, FillsEverySlotDeterministically) {
  auto ex = make_example({Skill::kDeductive, Skill::kAnalogical, Skill::kCriticalThinking},
                         "Which is taller, Big Ben or the Colosseum?");
  ex.answer = "Big Ben";
  const std::vector<FocusedSegment> segments = {{"Seg one.", {{0, 0}}}, {"Seg two.", {{0, 1}}},
                                                {"Seg three.", {{0, 2}}}};
  const auto p = format_prompt("Q here?", segments, ex);
  EXPECT_EQ(p, format_prompt("Q here?", segments, ex));
  EXPECT_NE(p.find("- The original question: Q here?"), std::string::npos);
  EXPECT_NE(p.find("- A document or context: "), std::string::npos);
  EXPECT_NE(p.find("- A selected reasoning path: "), std::string::npos);
  EXPECT_NE(p.find("- The specific skills used in the reasoning path: "), std::string::npos);
  EXPECT_EQ(p.find("{{"), std::string::npos);
  const auto d = p.find("Deductive, Analogical, Critical Thinking");
  EXPECT_NE(p.find("\n2. step 2 (Analogical)"), std::string::npos);
  const auto a = p.find("Analogical", d);
  const auto c = p.find("Critical Thinking", a);
  EXPECT_NE(d, std::string::npos);
  EXPECT_NE(a, std::string::npos);
  EXPECT_NE(c, std::string::npos);
  EXPECT_NE(p.find("Seg two."), std::string::npos);
  EXPECT_NE(p.find("Which is taller, Big Ben or the Colosseum?"), std::string::npos);
}

TEST(Prompt, UnknownSlotInOverrideIsReported) {
  testsupport::TempDir dir("prompts");
  std::ofstream(dir / "answer.txt") << "Q={{Q}} X={{EXTRA}}";
  const auto lib = PromptLibrary::from_directory(dir.path());
  EXPECT_EQ(code_of([&] { format_prompt("Q?", {{"Seg.", {{0, 0}}}}, make_example({Skill::kDeductive}), lib); }),
            ErrorCode::kTemplateSlotMissing);
}

TEST(MarkedAnswer, LastSpanTrimmed) {
  EXPECT_EQ(marked_answer("x <answer> 1887 </answer> wait <answer>1889</answer>"), "1889");
  EXPECT_FALSE(marked_answer("no markers").has_value());
}

TEST(Answer, LennonBridgeQuestion) {
  MockProvider mock{MockProvider::Responder(fixture_responder())};
  const auto c = bridge_collection();
  const auto trace = answer(kLennonQuestion, DocumentSet(kLennonDocs), c, SelectionMode::kFull, mock);
  EXPECT_NE(trace.answer.find("Liverpool"), std::string::npos);
  EXPECT_EQ(trace.selected_example_id, 0u);
  EXPECT_EQ(trace.focused_segments.size(), c.examples()[0].strategy.skills.size());
  // Two distinct skills: two extraction calls plus the final answer.
  EXPECT_EQ(trace.calls, 3u);
  EXPECT_EQ(mock.calls(), 3u);
  EXPECT_EQ(trace.focused_segments[0].text, trace.focused_segments[2].text);
  EXPECT_GT(trace.usage.total_tokens, 0);
  EXPECT_EQ(trace.prompt_hash.size(), 64u);
}

TEST(Answer, EiffelConstructionYear) {
  MockProvider mock{MockProvider::Responder(fixture_responder())};
  const auto c = build_collection({make_example({Skill::kDeductive}, "In what year was Big Ben built?")});
  const auto trace = answer(kEiffelQuestion, DocumentSet(kEiffelDocs), c, SelectionMode::kFull, mock);
  EXPECT_NE(trace.answer.find("1889"), std::string::npos);
  ASSERT_EQ(trace.focused_segments.size(), 1u);
  EXPECT_NE(kEiffelDocs[0].find(trace.focused_segments[0].text), std::string::npos);
}

TEST(Answer, WithoutMarkersTheWholeCompletionIsTheAnswer) {
  MockProvider mock([](const CompletionRequest& r) {
    return r.tag == "answer" ? std::string("Paris, in 1889.") : synthetic_reply(r);
  });
  const auto c = build_collection({make_example({Skill::kDeductive})});
  const auto trace = answer(kEiffelQuestion, DocumentSet(kEiffelDocs), c, SelectionMode::kFull, mock);
  EXPECT_EQ(trace.answer, "Paris, in 1889.");
  EXPECT_EQ(trace.chain, "Paris, in 1889.");
}

TEST(Answer, ErrorsCarryStageLabels) {
  MockProvider inventive([](const CompletionRequest& r) {
    return r.tag == "segment" ? std::string("Something invented.") : std::string("x");
  });
  try {
    answer(kLennonQuestion, DocumentSet(kLennonDocs), bridge_collection(), SelectionMode::kFull, inventive);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSegmentNotInDocument);
    EXPECT_NE(e.stage().find("extract"), std::string::npos);
  }
  MockProvider any("x");
  try {
    answer(kLennonQuestion, DocumentSet(kLennonDocs), bridge_collection(), SelectionMode::kRandom, any);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_NE(e.stage().find("select"), std::string::npos);
  }
}

TEST(Answer, ReplayIsByteIdentical) {
  MockProvider mock{MockProvider::Responder(fixture_responder())};
  RecordingProvider recorder(mock, "2026-01-01T00:00:00Z");
  const auto c = bridge_collection();
  const DocumentSet docs(kLennonDocs);
  AnswerOptions opts;
  opts.parallelism = 4;
  const auto live = trace_to_json(answer(kLennonQuestion, docs, c, SelectionMode::kFull, recorder, opts)).dump();
  ReplayProvider replay(recorder.transcript());
  const auto first = trace_to_json(answer(kLennonQuestion, docs, c, SelectionMode::kFull, replay, opts)).dump();
  replay.rewind();
  const auto second = trace_to_json(answer(kLennonQuestion, docs, c, SelectionMode::kFull, replay, opts)).dump();
  EXPECT_EQ(first, live);
  EXPECT_EQ(second, first);
}

TEST(RunLog, RoundTripAndParseErrors) {
  MockProvider mock{MockProvider::Responder(fixture_responder())};
  auto trace = answer(kLennonQuestion, DocumentSet(kLennonDocs), bridge_collection(), SelectionMode::kFull, mock);
  trace.question_id = "q1";
  testsupport::TempDir dir("runlog");
  {
    std::ofstream out(dir / "run.jsonl");
    out << trace_to_json(trace).dump() << "\n";
  }
  const auto entries = load_run_log(dir / "run.jsonl");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].question_id, "q1");
  EXPECT_EQ(entries[0].answer, trace.answer);
  EXPECT_EQ(entries[0].usage.total_tokens, trace.usage.total_tokens);
  EXPECT_EQ(entries[0].segments.size(), trace.focused_segments.size());

  std::ofstream(dir / "bad.jsonl") << trace_to_json(trace).dump() << "\n{oops\n";
  try {
    load_run_log(dir / "bad.jsonl");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos);
  }
  EXPECT_EQ(code_of([&] { load_run_log(dir / "missing.jsonl"); }), ErrorCode::kStorageError);
}
