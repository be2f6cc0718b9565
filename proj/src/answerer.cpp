#include "pathguide/answerer.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "pathguide/error.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

DocumentSet::DocumentSet(std::vector<std::string> documents) : documents_(std::move(documents)) {
  for (std::size_t d = 0; d < documents_.size(); ++d) {
    sentences_.push_back(text::split_sentences(documents_[d]));
    for (std::size_t s = 0; s < sentences_.back().size(); ++s) flat_.emplace_back(d, s);
  }
}

std::optional<SentenceRef> DocumentSet::find(std::string_view candidate) const {
  const std::string key = text::comparable(candidate);
  if (key.empty()) return std::nullopt;
  for (const auto& ref : flat_) {
    if (text::comparable(sentence(ref)) == key) return ref;
  }
  return std::nullopt;
}

std::string DocumentSet::joined() const {
  std::string out;
  for (const auto& d : documents_) {
    if (!out.empty()) out += "\n\n";
    out += text::trim(d);
  }
  return out;
}

namespace {

std::string numbered_sentences(const DocumentSet& docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.flat().size(); ++i) {
    out += "[" + std::to_string(i + 1) + "] " + docs.sentence(docs.flat()[i]) + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

// nullopt when some line is not a document sentence.
std::optional<std::vector<SentenceRef>> match_reply(const std::string& reply,
                                                    const DocumentSet& docs) {
  static const std::regex kIndexOnly(R"(^\[?(\d+)\]?[.):]?$)");
  static const std::regex kMarker(R"(^(?:\[\d+\]|\d+[.)])\s*)");
  static const std::regex kBullet(R"(^[-*•]\s+)");
  std::vector<SentenceRef> refs;
  std::set<SentenceRef> seen;
  std::istringstream in(reply);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty()) continue;
    std::vector<SentenceRef> found;
    if (std::regex_match(line, m, kIndexOnly)) {
      const std::size_t k = std::stoul(m[1].str());
      if (k == 0 || k > docs.flat().size()) return std::nullopt;
      found.push_back(docs.flat()[k - 1]);
    } else {
      line = std::regex_replace(line, kBullet, "", std::regex_constants::format_first_only);
      line = std::regex_replace(line, kMarker, "", std::regex_constants::format_first_only);
      if (auto ref = docs.find(line)) {
        found.push_back(*ref);
      } else {
        // A line may hold several adjacent sentences.
        for (const auto& piece : text::split_sentences(line)) {
          auto r = docs.find(piece);
          if (!r) return std::nullopt;
          found.push_back(*r);
        }
      }
    }
    for (const auto& r : found) {
      if (seen.insert(r).second) refs.push_back(r);
    }
  }
  if (refs.empty()) return std::nullopt;
  return refs;
}

FocusedSegment segment_from(const std::vector<SentenceRef>& refs, const DocumentSet& docs) {
  FocusedSegment seg;
  seg.sources = refs;
  for (const auto& r : refs) {
    if (!seg.text.empty()) seg.text += " ";
    seg.text += docs.sentence(r);
  }
  return seg;
}

}  // namespace

ExtractionOutcome extract_relevant_segment(const std::string& question, const DocumentSet& docs,
                                           Skill skill, Provider& provider,
                                           const PromptLibrary& prompts) {
  if (docs.sentence_count() == 0) fail(ErrorCode::kInvalidArgument, "document is empty");
  ExtractionOutcome out;
  if (docs.sentence_count() == 1) {
    out.segment = segment_from({docs.flat().front()}, docs);
    return out;
  }
  const auto& info = skill_info(skill);
  CompletionRequest req;
  req.prompt = prompts.render(PromptKind::kSegment,
                              {{"QUESTION", question},
                               {"SKILL", std::string(info.name)},
                               {"SKILL_DESCRIPTION", std::string(info.description)},
                               {"SENTENCES", numbered_sentences(docs)}});
  req.tag = "segment";
  for (int attempt = 0; attempt < 2; ++attempt) {
    const CompletionResult r = provider.complete(req);
    out.usage += r.usage;
    out.latency_ms += r.latency_ms;
    ++out.calls;
    if (auto refs = match_reply(r.text, docs)) {
      out.segment = segment_from(*refs, docs);
      return out;
    }
    req.prompt += "\nYour previous reply contained text that is not in the document. "
                  "Copy complete sentences exactly as they appear above.";
  }
  fail(ErrorCode::kSegmentNotInDocument,
       "provider returned text outside the document for skill " + std::string(info.name));
}

std::string format_prompt(const std::string& question, const std::vector<FocusedSegment>& segments,
                          const SimilarExample& example, const PromptLibrary& prompts) {
  const auto& strategy = example.strategy;
  strategy.validate();
  if (segments.size() != strategy.skills.size()) {
    fail(ErrorCode::kLengthMismatch, std::to_string(segments.size()) + " segments for " +
                                         std::to_string(strategy.skills.size()) + " skills");
  }
  std::string d;
  std::string r;
  std::string skills;
  for (std::size_t i = 0; i < strategy.skills.size(); ++i) {
    const std::string name(skill_name(strategy.skills[i]));
    const std::string n = std::to_string(i + 1);
    d += "\nSegment " + n + " (" + name + "): " + segments[i].text;
    r += "\n" + n + ". " + strategy.subquestions[i] + " (" + name + ")";
    skills += (i == 0 ? "" : ", ") + name;
  }
  std::string s = skills + "\nDemonstration example:\nQuestion: " + example.question;
  for (std::size_t i = 0; i < example.reference_docs.size(); ++i) {
    s += "\nReference " + std::to_string(i + 1) + ": " + example.reference_docs[i];
  }
  s += "\nAnswer: " + example.answer;
  return prompts.render(PromptKind::kAnswer, {{"Q", question}, {"D", d}, {"R", r}, {"S", s}});
}

std::optional<std::string> marked_answer(std::string_view completion) {
  const std::string lower = text::to_lower(completion);
  const auto open = lower.rfind("<answer>");
  if (open == std::string::npos) return std::nullopt;
  const auto start = open + 8;
  auto close = lower.find("</answer>", start);
  if (close == std::string::npos) close = lower.size();
  std::string span = text::trim(completion.substr(start, close - start));
  if (span.empty()) return std::nullopt;
  return span;
}

AnswerTrace run_guided_answer(const std::string& question, const DocumentSet& docs,
                              const ExampleCollection& collection, std::size_t example_index,
                              Provider& provider, const AnswerOptions& options) {
  if (text::trim(question).empty()) fail(ErrorCode::kEmptyQuestion, "question is empty");
  if (docs.sentence_count() == 0) fail(ErrorCode::kInvalidArgument, "document is empty");
  if (example_index >= collection.n()) {
    fail(ErrorCode::kInvalidArgument, "example index " + std::to_string(example_index) +
                                          " outside collection of " +
                                          std::to_string(collection.n()));
  }
  const PromptLibrary& prompts = options.prompts ? *options.prompts : PromptLibrary::defaults();
  const SimilarExample& example = collection.examples()[example_index];

  AnswerTrace trace;
  trace.question = question;
  trace.selected_example_id = example_index;

  std::vector<Skill> distinct;
  for (Skill s : example.strategy.skills) {
    if (std::find(distinct.begin(), distinct.end(), s) == distinct.end()) distinct.push_back(s);
  }
  std::vector<ExtractionOutcome> extracted(distinct.size());
  try {
    parallel_for(distinct.size(), options.parallelism, [&](std::size_t i) {
      extracted[i] = extract_relevant_segment(question, docs, distinct[i], provider, prompts);
    });
  } catch (const Error& e) {
    throw e.with_stage("extract");
  }
  for (const auto& e : extracted) {
    trace.usage += e.usage;
    trace.latency_ms += e.latency_ms;
    trace.calls += e.calls;
  }
  for (Skill s : example.strategy.skills) {
    const auto pos = static_cast<std::size_t>(std::find(distinct.begin(), distinct.end(), s) -
                                              distinct.begin());
    trace.focused_segments.push_back(extracted[pos].segment);
  }

  try {
    trace.prompt = format_prompt(question, trace.focused_segments, example, prompts);
    trace.prompt_hash = text::sha256_hex(trace.prompt);
    CompletionRequest req;
    req.prompt = trace.prompt;
    req.tag = "answer";
    const CompletionResult r = provider.complete(req);
    trace.usage += r.usage;
    trace.latency_ms += r.latency_ms;
    ++trace.calls;
    trace.chain = r.text;
    trace.answer = marked_answer(r.text).value_or(text::trim(r.text));
  } catch (const Error& e) {
    throw e.with_stage("answer");
  }
  if (trace.answer.empty()) fail(ErrorCode::kEmptyAnswer, "provider returned an empty answer");
  return trace;
}

AnswerTrace answer(const std::string& question, const DocumentSet& docs,
                   const ExampleCollection& collection, SelectionMode mode, Provider& provider,
                   const AnswerOptions& options) {
  MatchResult selection;
  try {
    selection = select_best(collection, mode, options.selection);
  } catch (const Error& e) {
    throw e.with_stage("select");
  }
  AnswerTrace trace =
      run_guided_answer(question, docs, collection, selection.selected_index, provider, options);
  trace.selection = std::move(selection);
  return trace;
}

nlohmann::ordered_json trace_to_json(const AnswerTrace& trace) {
  nlohmann::ordered_json j;
  j["question_id"] = trace.question_id;
  j["selected_example_id"] = trace.selected_example_id;
  auto segments = nlohmann::ordered_json::array();
  for (const auto& s : trace.focused_segments) segments.push_back(s.text);
  j["segments"] = std::move(segments);
  j["prompt_hash"] = trace.prompt_hash;
  j["answer"] = trace.answer;
  j["chain"] = trace.chain;
  j["usage"] = {{"prompt_tokens", trace.usage.prompt_tokens},
                {"completion_tokens", trace.usage.completion_tokens},
                {"total_tokens", trace.usage.total_tokens},
                {"latency_ms", trace.latency_ms}};
  return j;
}

std::vector<RunLogEntry> load_run_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open run log " + path.string());
  std::vector<RunLogEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      RunLogEntry e;
      e.question_id = j.at("question_id").get<std::string>();
      e.selected_example_id = j.at("selected_example_id").get<std::size_t>();
      e.segments = j.at("segments").get<std::vector<std::string>>();
      e.prompt_hash = j.at("prompt_hash").get<std::string>();
      e.answer = j.at("answer").get<std::string>();
      e.chain = j.value("chain", e.answer);
      const auto& u = j.at("usage");
      e.usage.prompt_tokens = u.at("prompt_tokens").get<std::int64_t>();
      e.usage.completion_tokens = u.at("completion_tokens").get<std::int64_t>();
      e.usage.total_tokens = u.at("total_tokens").get<std::int64_t>();
      e.latency_ms = u.value("latency_ms", 0.0);
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace pathguide
