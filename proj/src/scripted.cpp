#include "pathguide/scripted.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "pathguide/error.hpp"
#include "pathguide/examplegen.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

ScriptedResponder::ScriptedResponder(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}

ScriptedResponder ScriptedResponder::parse(std::string_view json_text) {
  std::vector<ScriptRule> rules;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (const auto& r : j.at("rules")) {
      rules.push_back(ScriptRule{r.value("tag", ""), r.value("contains", ""),
                                 r.at("reply").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("mock script: ") + e.what());
  }
  return ScriptedResponder(std::move(rules));
}

ScriptedResponder ScriptedResponder::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open mock script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ScriptedResponder::operator()(const CompletionRequest& request) const {
  for (const auto& rule : rules_) {
    if (!rule.tag.empty() && rule.tag != request.tag) continue;
    if (!rule.contains.empty() && request.prompt.find(rule.contains) == std::string::npos) continue;
    return rule.reply;
  }
  return synthetic_reply(request);
}

namespace {

std::uint64_t stable_hash(std::string_view s) {
  return std::stoull(text::sha256_hex(s).substr(0, 15), nullptr, 16);
}

// Text after the last line starting with `label`, or empty.
std::string line_after(const std::string& prompt, std::string_view label) {
  std::istringstream in(prompt);
  std::string line;
  std::string found;
  while (std::getline(in, line)) {
    const std::string t = text::trim(line);
    if (t.starts_with(label)) found = text::trim(std::string_view(t).substr(label.size()));
  }
  return found;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::string reply_substitutes(const std::string& prompt) {
  static const std::regex kSlot(R"(\[([^\]]+)\]\s*\(([^)]+)\))");
  const std::string slots = line_after(prompt, "Slots:");
  int count = 5;
  static const std::regex kCount(R"(Propose (\d+) different)");
  std::smatch m;
  if (std::regex_search(prompt, m, kCount)) count = std::stoi(m[1].str());
  std::vector<std::pair<std::string, std::string>> parsed;
  for (auto it = std::sregex_iterator(slots.begin(), slots.end(), kSlot); it != std::sregex_iterator();
       ++it) {
    parsed.emplace_back((*it)[1].str(), (*it)[2].str());
  }
  const auto& pool = EntityPool::bundled();
  const std::uint64_t h = stable_hash(prompt);
  std::string out;
  for (int i = 0; i < count; ++i) {
    out += std::to_string(i + 1) + ".";
    for (std::size_t k = 0; k < parsed.size(); ++k) {
      const auto* list = pool.entries(parsed[k].second);
      if (list == nullptr) list = pool.entries("object");
      const std::size_t idx = (h + static_cast<std::size_t>(i) * 7 + k * 3) % list->size();
      out += (k == 0 ? " [" : "; [") + parsed[k].first + "] = " + (*list)[idx];
    }
    out += "\n";
  }
  return out;
}

std::string reply_paraphrase(const std::string& prompt) {
  const std::string q = line_after(prompt, "Original question:");
  static const char* kFrames[] = {"Do you know {}", "Tell me: {}", "Quick question: {}",
                                  "I wonder, {}", "Can you say {}"};
  std::string body = q;
  if (!body.empty()) body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
  std::string out;
  int n = 1;
  for (const char* frame : kFrames) {
    std::string s = frame;
    s.replace(s.find("{}"), 2, body);
    out += std::to_string(n++) + ". " + s + "\n";
  }
  return out;
}

std::string reply_similarity(const std::string& prompt) {
  const std::string a = line_after(prompt, "You are given an original question:");
  const std::string b = line_after(prompt, "You also have a synthetic question:");
  const auto wa = text::normalized_words(a);
  const auto wb = text::normalized_words(b);
  const long diff = std::labs(static_cast<long>(wa.size()) - static_cast<long>(wb.size()));
  const long jitter = static_cast<long>(stable_hash(a + "\x1f" + b) % 3);
  const long score = std::clamp(10L - diff - jitter, 1L, 10L);
  return "Explanation: Both questions ask for the same kind of fact about entities of the same "
         "types, so their structure is close.\nScore (1-10): " +
         std::to_string(score);
}

std::string reply_strategy(const std::string& prompt) {
  const std::string q = unquote(line_after(prompt, "Input Question:"));
  const std::uint64_t h = stable_hash(q);
  static const char* kSteps[] = {
      "Identify the entities the question is about",
      "Break the question into the facts that must be looked up",
      "Recall the relevant fact for each entity",
      "Compare the recalled facts",
      "Check the comparison against what the question asks",
      "State the conclusion",
  };
  const std::size_t length = 2 + h % 3;
  std::string out = "Step-by-step Reasoning Path:\n";
  std::string used;
  for (std::size_t i = 0; i < length; ++i) {
    const auto skill = static_cast<Skill>((h >> (4 * i)) % kSkillCount);
    const std::string key(skill_key(skill));
    out += std::to_string(i + 1) + ". " + kSteps[(i * 2 + h) % 6] + ". (" + key + ")\n";
    used += (i == 0 ? "" : ", ") + key;
  }
  out += "Generated Answer: \"The answer follows from the facts about " + q + "\"\n";
  out += "Reasoning Skill Used: " + used + ".\n";
  return out;
}

std::string reply_reference(const std::string& prompt) {
  const std::string sub = line_after(prompt, "Subquestion:");
  return "This passage covers the step: " + sub + " The relevant record is well documented. "
         "It gives the fact needed for this step.";
}

std::string reply_segment(const std::string& prompt) {
  static const std::regex kSentence(R"(^\[(\d+)\] (.*)$)");
  const std::string q = line_after(prompt, "Question:");
  const auto qw = text::normalized_words(q);
  std::vector<std::pair<std::size_t, std::string>> scored;
  std::istringstream in(prompt);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!std::regex_match(line, m, kSentence)) continue;
    const auto sw = text::normalized_words(m[2].str());
    std::size_t overlap = 0;
    for (const auto& w : sw) overlap += std::count(qw.begin(), qw.end(), w) > 0 ? 1 : 0;
    scored.emplace_back(overlap, m[2].str());
  }
  if (scored.empty()) return "";
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  return scored.front().second;
}

std::string reply_answer(const std::string& prompt) {
  static const std::regex kSegment(R"(^Segment \d+ \([^)]*\): (.*)$)");
  std::istringstream in(prompt);
  std::string line;
  std::smatch m;
  std::string first;
  while (std::getline(in, line)) {
    if (std::regex_match(line, m, kSegment)) {
      first = m[1].str();
      break;
    }
  }
  if (first.empty()) return "<answer>unknown</answer>";
  return "Following the reasoning path, the document states: " + first + "\n<answer>" + first +
         "</answer>";
}

}  // namespace

std::string synthetic_reply(const CompletionRequest& request) {
  const std::string& p = request.prompt;
  if (request.tag == "substitutes") return reply_substitutes(p);
  if (request.tag == "paraphrase") return reply_paraphrase(p);
  if (request.tag == "similarity") return reply_similarity(p);
  if (request.tag == "strategy") return reply_strategy(p);
  if (request.tag == "reference_doc") return reply_reference(p);
  if (request.tag == "segment") return reply_segment(p);
  if (request.tag == "answer") return reply_answer(p);
  return "Acknowledged.";
}

}  // namespace pathguide
