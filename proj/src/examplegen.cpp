#include "pathguide/examplegen.hpp"

#include <cctype>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pathguide/error.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

std::string_view construction_mode_key(ConstructionMode mode) {
  switch (mode) {
    case ConstructionMode::kRandomFill: return "random_fill";
    case ConstructionMode::kGuidedFill: return "guided_fill";
    case ConstructionMode::kTemplateVariation: return "template_variation";
  }
  return {};
}

ConstructionMode parse_construction_mode(std::string_view text) {
  std::string key(text);
  for (auto& c : key) c = (c == '-') ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto mode : {ConstructionMode::kRandomFill, ConstructionMode::kGuidedFill,
                    ConstructionMode::kTemplateVariation}) {
    if (construction_mode_key(mode) == key) return mode;
  }
  fail(ErrorCode::kInvalidArgument, "unknown construction mode '" + std::string(text) + "'");
}

void ReasoningStrategy::validate() const {
  if (skills.empty()) fail(ErrorCode::kUnparseableStrategy, "strategy has no skills");
  if (skills.size() != subquestions.size()) {
    fail(ErrorCode::kUnparseableStrategy,
         std::to_string(subquestions.size()) + " subquestions but " +
             std::to_string(skills.size()) + " skills");
  }
}

void GenerationConfig::validate() const {
  if (delta < 1 || delta > 10) fail(ErrorCode::kInvalidArgument, "delta must be within [1, 10]");
  if (target_count < 1) fail(ErrorCode::kInvalidArgument, "target_count must be >= 1");
  if (max_candidates < 1) fail(ErrorCode::kInvalidArgument, "max_candidates must be >= 1");
}

// --- entity pool -----------------------------------------------------------

const EntityPool& EntityPool::bundled() {
  static const EntityPool kPool = parse(bundled_data("entity_pool.json"));
  return kPool;
}

EntityPool EntityPool::parse(std::string_view json_text) {
  EntityPool pool;
  try {
    const auto j = nlohmann::json::parse(json_text);
    pool.version_ = j.at("version").get<int>();
    for (const auto& [type, list] : j.at("types").items()) {
      pool.by_type_[type] = list.get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::kParseError, std::string("entity pool: ") + ex.what());
  }
  return pool;
}

EntityPool EntityPool::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open entity pool " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::vector<std::string>* EntityPool::entries(const std::string& type) const {
  auto it = by_type_.find(type);
  if (it == by_type_.end() || it->second.empty()) return nullptr;
  return &it->second;
}

// --- candidates ------------------------------------------------------------

std::vector<std::pair<int, std::string>> numbered_lines(std::string_view reply) {
  static const std::regex kLine(R"(^\s*(?:[*_#]+\s*)?(?:step\s*)?(\d+)\s*[.):]\s*(.*\S)\s*$)",
                                std::regex::icase);
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in{std::string(reply)};
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_match(line, m, kLine)) {
      out.emplace_back(std::stoi(m[1].str()), m[2].str());
    }
  }
  return out;
}

namespace {

std::string fold_question(std::string_view q) {
  return text::collapse_whitespace(text::to_lower(text::trim(q)));
}

std::string strip_quotes(std::string s) {
  s = text::trim(s);
  while (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                           (s.front() == '\'' && s.back() == '\'') ||
                           (s.front() == '*' && s.back() == '*'))) {
    s = text::trim(std::string_view(s).substr(1, s.size() - 2));
  }
  return s;
}

void push_unique(std::vector<CandidateQuestion>& out, std::set<std::string>& seen,
                 CandidateQuestion c) {
  c.text = text::trim(c.text);
  if (c.text.empty()) return;
  if (seen.insert(fold_question(c.text)).second) out.push_back(std::move(c));
}

std::vector<CandidateQuestion> random_fill(const QuestionTemplate& tmpl,
                                           const GenerationConfig& config,
                                           const EntityPool& pool) {
  std::vector<CandidateQuestion> out;
  std::set<std::string> seen;
  if (tmpl.placeholders.empty()) {
    push_unique(out, seen, CandidateQuestion{tmpl.original, {}, std::nullopt});
    return out;
  }
  seen.insert(fold_question(tmpl.original));
  std::mt19937_64 rng(config.seed);
  const std::size_t attempts = config.max_candidates * 8;
  for (std::size_t a = 0; a < attempts && out.size() < config.max_candidates; ++a) {
    std::map<std::string, std::string> subs;
    std::set<std::string> used;
    for (const auto& p : tmpl.placeholders) {
      const auto* list = pool.entries(p.type);
      if (list == nullptr) list = pool.entries("object");
      std::string pick = p.surface();
      if (list != nullptr) {
        // Avoid reusing one entity for two slots of the same question.
        for (int tries = 0; tries < 8; ++tries) {
          pick = (*list)[rng() % list->size()];
          if (!used.contains(pick)) break;
        }
      }
      used.insert(pick);
      subs[p.label()] = pick;
    }
    CandidateQuestion c;
    c.text = render_template(tmpl, subs);
    c.substitutions = std::move(subs);
    push_unique(out, seen, std::move(c));
  }
  return out;
}

std::string describe_slots(const QuestionTemplate& tmpl) {
  std::string out;
  for (const auto& p : tmpl.placeholders) {
    if (!out.empty()) out += ", ";
    out += "[" + p.label() + "] (" + p.type + ")";
  }
  return out;
}

std::string describe_originals(const QuestionTemplate& tmpl) {
  std::string out;
  for (const auto& p : tmpl.placeholders) {
    if (!out.empty()) out += "; ";
    out += "[" + p.label() + "] = " + p.surface();
  }
  return out;
}

// "[place 1] = Big Ben; [adj] = older" -> label map, or nullopt.
std::optional<std::map<std::string, std::string>> parse_filling(const QuestionTemplate& tmpl,
                                                                const std::string& line) {
  std::set<std::string> labels;
  for (const auto& p : tmpl.placeholders) labels.insert(p.label());
  std::map<std::string, std::string> subs;
  std::stringstream ss(line);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) continue;
    std::string key = text::trim(std::string_view(part).substr(0, eq));
    if (key.size() >= 2 && key.front() == '[' && key.back() == ']') {
      key = text::trim(std::string_view(key).substr(1, key.size() - 2));
    }
    key = text::to_lower(key);
    std::string value = strip_quotes(part.substr(eq + 1));
    if (!labels.contains(key) || value.empty()) return std::nullopt;
    subs[key] = value;
  }
  if (subs.size() != labels.size()) return std::nullopt;
  return subs;
}

std::vector<CandidateQuestion> guided_fill(const QuestionTemplate& tmpl,
                                           const GenerationConfig& config, Provider& provider,
                                           const PromptLibrary& prompts) {
  CompletionRequest req;
  req.prompt = prompts.render(PromptKind::kSubstitutes,
                              {{"TEMPLATE", tmpl.template_text},
                               {"SLOTS", describe_slots(tmpl)},
                               {"COUNT", std::to_string(config.max_candidates)},
                               {"ORIGINAL", describe_originals(tmpl)}});
  req.tag = "substitutes";
  const CompletionResult reply = provider.complete(req);
  std::vector<CandidateQuestion> out;
  for (const auto& [n, line] : numbered_lines(reply.text)) {
    auto subs = parse_filling(tmpl, line);
    if (!subs) continue;
    CandidateQuestion c;
    c.text = render_template(tmpl, *subs);
    c.substitutions = std::move(*subs);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CandidateQuestion> paraphrases(const QuestionTemplate& tmpl,
                                           const GenerationConfig& config, Provider& provider,
                                           const PromptLibrary& prompts) {
  CompletionRequest req;
  req.prompt = prompts.render(PromptKind::kParaphrase,
                              {{"QUESTION", tmpl.original},
                               {"TEMPLATE", tmpl.template_text},
                               {"COUNT", std::to_string(config.max_candidates)}});
  req.tag = "paraphrase";
  const CompletionResult reply = provider.complete(req);
  std::vector<CandidateQuestion> out;
  for (const auto& [n, line] : numbered_lines(reply.text)) {
    out.push_back(CandidateQuestion{strip_quotes(line), {}, std::nullopt});
  }
  return out;
}

}  // namespace

std::vector<CandidateQuestion> generate_candidates(const QuestionTemplate& tmpl,
                                                   const GenerationConfig& config,
                                                   Provider& provider,
                                                   const PromptLibrary& prompts,
                                                   const EntityPool& pool) {
  config.validate();
  std::vector<CandidateQuestion> out;
  std::set<std::string> seen;
  switch (config.mode) {
    case ConstructionMode::kRandomFill:
      out = random_fill(tmpl, config, pool);
      break;
    case ConstructionMode::kGuidedFill:
      if (tmpl.placeholders.empty()) {
        push_unique(out, seen, CandidateQuestion{tmpl.original, {}, std::nullopt});
      } else {
        for (auto& c : guided_fill(tmpl, config, provider, prompts)) {
          push_unique(out, seen, std::move(c));
        }
      }
      break;
    case ConstructionMode::kTemplateVariation: {
      std::vector<CandidateQuestion> filled;
      if (!tmpl.placeholders.empty()) filled = guided_fill(tmpl, config, provider, prompts);
      std::vector<CandidateQuestion> varied = paraphrases(tmpl, config, provider, prompts);
      // Interleave so the cap keeps both kinds.
      for (std::size_t i = 0; i < std::max(filled.size(), varied.size()); ++i) {
        if (i < varied.size()) push_unique(out, seen, std::move(varied[i]));
        if (i < filled.size()) push_unique(out, seen, std::move(filled[i]));
      }
      break;
    }
  }
  if (out.size() > config.max_candidates) out.resize(config.max_candidates);
  if (out.empty()) {
    fail(ErrorCode::kNoCandidates, "no parseable candidate questions for '" + tmpl.original + "'");
  }
  return out;
}

// --- similarity ------------------------------------------------------------

namespace {

struct NumberToken {
  std::size_t pos;
  std::string digits;
  bool fractional;
};

std::vector<NumberToken> number_tokens(std::string_view s) {
  std::vector<NumberToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    NumberToken t{i, std::string(s.substr(i, j - i)), false};
    if (j + 1 < s.size() && (s[j] == '.' || s[j] == ',') &&
        std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
      t.fractional = true;
      ++j;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    }
    out.push_back(std::move(t));
    i = j;
  }
  return out;
}

int checked_score(const NumberToken& t, std::string_view reply) {
  if (t.fractional || t.digits.size() > 2) {
    fail(ErrorCode::kUnparseableScore, "score is not an integer in 1..10: '" +
                                           std::string(reply.substr(t.pos, 8)) + "'");
  }
  const int v = std::stoi(t.digits);
  if (v < 1 || v > 10) {
    fail(ErrorCode::kUnparseableScore, "score " + std::to_string(v) + " outside [1, 10]");
  }
  return v;
}

}  // namespace

int parse_similarity_score(std::string_view reply) {
  const std::string lower = text::to_lower(reply);
  // Prefer the number right after the last "score" label.
  const auto label = lower.rfind("score");
  if (label != std::string::npos) {
    std::size_t i = label + 5;
    auto skip_ws = [&] {
      while (i < lower.size() && (std::isspace(static_cast<unsigned char>(lower[i])) ||
                                  lower[i] == '*')) ++i;
    };
    skip_ws();
    if (i < lower.size() && lower[i] == '(') {
      const auto close = lower.find(')', i);
      if (close != std::string::npos) i = close + 1;
    }
    skip_ws();
    if (i < lower.size() && (lower[i] == ':' || lower[i] == '=')) ++i;
    else if (lower.compare(i, 2, "is") == 0) i += 2;
    skip_ws();
    if (i < lower.size() && std::isdigit(static_cast<unsigned char>(lower[i]))) {
      auto nums = number_tokens(std::string_view(reply).substr(i));
      NumberToken t = nums.front();
      t.pos += i;
      return checked_score(t, reply);
    }
  }
  const auto nums = number_tokens(reply);
  if (nums.empty()) fail(ErrorCode::kUnparseableScore, "no score found in reply");
  return checked_score(nums.back(), reply);
}

int score_similarity(const std::string& original, const std::string& candidate,
                     Provider& provider, const PromptLibrary& prompts) {
  if (text::trim(original).empty() || text::trim(candidate).empty()) {
    fail(ErrorCode::kInvalidArgument, "similarity needs two non-empty questions");
  }
  CompletionRequest req;
  req.prompt = prompts.render(PromptKind::kSimilarity,
                              {{"ORIGINAL_QUESTION", original}, {"SYNTHETIC_QUESTION", candidate}});
  req.tag = "similarity";
  return parse_similarity_score(provider.complete(req).text);
}

std::vector<CandidateQuestion> filter_candidates(const std::vector<CandidateQuestion>& candidates,
                                                 int delta) {
  std::vector<CandidateQuestion> kept;
  for (const auto& c : candidates) {
    if (!c.similarity_score) {
      fail(ErrorCode::kMissingScore, "candidate '" + c.text + "' has no similarity score");
    }
    if (*c.similarity_score >= delta) kept.push_back(c);
  }
  return kept;
}

// --- strategy --------------------------------------------------------------

namespace {

std::string strip_markdown(std::string s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '*' || s[i] == '`') continue;
    out.push_back(s[i]);
  }
  return text::trim(out);
}

std::optional<std::string> labelled_value(const std::string& line, std::string_view label) {
  const std::string clean = strip_markdown(line);
  if (!text::starts_with_ci(clean, label)) return std::nullopt;
  return text::trim(std::string_view(clean).substr(label.size()));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ';') {
      out.push_back(text::trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!text::trim(cur).empty()) out.push_back(text::trim(cur));
  while (!out.empty() && out.back().ends_with('.')) {
    out.back().pop_back();
    if (text::trim(out.back()).empty()) out.pop_back();
    break;
  }
  return out;
}

}  // namespace

StrategyReply parse_strategy_reply(std::string_view reply) {
  StrategyReply out;
  std::vector<std::string> steps;
  std::vector<std::string> skills_used;

  std::istringstream in{std::string(reply)};
  std::string line;
  static const std::regex kStep(R"(^\s*(?:[*_#]+\s*)?(?:step\s*)?(\d+)\s*[.):]\s*(.*\S)\s*$)",
                                std::regex::icase);
  int expected = 1;
  bool block_closed = false;
  std::smatch m;
  while (std::getline(in, line)) {
    if (auto v = labelled_value(line, "Generated Answer:")) {
      out.answer = strip_quotes(*v);
      if (!steps.empty()) block_closed = true;
      continue;
    }
    if (auto v = labelled_value(line, "Reasoning Skill Used:")) {
      skills_used = split_list(*v);
      continue;
    }
    if (auto v = labelled_value(line, "Reasoning Skills Used:")) {
      skills_used = split_list(*v);
      continue;
    }
    if (out.answer.empty()) {
      if (auto v = labelled_value(line, "Answer:")) {
        out.answer = strip_quotes(*v);
        if (!steps.empty()) block_closed = true;
        continue;
      }
    }
    if (block_closed || !std::regex_match(line, m, kStep)) continue;
    const int n = std::stoi(m[1].str());
    if (n == expected) {
      steps.push_back(m[2].str());
      ++expected;
    } else if (!steps.empty()) {
      block_closed = true;
    }
  }
  if (steps.empty()) fail(ErrorCode::kUnparseableStrategy, "reply has no numbered steps");

  static const std::regex kTrailingSkill(R"(^(.*?)\s*\(([^()]*)\)\s*[.;,]?\s*$)");
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> texts;
  for (const auto& raw : steps) {
    const std::string step = strip_markdown(raw);
    if (std::regex_match(step, m, kTrailingSkill)) {
      texts.push_back(text::trim(m[1].str()));
      labels.push_back(text::trim(m[2].str()));
    } else {
      texts.push_back(step);
      labels.push_back(std::nullopt);
    }
  }

  const bool none_labelled = std::none_of(labels.begin(), labels.end(),
                                          [](const auto& l) { return l.has_value(); });
  if (none_labelled) {
    if (skills_used.size() != steps.size()) {
      fail(ErrorCode::kUnparseableStrategy, "steps carry no reasoning skills");
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      texts[i] = strip_markdown(steps[i]);
      labels[i] = skills_used[i];
    }
  }

  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!labels[i]) {
      fail(ErrorCode::kUnparseableStrategy, "step " + std::to_string(i + 1) + " has no skill");
    }
    try {
      out.strategy.skills.push_back(parse_skill(*labels[i]));
    } catch (const Error& e) {
      fail(ErrorCode::kUnparseableStrategy,
           "step " + std::to_string(i + 1) + ": " + e.detail());
    }
    out.strategy.subquestions.push_back(texts[i]);
  }
  out.strategy.validate();
  return out;
}

StrategyReply build_strategy(const std::string& question, Provider& provider,
                             const PromptLibrary& prompts) {
  if (text::trim(question).empty()) fail(ErrorCode::kEmptyQuestion, "empty question");
  CompletionRequest req;
  req.prompt = prompts.render(PromptKind::kStrategy, {{"SKILLS", describe_taxonomy()},
                                                      {"DOCUMENTS", "None provided."},
                                                      {"QUESTION", question}});
  req.tag = "strategy";
  return parse_strategy_reply(provider.complete(req).text);
}

std::vector<std::string> build_reference_docs(const ReasoningStrategy& strategy,
                                              const std::string& question, Provider& provider,
                                              std::size_t parallelism,
                                              const PromptLibrary& prompts) {
  strategy.validate();
  std::vector<CompletionRequest> requests;
  for (const auto& sub : strategy.subquestions) {
    CompletionRequest req;
    req.prompt = prompts.render(PromptKind::kReferenceDoc,
                                {{"QUESTION", question}, {"SUBQUESTION", sub}});
    req.tag = "reference_doc";
    requests.push_back(std::move(req));
  }
  const auto results = complete_all(provider, requests, parallelism);
  std::vector<std::string> docs;
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::string doc = text::trim(results[i].text);
    if (doc.empty()) {
      fail(ErrorCode::kProviderError,
           "empty reference segment for subquestion " + std::to_string(i + 1));
    }
    docs.push_back(std::move(doc));
  }
  if (docs.size() != strategy.subquestions.size()) {
    fail(ErrorCode::kLengthMismatch, "reference segment count differs from subquestions");
  }
  return docs;
}

SimilarExample assemble_example(std::string question, ReasoningStrategy strategy,
                                std::vector<std::string> docs, std::string answer,
                                ConstructionMode mode) {
  if (docs.size() != strategy.subquestions.size()) {
    fail(ErrorCode::kLengthMismatch, std::to_string(strategy.subquestions.size()) +
                                         " subquestions but " + std::to_string(docs.size()) +
                                         " reference segments");
  }
  if (text::trim(answer).empty()) fail(ErrorCode::kEmptyAnswer, "example answer is empty");
  if (text::trim(question).empty()) fail(ErrorCode::kEmptyQuestion, "example question is empty");
  strategy.validate();
  return SimilarExample{std::move(question), std::move(strategy), std::move(docs),
                        std::move(answer), mode};
}

// --- anonymization ---------------------------------------------------------

namespace {

std::string family_of(const std::string& type) {
  if (type == "property") return "PROPERTY";
  if (type == "number" || type == "date" || type == "value") return "VALUE";
  if (type == "adj") return "ATTRIBUTE";
  return "ENTITY";
}

std::optional<std::vector<Token>> tokens_or_none(const std::string& s, const EntityTagger& tagger) {
  try {
    return classify_tokens(s, tagger);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyQuestion) return std::nullopt;
    throw;
  }
}

}  // namespace

SimilarExample anonymize_example(const SimilarExample& example, const EntityTagger& tagger) {
  std::vector<const std::string*> fields;
  fields.push_back(&example.question);
  for (const auto& s : example.strategy.subquestions) fields.push_back(&s);
  for (const auto& s : example.reference_docs) fields.push_back(&s);
  fields.push_back(&example.answer);

  std::vector<std::optional<std::vector<Token>>> tokenized;
  std::map<std::string, std::vector<std::string>> members;  // family -> keys
  auto key_of = [](const Token& t) { return text::to_lower(t.text); };
  for (const std::string* f : fields) {
    tokenized.push_back(tokens_or_none(*f, tagger));
    if (!tokenized.back()) continue;
    for (const auto& t : *tokenized.back()) {
      if (t.label != TokenLabel::kEntity) continue;
      auto& list = members[family_of(t.entity_type)];
      if (std::find(list.begin(), list.end(), key_of(t)) == list.end()) list.push_back(key_of(t));
    }
  }

  auto label_for = [&](const Token& t) {
    const std::string family = family_of(t.entity_type);
    const auto& list = members.at(family);
    if (list.size() == 1) return "[" + family + "]";
    const auto pos = static_cast<std::size_t>(
        std::find(list.begin(), list.end(), key_of(t)) - list.begin());
    std::string suffix;
    std::size_t n = pos;
    do {
      suffix.insert(suffix.begin(), static_cast<char>('A' + n % 26));
      n = n / 26;
    } while (n-- > 0);
    return "[" + family + "_" + suffix + "]";
  };

  std::vector<std::string> rendered;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    rendered.push_back(tokenized[i] ? render_tokens(*tokenized[i], label_for) : *fields[i]);
  }

  SimilarExample out = example;
  std::size_t k = 0;
  out.question = rendered[k++];
  for (auto& s : out.strategy.subquestions) s = rendered[k++];
  for (auto& s : out.reference_docs) s = rendered[k++];
  out.answer = rendered[k++];
  return out;
}

// --- pipeline --------------------------------------------------------------

GenerationOutcome generate_examples(const QuestionTemplate& tmpl, const GenerationConfig& config,
                                    Provider& provider, const PromptLibrary& prompts,
                                    const EntityPool& pool) {
  GenerationOutcome outcome;
  std::vector<CandidateQuestion> candidates =
      generate_candidates(tmpl, config, provider, prompts, pool);
  outcome.candidates = candidates.size();

  std::vector<std::optional<int>> scores(candidates.size());
  parallel_for(candidates.size(), config.parallelism, [&](std::size_t i) {
    try {
      scores[i] = score_similarity(tmpl.original, candidates[i].text, provider, prompts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnparseableScore) throw;
    }
  });
  std::vector<CandidateQuestion> scored;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!scores[i]) continue;
    candidates[i].similarity_score = scores[i];
    scored.push_back(std::move(candidates[i]));
  }
  outcome.scored = scored.size();

  const std::vector<CandidateQuestion> retained = filter_candidates(scored, config.delta);
  outcome.retained = retained.size();
  if (retained.empty()) {
    fail(ErrorCode::kNoCandidates, "no candidate reached similarity " +
                                       std::to_string(config.delta) + " for '" + tmpl.original +
                                       "'");
  }

  for (const auto& cand : retained) {
    if (outcome.examples.size() >= config.target_count) break;
    try {
      StrategyReply reply = build_strategy(cand.text, provider, prompts);
      std::vector<std::string> docs = build_reference_docs(reply.strategy, cand.text, provider,
                                                           config.parallelism, prompts);
      outcome.examples.push_back(assemble_example(cand.text, std::move(reply.strategy),
                                                  std::move(docs), std::move(reply.answer),
                                                  config.mode));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnparseableStrategy && e.code() != ErrorCode::kEmptyAnswer) {
        throw;
      }
      ++outcome.skipped;
    }
  }
  if (outcome.examples.empty()) {
    fail(ErrorCode::kNoCandidates, "every retained candidate produced an unusable strategy for '" +
                                       tmpl.original + "'");
  }
  return outcome;
}

}  // namespace pathguide
