#include "pathguide/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pathguide/error.hpp"
#include "pathguide/prompts.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  const auto ref = text::normalized_words(reference);
  if (ref.empty()) fail(ErrorCode::kEmptyReference, "reference has no tokens");
  const auto cand = text::normalized_words(candidate);
  const std::size_t lcs = lcs_length(cand, ref);
  if (lcs == 0) return 0.0;
  // 2PR/(P+R) with P = lcs/|cand|, R = lcs/|ref|, in one division.
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(cand.size() + ref.size());
}

std::string normalize_answer(std::string_view s) {
  std::string t = text::collapse_whitespace(text::trim(text::to_lower(s)));
  auto is_terminal = [](char c) {
    return c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':';
  };
  while (!t.empty() && (is_terminal(t.back()) || t.back() == ' ')) t.pop_back();
  std::istringstream in(t);
  std::string word;
  std::string out;
  while (in >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

int exact_match(std::string_view prediction, const std::vector<std::string>& gold_answers) {
  if (gold_answers.empty()) fail(ErrorCode::kEmptyInput, "no gold answers");
  const std::string p = normalize_answer(prediction);
  for (const auto& g : gold_answers) {
    if (normalize_answer(g) == p) return 1;
  }
  return 0;
}

HitsError hits_and_error(std::span<const SupportSets> records, ErrorFormula formula) {
  if (records.empty()) fail(ErrorCode::kEmptyInput, "no records with gold sentences");
  HitsError he;
  he.questions = records.size();
  std::size_t hit_count = 0;
  for (const auto& r : records) {
    const bool superset = std::includes(r.cited.begin(), r.cited.end(), r.gold.begin(), r.gold.end());
    const bool not_subset =
        !std::includes(r.gold.begin(), r.gold.end(), r.cited.begin(), r.cited.end());
    hit_count += superset ? 1 : 0;
    if (formula == ErrorFormula::kLiteral) {
      he.error_numerator += not_subset ? 1.0 : 0.0;
      he.error_denominator += (superset ? 1.0 : 0.0) + (not_subset ? 1.0 : 0.0);
    } else {
      std::size_t extra = 0;
      for (const auto& c : r.cited) extra += r.gold.contains(c) ? 0 : 1;
      he.error_numerator += static_cast<double>(extra);
      he.error_denominator += static_cast<double>(r.cited.size());
    }
  }
  he.hits = static_cast<double>(hit_count) / static_cast<double>(records.size());
  if (he.error_denominator > 0.0) he.error = he.error_numerator / he.error_denominator;
  return he;
}

double error_value(const HitsError& he) {
  if (!he.error) fail(ErrorCode::kZeroDenominator, "Error is undefined: denominator is zero");
  return *he.error;
}

namespace {

std::set<std::string> token_set(std::string_view s) {
  const auto words = text::normalized_words(s);
  return {words.begin(), words.end()};
}

}  // namespace

std::set<SentenceRef> attribute_citations(std::string_view model_text, const DocumentSet& docs,
                                          double threshold) {
  std::vector<std::set<std::string>> model;
  std::istringstream in{std::string(model_text)};
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& s : text::split_sentences(line)) model.push_back(token_set(s));
  }
  std::set<SentenceRef> cited;
  for (const auto& ref : docs.flat()) {
    const auto doc = token_set(docs.sentence(ref));
    if (doc.empty()) continue;
    for (const auto& m : model) {
      std::size_t common = 0;
      for (const auto& t : doc) common += m.contains(t) ? 1 : 0;
      if (static_cast<double>(common) / static_cast<double>(doc.size()) >= threshold) {
        cited.insert(ref);
        break;
      }
    }
  }
  return cited;
}

// --- retrace ---------------------------------------------------------------

const RetraceConfig& RetraceConfig::bundled() {
  static const RetraceConfig kConfig = parse(bundled_data("repair_cues.json"));
  return kConfig;
}

RetraceConfig RetraceConfig::parse(std::string_view json_text) {
  RetraceConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    c.version = j.at("version").get<int>();
    for (const auto& cue : j.at("cues")) {
      std::string s = text::collapse_whitespace(text::trim(text::to_lower(cue.get<std::string>())));
      if (!s.empty()) c.cues.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("repair cues: ") + e.what());
  }
  if (c.cues.empty()) fail(ErrorCode::kValidationError, "repair cue list is empty");
  return c;
}

RetraceConfig RetraceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

bool is_word_byte(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
}

bool boundary_before(std::string_view s, std::size_t pos) {
  return pos == 0 || !is_word_byte(s[pos - 1]);
}

bool boundary_after(std::string_view s, std::size_t end) {
  return end >= s.size() || !is_word_byte(s[end]);
}

// Offset where a free-text answer stops.
std::size_t span_end(std::string_view s, std::size_t from) {
  auto digit = [&](std::size_t i) {
    return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
  };
  for (std::size_t i = from; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\n' || c == '!' || c == '?' || c == ';' || c == '<') return i;
    if ((c == '.' || c == ',') && !(i > from && digit(i - 1) && digit(i + 1))) return i;
    if (s.substr(i, 3) == "\xE2\x80\xA6" || s.substr(i, 3) == "\xE2\x80\x94") return i;
  }
  return s.size();
}

std::size_t skip_blank(std::string_view s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ':' || s[i] == '*')) ++i;
  return i;
}

}  // namespace

std::vector<AnswerSpan> answer_spans(std::string_view chain) {
  const std::string lower = text::to_lower(chain);
  std::vector<AnswerSpan> spans;
  auto add = [&](std::size_t begin, std::size_t from, std::size_t end) {
    std::string t = text::comparable(chain.substr(from, end - from));
    if (!t.empty()) spans.push_back(AnswerSpan{begin, end, std::move(t)});
  };
  for (std::size_t pos = lower.find("<answer>"); pos != std::string::npos;
       pos = lower.find("<answer>", pos + 1)) {
    const std::size_t from = pos + 8;
    std::size_t end = lower.find("</answer>", from);
    if (end == std::string::npos) end = span_end(lower, from);
    add(pos, from, end);
  }
  for (std::string_view marker : {std::string_view("answer is"), std::string_view("answer:")}) {
    for (std::size_t pos = lower.find(marker); pos != std::string::npos;
         pos = lower.find(marker, pos + 1)) {
      if (!boundary_before(lower, pos)) continue;
      const std::size_t from = skip_blank(lower, pos + marker.size());
      add(pos, from, span_end(lower, from));
    }
  }
  std::sort(spans.begin(), spans.end(),
            [](const AnswerSpan& a, const AnswerSpan& b) { return a.begin < b.begin; });
  return spans;
}

bool detect_retrace(std::string_view chain, const RetraceConfig& config) {
  const std::string lower = text::to_lower(chain);
  std::size_t markers = 0;
  for (std::size_t pos = lower.find("<answer>"); pos != std::string::npos;
       pos = lower.find("<answer>", pos + 1)) {
    if (++markers > 1) return true;
  }
  const auto spans = answer_spans(chain);
  if (spans.size() < 2) return false;
  for (const auto& cue : config.cues) {
    for (std::size_t pos = lower.find(cue); pos != std::string::npos;
         pos = lower.find(cue, pos + 1)) {
      if (!boundary_before(lower, pos) || !boundary_after(lower, pos + cue.size())) continue;
      const AnswerSpan* before = nullptr;
      const AnswerSpan* after = nullptr;
      for (const auto& s : spans) {
        if (s.end <= pos) before = &s;
        if (s.begin >= pos + cue.size() && after == nullptr) after = &s;
      }
      if (before != nullptr && after != nullptr && before->text != after->text) return true;
    }
  }
  return false;
}

double retrace_rate(const std::vector<bool>& flags) {
  if (flags.empty()) fail(ErrorCode::kEmptyInput, "retrace rate over no responses");
  const auto count = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(count) / static_cast<double>(flags.size());
}

TokenStats token_stats(std::span<const UsageSample> samples) {
  if (samples.empty()) fail(ErrorCode::kEmptyInput, "token statistics over no records");
  TokenStats st;
  st.n = samples.size();
  double tokens = 0.0;
  double time = 0.0;
  for (const auto& s : samples) {
    tokens += static_cast<double>(s.usage.total_tokens);
    time += s.latency_ms;
  }
  st.token_mean = tokens / static_cast<double>(st.n);
  st.time_mean_ms = time / static_cast<double>(st.n);
  return st;
}

double reduction_vs(double mean, double baseline) {
  if (!(baseline > 0.0)) fail(ErrorCode::kInvalidArgument, "baseline token mean must be positive");
  return (baseline - mean) / baseline;
}

// --- report ----------------------------------------------------------------

EvalReport evaluate(const std::vector<EvalRecord>& records, const EvalOptions& options) {
  if (records.empty()) fail(ErrorCode::kEmptyInput, "nothing to evaluate");
  const RetraceConfig& cues = options.retrace ? *options.retrace : RetraceConfig::bundled();
  EvalReport report;
  report.n = records.size();
  report.error_formula = options.error_formula;

  std::vector<SupportSets> support;
  std::vector<UsageSample> usage;
  std::vector<bool> retraced;
  double rouge_sum = 0.0;
  double em_sum = 0.0;
  for (const auto& r : records) {
    if (r.gold_answers.empty()) {
      fail(ErrorCode::kValidationError, "record " + r.question_id + " has no gold answers");
    }
    RecordMetrics m;
    m.question_id = r.question_id;
    for (const auto& g : r.gold_answers) m.rouge_l = std::max(m.rouge_l, rouge_l(r.prediction, g));
    m.em = exact_match(r.prediction, r.gold_answers);
    if (r.gold_sentences) {
      const SupportSets s{r.cited_sentences, *r.gold_sentences};
      m.hit = std::includes(s.cited.begin(), s.cited.end(), s.gold.begin(), s.gold.end());
      m.spurious = !std::includes(s.gold.begin(), s.gold.end(), s.cited.begin(), s.cited.end());
      support.push_back(s);
    }
    m.retrace = detect_retrace(r.chain_text, cues);
    m.total_tokens = r.usage.total_tokens;
    m.latency_ms = r.latency_ms;
    rouge_sum += m.rouge_l;
    em_sum += m.em;
    retraced.push_back(m.retrace);
    usage.push_back(UsageSample{r.usage, r.latency_ms});
    report.records.push_back(std::move(m));
  }
  const double n = static_cast<double>(records.size());
  report.rouge_l_mean = rouge_sum / n;
  report.em_mean = em_sum / n;
  if (!support.empty()) report.support = hits_and_error(support, options.error_formula);
  report.retrace_rate = retrace_rate(retraced);
  const TokenStats st = token_stats(usage);
  report.token_mean = st.token_mean;
  report.time_mean_ms = st.time_mean_ms;
  if (options.baseline_token_mean) {
    report.baseline_token_mean = options.baseline_token_mean;
    report.reduction = reduction_vs(report.token_mean, *options.baseline_token_mean);
  }
  return report;
}

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["rouge_l_mean"] = report.rouge_l_mean;
  j["em_mean"] = report.em_mean;
  if (report.support) {
    j["hits"] = report.support->hits;
    if (report.support->error) {
      j["error"] = *report.support->error;
    } else {
      j["error"] = "undefined";
    }
    j["support_questions"] = report.support->questions;
  } else {
    j["hits"] = "undefined";
    j["error"] = "undefined";
    j["support_questions"] = 0;
  }
  j["error_formula"] = report.error_formula == ErrorFormula::kLiteral ? "literal" : "fdr";
  j["retrace_rate"] = report.retrace_rate;
  j["token_mean"] = report.token_mean;
  j["time_mean_ms"] = report.time_mean_ms;
  if (report.reduction) {
    j["baseline_token_mean"] = *report.baseline_token_mean;
    j["reduction"] = *report.reduction;
  }
  return j;
}

std::string records_to_tsv(const EvalReport& report) {
  std::string out = "question_id\trouge_l\tem\thit\tspurious\tretrace\ttotal_tokens\tlatency_ms\n";
  auto flag = [](const std::optional<bool>& b) { return b ? std::string(*b ? "1" : "0") : ""; };
  for (const auto& r : report.records) {
    out += r.question_id + "\t" + fixed(r.rouge_l, 6) + "\t" + std::to_string(r.em) + "\t" +
           flag(r.hit) + "\t" + flag(r.spurious) + "\t" + (r.retrace ? "1" : "0") + "\t" +
           std::to_string(r.total_tokens) + "\t" + fixed(r.latency_ms, 3) + "\n";
  }
  return out;
}

std::string report_summary(const EvalReport& report) {
  auto pct = [](double v) { return fixed(100.0 * v, 2) + "%"; };
  std::string out;
  out += "records        " + std::to_string(report.n) + "\n";
  out += "ROUGE-L        " + fixed(report.rouge_l_mean, 4) + "\n";
  out += "EM             " + fixed(report.em_mean, 4) + "\n";
  if (report.support) {
    out += "Hits           " + fixed(report.support->hits, 4) + "\n";
    out += "Error          " +
           (report.support->error ? fixed(*report.support->error, 4) : std::string("undefined")) +
           "\n";
  } else {
    out += "Hits           undefined (no gold sentences)\nError          undefined\n";
  }
  out += "Retrace rate   " + fixed(report.retrace_rate, 4) + "\n";
  out += "Tokens (mean)  " + fixed(report.token_mean, 2) + "\n";
  out += "Time ms (mean) " + fixed(report.time_mean_ms, 2) + "\n";
  if (report.reduction) {
    out += "Token reduction vs baseline (" + fixed(*report.baseline_token_mean, 2) +
           "): " + pct(*report.reduction) + "\n";
  }
  return out;
}

}  // namespace pathguide
