#include "pathguide/cli.hpp"

#include <charconv>
#include <ctime>
#include <fstream>
#include <sstream>

#include "pathguide/collection.hpp"
#include "pathguide/corpus.hpp"
#include "pathguide/decompose.hpp"
#include "pathguide/error.hpp"
#include "pathguide/scripted.hpp"
#include "pathguide/text.hpp"

namespace pathguide::cli {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> kKeys = {
      "config",       "corpus",         "collection",    "run_log",     "report",
      "baseline_log", "delta",          "count",         "gen_mode",    "max_candidates",
      "select_mode",  "seed",           "required_skills", "error_formula", "parallelism",
      "provider",     "transcript",     "mock_script",   "token_budget", "base_url",
      "model",        "api_key",        "max_retries",   "timeout",     "prompt_dir",
      "entity_pool",  "created_at"};
  return kKeys;
}

Settings settings_from_env(const std::function<const char*(const char*)>& getenv_fn) {
  Settings s;
  for (const auto& [var, key] : {std::pair{"PATHGUIDE_BASE_URL", "base_url"},
                                 std::pair{"PATHGUIDE_MODEL", "model"},
                                 std::pair{"PATHGUIDE_API_KEY", "api_key"},
                                 std::pair{"PATHGUIDE_PARALLELISM", "parallelism"}}) {
    if (const char* v = getenv_fn(var); v != nullptr && *v != '\0') s[key] = v;
  }
  return s;
}

Settings settings_from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfigError, "cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kConfigError, path.string() + ": expected a JSON object");
  const auto& keys = known_keys();
  Settings s;
  for (const auto& [key, value] : j.items()) {
    std::string k = key;
    std::replace(k.begin(), k.end(), '-', '_');
    if (std::find(keys.begin(), keys.end(), k) == keys.end() || k == "config") {
      fail(ErrorCode::kConfigError, path.string() + ": unknown setting '" + key + "'");
    }
    if (value.is_string()) {
      s[k] = value.get<std::string>();
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& e : value) {
        if (!joined.empty()) joined += ",";
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      s[k] = joined;
    } else {
      s[k] = value.dump();
    }
  }
  return s;
}

Settings merge_settings(const Settings& env, const Settings& flags) {
  Settings merged = env;
  if (auto it = flags.find("config"); it != flags.end()) {
    for (const auto& [k, v] : settings_from_file(it->second)) merged[k] = v;
  }
  for (const auto& [k, v] : flags) {
    if (k != "config") merged[k] = v;
  }
  return merged;
}

namespace {

template <typename T>
T parse_number(const Settings& s, const std::string& key, T fallback) {
  auto it = s.find(key);
  if (it == s.end()) return fallback;
  T v{};
  const std::string& text = it->second;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::kConfigError, "setting '" + key + "' is not a valid number: '" + text + "'");
  }
  return v;
}

std::optional<std::filesystem::path> optional_path(const Settings& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end() || it->second.empty()) return std::nullopt;
  return std::filesystem::path(it->second);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const Settings& settings) {
  RunConfig c;
  c.resolved = settings;
  try {
    c.provider.kind = settings.contains("provider") ? settings.at("provider") : "mock";
    if (c.provider.kind != "live" && c.provider.kind != "mock" && c.provider.kind != "replay") {
      fail(ErrorCode::kConfigError, "provider must be live, mock or replay, got '" +
                                        c.provider.kind + "'");
    }
    c.provider.transcript = optional_path(settings, "transcript");
    c.provider.mock_script = optional_path(settings, "mock_script");
    c.provider.token_budget = parse_number<std::int64_t>(settings, "token_budget", 0);
    if (c.provider.kind == "replay" && !c.provider.transcript) {
      fail(ErrorCode::kConfigError, "the replay provider needs --transcript");
    }
    auto& live = c.provider.live;
    live.base_url = settings.contains("base_url") ? settings.at("base_url") : "";
    live.model = settings.contains("model") ? settings.at("model") : "";
    live.api_key = settings.contains("api_key") ? settings.at("api_key") : "";
    live.max_retries = parse_number<int>(settings, "max_retries", live.max_retries);
    live.timeout_seconds = parse_number<int>(settings, "timeout", live.timeout_seconds);
    if (c.provider.kind == "live" && (live.base_url.empty() || live.model.empty())) {
      fail(ErrorCode::kConfigError,
           "the live provider needs an endpoint and a model (PATHGUIDE_BASE_URL, PATHGUIDE_MODEL)");
    }

    c.generation.delta = parse_number<int>(settings, "delta", c.generation.delta);
    c.generation.target_count = parse_number<std::size_t>(settings, "count", c.generation.target_count);
    c.generation.max_candidates =
        parse_number<std::size_t>(settings, "max_candidates", c.generation.max_candidates);
    if (auto it = settings.find("gen_mode"); it != settings.end()) {
      c.generation.mode = parse_construction_mode(it->second);
    }
    if (auto it = settings.find("select_mode"); it != settings.end()) {
      c.select_mode = parse_selection_mode(it->second);
    }
    if (settings.contains("seed")) {
      c.seed = parse_number<std::uint64_t>(settings, "seed", 0);
      c.generation.seed = *c.seed;
    }
    if (c.select_mode == SelectionMode::kRandom && !c.seed) {
      fail(ErrorCode::kConfigError, "--select-mode random requires --seed");
    }
    if (auto it = settings.find("required_skills"); it != settings.end()) {
      std::stringstream ss(it->second);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!text::trim(item).empty()) c.required_skills.push_back(parse_skill(item));
      }
    }
    if (auto it = settings.find("error_formula"); it != settings.end()) {
      if (it->second == "literal") {
        c.error_formula = ErrorFormula::kLiteral;
      } else if (it->second == "fdr") {
        c.error_formula = ErrorFormula::kFdr;
      } else {
        fail(ErrorCode::kConfigError, "error_formula must be literal or fdr");
      }
    }
    c.parallelism = parse_number<std::size_t>(settings, "parallelism", 1);
    if (c.parallelism == 0) fail(ErrorCode::kConfigError, "parallelism must be >= 1");
    c.generation.parallelism = c.parallelism;
    c.corpus = optional_path(settings, "corpus");
    c.collection = optional_path(settings, "collection");
    c.run_log = optional_path(settings, "run_log");
    c.report = optional_path(settings, "report");
    c.baseline_log = optional_path(settings, "baseline_log");
    c.prompt_dir = optional_path(settings, "prompt_dir");
    c.entity_pool = optional_path(settings, "entity_pool");
    c.created_at = settings.contains("created_at") ? settings.at("created_at") : utc_now();
    c.generation.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    fail(ErrorCode::kConfigError, e.detail());
  }
  return c;
}

ProviderStack::ProviderStack(const ProviderSettings& settings, const std::string& created_at) {
  if (settings.kind == "replay") {
    base_ = std::make_unique<ReplayProvider>(Transcript::load(*settings.transcript));
  } else {
    if (settings.kind == "live") {
      base_ = std::make_unique<LiveProvider>(settings.live);
    } else {
      ScriptedResponder responder = settings.mock_script
                                        ? ScriptedResponder::load(*settings.mock_script)
                                        : ScriptedResponder();
      base_ = std::make_unique<MockProvider>(MockProvider::Responder(std::move(responder)));
    }
    if (settings.transcript) {
      recorder_ = std::make_unique<RecordingProvider>(*base_, created_at);
      record_to_ = settings.transcript;
    }
  }
  Provider& inner = recorder_ ? static_cast<Provider&>(*recorder_) : *base_;
  if (settings.token_budget > 0) {
    budget_ = std::make_unique<BudgetedProvider>(inner, settings.token_budget);
  }
}

ProviderStack::~ProviderStack() = default;

Provider& ProviderStack::top() {
  if (budget_) return *budget_;
  if (recorder_) return *recorder_;
  return *base_;
}

void ProviderStack::finish() {
  if (recorder_ && record_to_) recorder_->save(*record_to_);
}

void write_config_snapshot(const RunConfig& config, const std::filesystem::path& output) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : config.resolved) {
    if (k == "created_at") continue;
    j[k] = (k == "api_key") ? std::string("<redacted>") : v;
  }
  std::filesystem::path path = output;
  path += ".config.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kStorageError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string collection_file_name(const std::string& question_id) {
  std::string name;
  for (char c : question_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    name.push_back(ok ? c : '_');
  }
  return name + ".json";
}

namespace {

void report_failure(std::ostream& err, const std::string& question_id, const Error& e) {
  err << "error [" << question_id << "] " << e.what() << "\n";
}

const std::filesystem::path& require(const std::optional<std::filesystem::path>& p,
                                     const char* flag) {
  if (!p) fail(ErrorCode::kConfigError, std::string("missing required --") + flag);
  return *p;
}

PromptLibrary load_prompts(const RunConfig& config) {
  return config.prompt_dir ? PromptLibrary::from_directory(*config.prompt_dir)
                           : PromptLibrary::defaults();
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kStorageError, "cannot write " + path.string());
  out << body;
  if (!out) fail(ErrorCode::kStorageError, "write failed for " + path.string());
}

}  // namespace

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto& corpus_path = require(config.corpus, "corpus");
  const auto& dir = require(config.collection, "collection");
  const auto records = load_records(corpus_path);
  const PromptLibrary prompts = load_prompts(config);
  const EntityPool pool =
      config.entity_pool ? EntityPool::load(*config.entity_pool) : EntityPool::bundled();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kStorageError, "cannot create " + dir.string() + ": " + ec.message());
  write_config_snapshot(config, dir);

  ProviderStack stack(config.provider, config.created_at);
  std::size_t failures = 0;
  for (const auto& record : records) {
    const auto path = dir / collection_file_name(record.question_id);
    if (std::filesystem::exists(path)) {
      try {
        const auto existing = restore_collection(path);
        out << "skip " << record.question_id << " (n=" << existing.n() << ", already generated)\n";
        continue;
      } catch (const Error&) {
        // Unreadable checkpoint: regenerate it.
      }
    }
    try {
      QuestionTemplate tmpl;
      try {
        tmpl = decompose_question(record.question);
      } catch (const Error& e) {
        throw e.with_stage("decompose");
      }
      GenerationOutcome outcome;
      try {
        outcome = generate_examples(tmpl, config.generation, stack.top(), prompts, pool);
      } catch (const Error& e) {
        throw e.with_stage("generate");
      }
      CollectionMeta meta{config.created_at, config.generation.mode, config.generation.delta};
      const auto collection = build_collection(std::move(outcome.examples), meta);
      persist_collection(collection, path);
      out << "generated " << record.question_id << ": n=" << collection.n()
          << " (candidates " << outcome.candidates << ", retained " << outcome.retained
          << ", skipped " << outcome.skipped << ")\n";
    } catch (const Error& e) {
      ++failures;
      report_failure(err, record.question_id, e);
    }
  }
  stack.finish();
  out << "questions " << records.size() << ", failed " << failures << "\n";
  return failures == 0 ? kExitOk : kExitRecordFailures;
}

int cmd_answer(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto& corpus_path = require(config.corpus, "corpus");
  const auto& collection_path = require(config.collection, "collection");
  const auto& log_path = require(config.run_log, "run-log");
  if (!std::filesystem::exists(collection_path)) {
    fail(ErrorCode::kStorageError, "collection not found: " + collection_path.string());
  }
  const auto records = load_records(corpus_path);
  const PromptLibrary prompts = load_prompts(config);
  const bool per_question = std::filesystem::is_directory(collection_path);
  std::optional<ExampleCollection> shared;
  if (!per_question) shared = restore_collection(collection_path);

  ProviderStack stack(config.provider, config.created_at);
  AnswerOptions options;
  options.selection.seed = config.seed;
  options.selection.required_skills = config.required_skills;
  options.parallelism = config.parallelism;
  options.prompts = &prompts;

  std::string log;
  std::size_t failures = 0;
  TokenUsage total;
  for (const auto& record : records) {
    try {
      std::optional<ExampleCollection> own;
      if (per_question) {
        try {
          own = restore_collection(collection_path / collection_file_name(record.question_id));
        } catch (const Error& e) {
          throw e.with_stage("collection");
        }
      }
      const ExampleCollection& collection = own ? *own : *shared;
      AnswerTrace trace = answer(record.question, DocumentSet(record.documents), collection,
                                 config.select_mode, stack.top(), options);
      trace.question_id = record.question_id;
      total += trace.usage;
      log += trace_to_json(trace).dump() + "\n";
      out << "answered " << record.question_id << " with example " << trace.selected_example_id
          << ": " << trace.answer << "\n";
    } catch (const Error& e) {
      ++failures;
      report_failure(err, record.question_id, e);
    }
  }
  stack.finish();
  write_text(log_path, log);
  write_config_snapshot(config, log_path);
  out << "records " << records.size() << ", failed " << failures << ", tokens " << total.total_tokens
      << "\n";
  return failures == 0 ? kExitOk : kExitRecordFailures;
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto& corpus_path = require(config.corpus, "corpus");
  const auto& log_path = require(config.run_log, "run-log");
  const auto& report_path = require(config.report, "report");
  const auto records = load_records(corpus_path);
  const auto entries = load_run_log(log_path);

  std::map<std::string, const QARecord*> by_id;
  for (const auto& r : records) by_id[r.question_id] = &r;
  std::vector<EvalRecord> eval_records;
  std::set<std::string> answered;
  for (const auto& e : entries) {
    auto it = by_id.find(e.question_id);
    if (it == by_id.end()) {
      fail(ErrorCode::kUnmatchedQuestionId,
           "run log entry '" + e.question_id + "' has no record in " + corpus_path.string());
    }
    const QARecord& r = *it->second;
    const DocumentSet docs(r.documents);
    EvalRecord er;
    er.question_id = e.question_id;
    er.prediction = e.answer;
    er.gold_answers = r.gold_answers;
    er.cited_sentences = attribute_citations(e.chain, docs);
    if (r.gold_sentence_ids) {
      er.gold_sentences = std::set<SentenceRef>(r.gold_sentence_ids->begin(), r.gold_sentence_ids->end());
    }
    er.chain_text = e.chain;
    er.usage = e.usage;
    er.latency_ms = e.latency_ms;
    answered.insert(e.question_id);
    eval_records.push_back(std::move(er));
  }
  std::size_t missing = 0;
  for (const auto& r : records) {
    if (!answered.contains(r.question_id)) {
      ++missing;
      err << "warning [" << r.question_id << "] no run log entry; not scored\n";
    }
  }

  EvalOptions options;
  options.error_formula = config.error_formula;
  if (config.baseline_log) {
    const auto baseline = load_run_log(*config.baseline_log);
    std::vector<UsageSample> samples;
    for (const auto& b : baseline) samples.push_back(UsageSample{b.usage, b.latency_ms});
    options.baseline_token_mean = token_stats(samples).token_mean;
  }
  const EvalReport report = evaluate(eval_records, options);
  write_text(report_path, report_to_json(report).dump(2) + "\n");
  std::filesystem::path table = report_path;
  table.replace_extension(".tsv");
  if (table == report_path) table += ".tsv";
  write_text(table, records_to_tsv(report));
  write_config_snapshot(config, report_path);
  out << report_summary(report);
  if (missing > 0) out << "unscored records " << missing << "\n";
  return missing == 0 ? kExitOk : kExitRecordFailures;
}

int run_command(const std::string& command, const Settings& flags,
                const std::function<const char*(const char*)>& getenv_fn, std::ostream& out,
                std::ostream& err) {
  try {
    const RunConfig config = parse_run_config(merge_settings(settings_from_env(getenv_fn), flags));
    if (command == "generate") return cmd_generate(config, out, err);
    if (command == "answer") return cmd_answer(config, out, err);
    if (command == "eval") return cmd_eval(config, out, err);
    fail(ErrorCode::kConfigError, "unknown command '" + command + "'");
  } catch (const Error& e) {
    err << "error " << e.what() << "\n";
    return kExitFatal;
  }
}

}  // namespace pathguide::cli
