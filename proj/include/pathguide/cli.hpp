#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pathguide/eval.hpp"
#include "pathguide/examplegen.hpp"
#include "pathguide/matcher.hpp"
#include "pathguide/provider.hpp"

namespace pathguide::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRecordFailures = 1;  // some questions failed
inline constexpr int kExitFatal = 2;           // bad config or unreadable input

// Raw settings by key ("delta", "select_mode", "base_url", ...).
using Settings = std::map<std::string, std::string>;

// Keys accepted from flags and config files.
const std::vector<std::string>& known_keys();

// PATHGUIDE_BASE_URL / PATHGUIDE_MODEL / PATHGUIDE_API_KEY /
// PATHGUIDE_PARALLELISM.
Settings settings_from_env(const std::function<const char*(const char*)>& getenv_fn);

// Flat JSON object with the same keys. Throws kConfigError.
Settings settings_from_file(const std::filesystem::path& path);

// Later layers win: env < config file < flags. The config file path is
// taken from flags["config"] when present.
Settings merge_settings(const Settings& env, const Settings& flags);

struct ProviderSettings {
  std::string kind = "mock";  // live | mock | replay
  std::optional<std::filesystem::path> transcript;  // replay source, else record target
  std::optional<std::filesystem::path> mock_script;
  std::int64_t token_budget = 0;  // 0 = unlimited
  LiveConfig live;
};

struct RunConfig {
  ProviderSettings provider;
  GenerationConfig generation;
  SelectionMode select_mode = SelectionMode::kFull;
  std::optional<std::uint64_t> seed;
  std::vector<Skill> required_skills;
  ErrorFormula error_formula = ErrorFormula::kLiteral;
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> collection;
  std::optional<std::filesystem::path> run_log;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> baseline_log;
  std::optional<std::filesystem::path> prompt_dir;
  std::optional<std::filesystem::path> entity_pool;
  std::size_t parallelism = 1;
  std::string created_at;  // stamped into collections and transcripts
  Settings resolved;       // merged settings, for the snapshot
};

// Parses and validates merged settings. Random selection without a seed,
// malformed numbers and unknown enum names raise kConfigError.
RunConfig parse_run_config(const Settings& settings);

// Owns the provider chain: base backend, optional recorder, optional budget.
class ProviderStack {
 public:
  explicit ProviderStack(const ProviderSettings& settings, const std::string& created_at);
  ~ProviderStack();

  Provider& top();
  // Saves the recorded transcript when recording. Safe to call twice.
  void finish();

 private:
  std::unique_ptr<Provider> base_;
  std::unique_ptr<RecordingProvider> recorder_;
  std::unique_ptr<BudgetedProvider> budget_;
  std::optional<std::filesystem::path> record_to_;
};

// Writes the resolved settings (api_key redacted) to "<output>.config.json".
void write_config_snapshot(const RunConfig& config, const std::filesystem::path& output);

// Each command prints progress to `out` and failures to `err`, and returns
// an exit code.
int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_answer(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);

// Resolves settings and dispatches "generate" | "answer" | "eval".
int run_command(const std::string& command, const Settings& flags,
                const std::function<const char*(const char*)>& getenv_fn, std::ostream& out,
                std::ostream& err);

// File name used for a question's collection inside a collection directory.
std::string collection_file_name(const std::string& question_id);

}  // namespace pathguide::cli
