// Command-line front end: generate collections, answer a corpus, evaluate a
// run log. See README.md for a walkthrough.
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pathguide/cli.hpp"

namespace {

struct Flag {
  const char* name;  // without dashes
  const char* key;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"config", "config", "JSON settings file (flags override it, it overrides env)"},
    {"corpus", "corpus", "line-delimited QA records"},
    {"collection", "collection", "collection directory (generate) or file/directory (answer)"},
    {"run-log", "run_log", "answer trace log to write or evaluate"},
    {"report", "report", "evaluation report (JSON); a .tsv table is written next to it"},
    {"baseline-log", "baseline_log", "run log of a baseline for token reduction"},
    {"delta", "delta", "similarity threshold 1..10 (default 7)"},
    {"count", "count", "examples per question (default 5)"},
    {"gen-mode", "gen_mode", "random-fill | guided-fill | template-variation"},
    {"max-candidates", "max_candidates", "raw candidate cap per question (default 10)"},
    {"select-mode", "select_mode", "full | coverage | uniqueness | random"},
    {"seed", "seed", "seed for random selection and random-fill"},
    {"required-skills", "required_skills", "comma list; coverage over these instead of all 7"},
    {"error-formula", "error_formula", "literal | fdr"},
    {"parallelism", "parallelism", "max concurrent provider calls (default 1)"},
    {"provider", "provider", "live | mock | replay (default mock)"},
    {"transcript", "transcript", "replay source, or where to record for mock/live"},
    {"mock-script", "mock_script", "JSON rules for the mock provider"},
    {"token-budget", "token_budget", "abort once total tokens exceed this"},
    {"base-url", "base_url", "live endpoint (env PATHGUIDE_BASE_URL)"},
    {"model", "model", "live model id (env PATHGUIDE_MODEL)"},
    {"max-retries", "max_retries", "live retry count (default 3)"},
    {"timeout", "timeout", "live request timeout in seconds (default 120)"},
    {"prompt-dir", "prompt_dir", "directory overriding bundled prompt templates"},
    {"entity-pool", "entity_pool", "entity pool JSON for random-fill"},
    {"created-at", "created_at", "timestamp stamped into outputs (default: now, UTC)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning-path guided question answering pipeline"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> values;

  for (const char* name : {"generate", "answer", "eval"}) {
    const char* about = std::string(name) == "generate" ? "build example collections for a corpus"
                        : std::string(name) == "answer" ? "answer a corpus with guided reasoning"
                                                        : "score a run log against gold answers";
    CLI::App* sub = app.add_subcommand(name, about);
    for (const Flag& f : kFlags) {
      sub->add_option(std::string("--") + f.name, values[name][f.key], f.help);
    }
  }
  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  pathguide::cli::Settings flags;
  for (const Flag& f : kFlags) {
    if (chosen->count(std::string("--") + f.name) > 0) flags[f.key] = values[command][f.key];
  }
  return pathguide::cli::run_command(
      command, flags, [](const char* var) { return std::getenv(var); }, std::cout, std::cerr);
}
