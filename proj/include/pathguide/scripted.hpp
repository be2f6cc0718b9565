#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pathguide/provider.hpp"

namespace pathguide {

// First matching rule wins. Empty `tag` or `contains` match anything.
struct ScriptRule {
  std::string tag;
  std::string contains;
  std::string reply;
};

// Offline responder for MockProvider: scripted rules first, then a
// deterministic synthetic reply shaped like a real answer to the stage's
// prompt. Used by the CLI mock backend and by fixtures.
class ScriptedResponder {
 public:
  explicit ScriptedResponder(std::vector<ScriptRule> rules = {});

  // {"rules": [{"tag": "...", "contains": "...", "reply": "..."}]}
  // Throws kParseError / kStorageError.
  static ScriptedResponder parse(std::string_view json_text);
  static ScriptedResponder load(const std::filesystem::path& path);

  std::string operator()(const CompletionRequest& request) const;
  const std::vector<ScriptRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<ScriptRule> rules_;
};

// Synthetic replies keyed on request.tag ("substitutes", "paraphrase",
// "similarity", "strategy", "reference_doc", "segment", "answer"). They read
// the default prompt layouts; anything unrecognized gets a short generic
// reply.
std::string synthetic_reply(const CompletionRequest& request);

}  // namespace pathguide
