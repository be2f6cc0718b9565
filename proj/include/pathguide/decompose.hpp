#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

enum class TokenLabel { kStructural, kEntity };

// One question token. Multiword entities ("Eiffel Tower") are a single
// Entity token; a leading article absorbed into the entity is kept in
// `determiner` so the original question can be rebuilt.
struct Token {
  std::string text;
  std::size_t index = 0;
  TokenLabel label = TokenLabel::kStructural;
  std::string entity_type;  // non-empty iff label == kEntity
  std::string determiner;   // e.g. "the"; only on Entity tokens
  bool space_before = false;

  // Text as it appeared in the question, determiner included.
  std::string surface() const;
};

// Per-surface-token tagger verdict. `continues_entity` marks a token that
// extends the entity started by the previous token (same type required).
struct TokenTag {
  TokenLabel label = TokenLabel::kStructural;
  std::string entity_type;
  bool continues_entity = false;
};

class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  // Must return exactly one tag per input token.
  virtual std::vector<TokenTag> tag(std::span<const text::SurfaceToken> tokens) const = 0;
  // Taggers that are not safe for concurrent use are called under a lock.
  virtual bool thread_safe() const noexcept { return true; }
};

// Lexicon-driven default tagger.
//
// Types: person, place, organization, date, number, adj, object, property.
//  - digits -> number (4-digit years 1000..2100 and month-name spans -> date)
//  - lowercase lexicon phrases (longest match) -> their listed type
//  - comparative adjectives (lexicon or "-er" after a copula) -> adj
//  - capitalized spans -> typed by lexicon, head noun or first name,
//    falling back to object. A lone capitalized word opening a sentence is
//    structural unless the lexicon knows it.
class RuleBasedTagger final : public EntityTagger {
 public:
  RuleBasedTagger();
  std::vector<TokenTag> tag(std::span<const text::SurfaceToken> tokens) const override;

  // Adds or overrides a lowercase lexicon phrase.
  void add_phrase(const std::string& phrase, const std::string& type);

 private:
  std::map<std::string, std::string> lexicon_;
  std::size_t longest_phrase_ = 1;
};

const EntityTagger& default_tagger();

struct Placeholder {
  std::string text;        // entity text without determiner
  std::string type;
  int ordinal = 1;         // 1..k among same-type placeholders
  std::string determiner;  // absorbed article, may be empty
  std::size_t token_index = 0;
  bool numbered = false;   // type occurs more than once

  // Slot label used as the substitution key: "place 1", or "adj".
  std::string label() const;
  std::string surface() const;
};

struct QuestionTemplate {
  std::string original;
  std::vector<Token> tokens;
  std::vector<Placeholder> placeholders;
  std::string template_text;

  // label -> surface text of the original entity (determiner included).
  std::map<std::string, std::string> original_substitutions() const;
};

// Throws kEmptyQuestion (blank or punctuation-only) or kTaggerFailure.
std::vector<Token> classify_tokens(const std::string& question,
                                   const EntityTagger& tagger = default_tagger());

// Throws kInvalidArgument when indices are not contiguous from 0.
QuestionTemplate build_template(std::vector<Token> tokens);

QuestionTemplate decompose_question(const std::string& question,
                                    const EntityTagger& tagger = default_tagger());

// Replaces every slot. Throws kMissingSubstitution / kUnknownPlaceholder.
std::string render_template(const QuestionTemplate& tmpl,
                            const std::map<std::string, std::string>& substitutions);

// Renders with entity tokens replaced by `slot_text(token)`.
std::string render_tokens(const std::vector<Token>& tokens,
                          const std::function<std::string(const Token&)>& slot_text);

nlohmann::json template_to_json(const QuestionTemplate& tmpl);

}  // namespace pathguide
