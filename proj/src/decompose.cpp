#include "pathguide/decompose.hpp"

#include <array>
#include <cctype>
#include <mutex>
#include <set>
#include <string_view>
#include <unordered_map>

#include "pathguide/error.hpp"

namespace pathguide {
namespace {

using text::SurfaceToken;

bool is_capitalized(std::string_view w) {
  return !w.empty() && std::isupper(static_cast<unsigned char>(w[0]));
}

bool is_digit_word(std::string_view w) {
  return !w.empty() && std::isdigit(static_cast<unsigned char>(w[0]));
}

bool is_article(std::string_view w) {
  const std::string l = text::to_lower(w);
  return l == "the" || l == "a" || l == "an";
}

// Capitalized words that are never entity starts on their own.
const std::set<std::string>& capital_stopwords() {
  static const std::set<std::string> kWords{
      "which", "what", "who", "whom", "whose", "when", "where", "why", "how",
      "is", "are", "was", "were", "do", "does", "did", "the", "a", "an", "in",
      "on", "at", "of", "for", "to", "by", "from", "with", "and", "or", "but",
      "if", "can", "could", "would", "should", "will", "has", "have", "had",
      "i", "i'll", "i'm", "i've", "i'd", "it", "its", "this", "that", "these",
      "those", "name", "list", "give", "tell", "compare", "explain",
      "describe", "identify", "first", "next", "then", "therefore", "thus",
      "so", "since", "because", "finally", "step", "answer", "question",
      "document", "yes", "no", "not", "after", "before", "during", "as",
      "there", "here", "we", "they", "he", "she", "his", "her", "their",
      "our", "my", "you", "your", "based", "according", "both", "each"};
  return kWords;
}

const std::set<std::string>& month_names() {
  static const std::set<std::string> kMonths{
      "january", "february", "march", "april", "may", "june", "july",
      "august", "september", "october", "november", "december"};
  return kMonths;
}

const std::set<std::string>& comparatives() {
  static const std::set<std::string> kWords{
      "taller", "shorter", "older", "younger", "larger", "smaller", "bigger",
      "longer", "higher", "lower", "faster", "slower", "heavier", "lighter",
      "wider", "narrower", "deeper", "shallower", "hotter", "colder",
      "warmer", "cooler", "richer", "poorer", "stronger", "weaker",
      "earlier", "later", "closer", "farther", "further", "greater",
      "cheaper", "newer", "tallest", "shortest", "oldest", "youngest",
      "largest", "smallest", "biggest", "longest", "highest", "lowest",
      "fastest", "heaviest", "deepest", "earliest", "greatest", "more",
      "less", "most", "least"};
  return kWords;
}

const std::set<std::string>& non_comparative_er() {
  static const std::set<std::string> kWords{
      "other", "never", "ever", "after", "under", "over", "whether", "either",
      "neither", "rather", "water", "number", "paper", "however", "river",
      "answer", "order", "center", "member", "winner", "leader", "player",
      "writer", "singer", "founder", "owner", "father", "mother", "brother",
      "sister", "together", "matter", "letter", "power", "tower", "computer",
      "summer", "winter", "manner", "former", "latter", "character"};
  return kWords;
}

const std::set<std::string>& copulas() {
  static const std::set<std::string> kWords{"is", "was", "are", "were", "be", "been"};
  return kWords;
}

const std::set<std::string>& connectors() {
  static const std::set<std::string> kWords{"of", "de", "la", "von", "van", "del", "du", "&"};
  return kWords;
}

const std::unordered_map<std::string, std::string>& head_nouns() {
  static const std::unordered_map<std::string, std::string> kHeads{
      {"tower", "place"}, {"building", "place"}, {"city", "place"},
      {"river", "place"}, {"mountain", "place"}, {"mount", "place"},
      {"lake", "place"}, {"bridge", "place"}, {"street", "place"},
      {"square", "place"}, {"park", "place"}, {"island", "place"},
      {"islands", "place"}, {"ocean", "place"}, {"sea", "place"},
      {"palace", "place"}, {"castle", "place"}, {"cathedral", "place"},
      {"church", "place"}, {"station", "place"}, {"airport", "place"},
      {"valley", "place"}, {"county", "place"}, {"desert", "place"},
      {"museum", "place"}, {"stadium", "place"}, {"canal", "place"},
      {"university", "organization"}, {"college", "organization"},
      {"inc", "organization"}, {"corp", "organization"},
      {"company", "organization"}, {"corporation", "organization"},
      {"institute", "organization"}, {"association", "organization"},
      {"party", "organization"}, {"bank", "organization"},
      {"council", "organization"}, {"committee", "organization"},
      {"agency", "organization"}, {"foundation", "organization"},
      {"group", "organization"}, {"club", "organization"},
      {"society", "organization"}, {"league", "organization"},
      {"beatles", "organization"}};
  return kHeads;
}

const std::set<std::string>& first_names() {
  static const std::set<std::string> kNames{
      "john", "paul", "george", "ringo", "mary", "james", "robert",
      "michael", "william", "david", "richard", "joseph", "thomas", "charles",
      "elizabeth", "jennifer", "linda", "barbara", "susan", "sarah", "karen",
      "alexander", "albert", "isaac", "marie", "ada", "nikola", "leonardo",
      "wolfgang", "ludwig", "johann", "vincent", "pablo", "winston",
      "abraham", "benjamin", "franklin", "theodore", "napoleon", "queen",
      "king", "emma", "oliver", "harry", "jane", "anne", "peter", "samuel",
      "martin", "rosa", "nelson", "steve", "bill", "elon", "mark", "frida",
      "galileo", "charlotte", "emily", "louis", "henry", "edward", "alan",
      "grace", "neil", "buzz", "amelia"};
  return kNames;
}

constexpr std::pair<std::string_view, std::string_view> kLexicon[] = {
    // properties
    {"melting point", "property"}, {"boiling point", "property"},
    {"freezing point", "property"}, {"height", "property"},
    {"population", "property"}, {"length", "property"}, {"area", "property"},
    {"density", "property"}, {"weight", "property"}, {"mass", "property"},
    {"speed", "property"}, {"temperature", "property"}, {"depth", "property"},
    {"width", "property"}, {"elevation", "property"}, {"atomic number", "property"},
    {"birth date", "property"}, {"birthplace", "property"},
    {"capital", "property"}, {"lifespan", "property"},
    // objects and substances
    {"telephone", "object"}, {"light bulb", "object"}, {"penicillin", "object"},
    {"radio", "object"}, {"television", "object"}, {"airplane", "object"},
    {"printing press", "object"}, {"steam engine", "object"},
    {"computer", "object"}, {"internet", "object"}, {"vaccine", "object"},
    {"microscope", "object"}, {"telescope", "object"}, {"piano", "object"},
    {"sodium", "object"}, {"potassium", "object"}, {"lithium", "object"},
    {"iron", "object"}, {"copper", "object"}, {"gold", "object"},
    {"silver", "object"}, {"mercury", "object"}, {"oxygen", "object"},
    {"hydrogen", "object"}, {"helium", "object"}, {"carbon", "object"},
    {"water", "object"}, {"aluminium", "object"}, {"aluminum", "object"},
    // places
    {"paris", "place"}, {"london", "place"}, {"liverpool", "place"},
    {"rome", "place"}, {"berlin", "place"}, {"tokyo", "place"},
    {"new york", "place"}, {"france", "place"}, {"england", "place"},
    {"germany", "place"}, {"italy", "place"}, {"japan", "place"},
    {"china", "place"}, {"india", "place"}, {"spain", "place"},
    {"canada", "place"}, {"mexico", "place"}, {"brazil", "place"},
    {"egypt", "place"}, {"australia", "place"},
    // people and organizations
    {"the beatles", "organization"}, {"nasa", "organization"},
    {"unesco", "organization"},
};

std::string lower_word(const SurfaceToken& t) { return text::to_lower(t.text); }

bool sentence_initial(std::span<const SurfaceToken> toks, std::size_t i) {
  if (i == 0) return true;
  const std::string& prev = toks[i - 1].text;
  if (prev == "." || prev == "!" || prev == "?" || prev == ":" || prev == "\"") return true;
  // "1. First" numbered list item
  if (i >= 2 && prev == "." && is_digit_word(toks[i - 2].text)) return true;
  return false;
}

}  // namespace

RuleBasedTagger::RuleBasedTagger() {
  for (const auto& [phrase, type] : kLexicon) {
    add_phrase(std::string(phrase), std::string(type));
  }
}

void RuleBasedTagger::add_phrase(const std::string& phrase, const std::string& type) {
  const std::string key = text::collapse_whitespace(text::to_lower(phrase));
  lexicon_[key] = type;
  std::size_t words = 1;
  for (char c : key) words += (c == ' ') ? 1 : 0;
  longest_phrase_ = std::max(longest_phrase_, words);
}

std::vector<TokenTag> RuleBasedTagger::tag(std::span<const SurfaceToken> toks) const {
  std::vector<TokenTag> tags(toks.size());
  auto mark = [&](std::size_t begin, std::size_t end, const std::string& type) {
    for (std::size_t k = begin; k < end; ++k) {
      tags[k].label = TokenLabel::kEntity;
      tags[k].entity_type = type;
      tags[k].continues_entity = k > begin;
    }
  };

  std::size_t i = 0;
  while (i < toks.size()) {
    const SurfaceToken& tok = toks[i];
    if (!tok.is_word) {
      ++i;
      continue;
    }
    const std::string low = lower_word(tok);

    // Month-name dates: "July 4, 1776", "March 1889".
    if (is_capitalized(tok.text) && month_names().contains(low)) {
      std::size_t j = i + 1;
      if (j < toks.size() && is_digit_word(toks[j].text)) {
        ++j;
        if (j + 1 < toks.size() && toks[j].text == "," && is_digit_word(toks[j + 1].text)) j += 2;
        mark(i, j, "date");
        i = j;
        continue;
      }
    }

    if (is_digit_word(tok.text)) {
      std::string digits;
      for (char c : tok.text) {
        if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
      }
      const bool year = digits.size() == 4 && digits == tok.text &&
                        std::stoi(digits) >= 1000 && std::stoi(digits) <= 2100;
      const bool decade = tok.text.size() == 5 && tok.text.back() == 's';
      mark(i, i + 1, (year || decade) ? "date" : "number");
      ++i;
      continue;
    }

    // Longest lexicon phrase.
    bool matched = false;
    for (std::size_t len = std::min(longest_phrase_, toks.size() - i); len >= 1; --len) {
      std::string phrase;
      bool all_words = true;
      for (std::size_t k = i; k < i + len; ++k) {
        if (!toks[k].is_word) {
          all_words = false;
          break;
        }
        if (k > i) phrase.push_back(' ');
        phrase += lower_word(toks[k]);
      }
      if (!all_words) continue;
      auto it = lexicon_.find(phrase);
      if (it != lexicon_.end()) {
        mark(i, i + len, it->second);
        i += len;
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (!is_capitalized(tok.text)) {
      const bool known = comparatives().contains(low) && low != "more" && low != "less" &&
                         low != "most" && low != "least";
      const bool suffix = low.size() >= 5 && (low.ends_with("er")) &&
                          !non_comparative_er().contains(low) && i > 0 &&
                          copulas().contains(lower_word(toks[i - 1]));
      if (known || suffix) mark(i, i + 1, "adj");
      ++i;
      continue;
    }

    if (capital_stopwords().contains(low)) {
      ++i;
      continue;
    }

    // Capitalized span, allowing lowercase connectors between capitals.
    std::size_t j = i + 1;
    while (j < toks.size()) {
      if (toks[j].is_word && is_capitalized(toks[j].text) &&
          !capital_stopwords().contains(lower_word(toks[j]))) {
        ++j;
      } else if (j + 1 < toks.size() && connectors().contains(lower_word(toks[j])) &&
                 toks[j + 1].is_word && is_capitalized(toks[j + 1].text)) {
        j += 2;
      } else {
        break;
      }
    }
    if (j - i == 1 && sentence_initial(toks, i)) {
      ++i;
      continue;
    }
    std::string type = "object";
    std::string phrase;
    for (std::size_t k = i; k < j; ++k) {
      if (k > i) phrase.push_back(' ');
      phrase += lower_word(toks[k]);
    }
    if (auto it = lexicon_.find(phrase); it != lexicon_.end()) {
      type = it->second;
    } else if (auto h = head_nouns().find(lower_word(toks[j - 1])); h != head_nouns().end()) {
      type = h->second;
    } else if (first_names().contains(low)) {
      type = "person";
    }
    mark(i, j, type);
    i = j;
  }
  return tags;
}

const EntityTagger& default_tagger() {
  static const RuleBasedTagger kTagger;
  return kTagger;
}

std::string Token::surface() const {
  if (determiner.empty()) return text;
  return determiner + " " + text;
}

std::string Placeholder::label() const {
  return numbered ? type + " " + std::to_string(ordinal) : type;
}

std::string Placeholder::surface() const {
  if (determiner.empty()) return text;
  return determiner + " " + text;
}

std::map<std::string, std::string> QuestionTemplate::original_substitutions() const {
  std::map<std::string, std::string> out;
  for (const auto& p : placeholders) out[p.label()] = p.surface();
  return out;
}

namespace {

std::mutex& tagger_mutex() {
  static std::mutex m;
  return m;
}

std::vector<TokenTag> run_tagger(const EntityTagger& tagger,
                                 std::span<const SurfaceToken> toks) {
  if (tagger.thread_safe()) return tagger.tag(toks);
  std::lock_guard lock(tagger_mutex());
  return tagger.tag(toks);
}

}  // namespace

std::vector<Token> classify_tokens(const std::string& question, const EntityTagger& tagger) {
  const std::vector<SurfaceToken> surface = text::tokenize(question);
  bool any_word = false;
  for (const auto& t : surface) any_word = any_word || t.is_word;
  if (!any_word) fail(ErrorCode::kEmptyQuestion, "question has no words");

  const std::vector<TokenTag> tags = run_tagger(tagger, surface);
  if (tags.size() != surface.size()) {
    fail(ErrorCode::kTaggerFailure,
         "tagger returned " + std::to_string(tags.size()) + " tags for " +
             std::to_string(surface.size()) + " tokens");
  }

  std::vector<Token> out;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const TokenTag& tag = tags[i];
    const bool entity = tag.label == TokenLabel::kEntity;
    if (entity == tag.entity_type.empty()) {
      fail(ErrorCode::kTaggerFailure,
           "token " + std::to_string(i) + " has inconsistent label/type");
    }
    if (tag.continues_entity) {
      if (!entity || out.empty() || out.back().label != TokenLabel::kEntity ||
          out.back().entity_type != tag.entity_type) {
        fail(ErrorCode::kTaggerFailure,
             "token " + std::to_string(i) + " continues no entity of its type");
      }
      Token& prev = out.back();
      if (surface[i].space_before) prev.text.push_back(' ');
      prev.text += surface[i].text;
      continue;
    }
    Token tok;
    tok.text = surface[i].text;
    tok.label = tag.label;
    tok.entity_type = tag.entity_type;
    tok.space_before = surface[i].space_before;
    if (entity && tok.entity_type != "adj" && !out.empty() &&
        out.back().label == TokenLabel::kStructural && is_article(out.back().text) &&
        tok.space_before) {
      tok.determiner = out.back().text;
      tok.space_before = out.back().space_before;
      out.pop_back();
    }
    out.push_back(std::move(tok));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
  return out;
}

std::string render_tokens(const std::vector<Token>& tokens,
                          const std::function<std::string(const Token&)>& slot_text) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.space_before && !out.empty()) out.push_back(' ');
    out += t.label == TokenLabel::kEntity ? slot_text(t) : t.text;
  }
  return out;
}

QuestionTemplate build_template(std::vector<Token> tokens) {
  QuestionTemplate tmpl;
  std::map<std::string, int> type_count;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].index != i) {
      fail(ErrorCode::kInvalidArgument, "token indices are not contiguous at " + std::to_string(i));
    }
    if (tokens[i].label == TokenLabel::kEntity) ++type_count[tokens[i].entity_type];
  }
  std::map<std::string, int> seen;
  std::map<std::size_t, std::size_t> slot_of_token;
  for (const auto& t : tokens) {
    if (t.label != TokenLabel::kEntity) continue;
    Placeholder p;
    p.text = t.text;
    p.type = t.entity_type;
    p.ordinal = ++seen[t.entity_type];
    p.determiner = t.determiner;
    p.token_index = t.index;
    p.numbered = type_count[t.entity_type] > 1;
    slot_of_token[t.index] = tmpl.placeholders.size();
    tmpl.placeholders.push_back(std::move(p));
  }
  tmpl.original = render_tokens(tokens, [](const Token& t) { return t.surface(); });
  tmpl.template_text = render_tokens(tokens, [&](const Token& t) {
    return "[" + tmpl.placeholders[slot_of_token.at(t.index)].label() + "]";
  });
  tmpl.tokens = std::move(tokens);
  return tmpl;
}

QuestionTemplate decompose_question(const std::string& question, const EntityTagger& tagger) {
  return build_template(classify_tokens(question, tagger));
}

std::string render_template(const QuestionTemplate& tmpl,
                            const std::map<std::string, std::string>& substitutions) {
  std::map<std::size_t, std::string> by_token;
  std::set<std::string> labels;
  for (const auto& p : tmpl.placeholders) {
    const std::string label = p.label();
    labels.insert(label);
    auto it = substitutions.find(label);
    if (it == substitutions.end()) {
      fail(ErrorCode::kMissingSubstitution, "no substitution for [" + label + "]");
    }
    by_token[p.token_index] = it->second;
  }
  for (const auto& [key, value] : substitutions) {
    if (!labels.contains(key)) {
      fail(ErrorCode::kUnknownPlaceholder, "template has no slot [" + key + "]");
    }
  }
  return render_tokens(tmpl.tokens, [&](const Token& t) { return by_token.at(t.index); });
}

nlohmann::json template_to_json(const QuestionTemplate& tmpl) {
  nlohmann::json placeholders = nlohmann::json::array();
  for (const auto& p : tmpl.placeholders) {
    nlohmann::json j;
    j["text"] = p.text;
    j["type"] = p.type;
    j["ordinal"] = p.ordinal;
    if (!p.determiner.empty()) j["determiner"] = p.determiner;
    placeholders.push_back(std::move(j));
  }
  return nlohmann::json{{"original", tmpl.original},
                        {"template_text", tmpl.template_text},
                        {"placeholders", std::move(placeholders)}};
}

}  // namespace pathguide
