#include "pathguide/text.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <memory>

#include "pathguide/error.hpp"

namespace pathguide::text {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_word_char(char c) {
  const auto uc = static_cast<unsigned char>(c);
  return uc >= 0x80 || std::isalnum(uc) != 0;
}

bool is_joiner(char c) { return c == '.' || c == ',' || c == '\'' || c == '-'; }

}  // namespace

std::vector<SurfaceToken> tokenize(std::string_view input) {
  std::vector<SurfaceToken> out;
  std::size_t i = 0;
  bool pending_space = false;
  while (i < input.size()) {
    const char c = input[i];
    if (is_space(c)) {
      pending_space = true;
      ++i;
      continue;
    }
    SurfaceToken tok;
    tok.space_before = pending_space && !out.empty();
    pending_space = false;
    if (is_word_char(c)) {
      std::size_t j = i;
      while (j < input.size()) {
        if (is_word_char(input[j])) {
          ++j;
        } else if (is_joiner(input[j]) && j + 1 < input.size() &&
                   is_word_char(input[j + 1]) && j > i) {
          ++j;
        } else {
          break;
        }
      }
      tok.text = std::string(input.substr(i, j - i));
      tok.is_word = true;
      i = j;
    } else {
      tok.text = std::string(1, c);
      ++i;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::string detokenize(const std::vector<SurfaceToken>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.space_before && !out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (is_space(c)) {
      gap = true;
      continue;
    }
    if (gap && !out.empty()) out.push_back(' ');
    gap = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> normalized_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && (std::isspace(uc) || std::ispunct(uc))) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(uc)));
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

namespace {

constexpr std::array<std::string_view, 22> kAbbreviations{
    "mr", "mrs", "ms", "dr", "prof", "st", "sr", "jr", "vs", "etc", "inc",
    "ltd", "co", "corp", "mt", "no", "fig", "eg", "ie", "approx", "dept",
    "gen"};

bool is_abbreviation(std::string_view before_dot) {
  // Last word before the period.
  std::size_t b = before_dot.size();
  while (b > 0 && (is_word_char(before_dot[b - 1]) || before_dot[b - 1] == '.')) --b;
  std::string word;
  for (char c : before_dot.substr(b)) {
    if (c != '.') word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (word.empty()) return false;
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) return true;
  // "U.S." style: dotted initials
  if (before_dot.substr(b).find('.') != std::string_view::npos) return true;
  for (auto a : kAbbreviations) {
    if (a == word) return true;
  }
  return false;
}

bool opens_sentence(char c) {
  const auto uc = static_cast<unsigned char>(c);
  return std::isupper(uc) || std::isdigit(uc) || c == '"' || c == '\'' ||
         c == '(' || c == '[' || uc >= 0x80;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view doc) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string s = trim(doc.substr(start, end - start));
    if (!s.empty()) out.push_back(collapse_whitespace(s));
    start = end;
  };
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const char c = doc[i];
    if (c == '\n' && i + 1 < doc.size() && doc[i + 1] == '\n') {
      emit(i);
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i + 1;
    while (end < doc.size() && (doc[end] == '"' || doc[end] == '\'' || doc[end] == ')')) ++end;
    if (end < doc.size() && !is_space(doc[end])) continue;
    std::size_t next = end;
    while (next < doc.size() && is_space(doc[next])) ++next;
    if (next >= doc.size()) break;
    if (!opens_sentence(doc[next])) continue;
    if (c == '.' && is_abbreviation(doc.substr(start, i - start))) continue;
    emit(end);
  }
  emit(doc.size());
  return out;
}

std::string comparable(std::string_view s) {
  std::string t = collapse_whitespace(to_lower(s));
  auto strip = [](char c) {
    return c == '"' || c == '\'' || c == '(' || c == ')' || c == '[' ||
           c == ']' || c == '.' || c == '!' || c == '?' || c == ',' ||
           c == ';' || c == ':' || c == ' ' || c == '*' || c == '`';
  };
  std::size_t b = 0;
  std::size_t e = t.size();
  while (b < e && strip(t[b])) ++b;
  while (e > b && strip(t[e - 1])) --e;
  return t.substr(b, e - b);
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    fail(ErrorCode::kInvalidArgument, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace pathguide::text
