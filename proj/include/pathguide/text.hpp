#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pathguide::text {

// A surface token with the whitespace fact needed to rebuild the text.
struct SurfaceToken {
  std::string text;
  bool space_before = false;
  bool is_word = false;  // false for detached punctuation
};

// Splits on whitespace and detaches ASCII punctuation into single-character
// tokens. Word-internal '.', ',', '\'' and '-' between alphanumerics stay in
// the word ("97.8", "1,000", "O'Neil", "well-known"). Bytes >= 0x80 are word
// characters, so UTF-8 sequences such as "°C" are never split.
std::vector<SurfaceToken> tokenize(std::string_view input);

// Rebuilds text from tokens using their recorded spacing.
std::string detokenize(const std::vector<SurfaceToken>& tokens);

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercases, replaces ASCII punctuation with spaces and splits.
std::vector<std::string> normalized_words(std::string_view s);

// Sentence boundaries: '.', '!', '?' (or a closing quote after them)
// followed by whitespace and then an uppercase letter, digit, quote or
// bracket. Common abbreviations and single-letter initials do not end a
// sentence. Returned sentences are trimmed and never empty.
std::vector<std::string> split_sentences(std::string_view document);

// Lowercase, whitespace-collapsed form with surrounding quotes/brackets and
// trailing punctuation stripped. Used for textual containment checks.
std::string comparable(std::string_view s);

std::string sha256_hex(std::string_view data);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace pathguide::text
