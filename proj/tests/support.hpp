// Test-side oracles and generators. Nothing here calls into the library's
// scoring code, so the oracles stay independent of what they check.
#pragma once

#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pathguide/collection.hpp"
#include "pathguide/error.hpp"
#include "pathguide/examplegen.hpp"

namespace testsupport {

// Error code raised by `fn`; records a test failure when nothing is thrown.
inline pathguide::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const pathguide::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return pathguide::ErrorCode::kInvalidArgument;
}

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(PATHGUIDE_FIXTURES) / rel;
}

inline std::filesystem::path data_file(const std::string& rel) {
  return std::filesystem::path(PATHGUIDE_DATA_DIR) / rel;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("pathguide-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// --- examples and collections ------------------------------------------

inline pathguide::SimilarExample make_example(std::vector<pathguide::Skill> skills,
                                              const std::string& question = "Q?") {
  pathguide::SimilarExample ex;
  ex.question = question;
  for (std::size_t i = 0; i < skills.size(); ++i) {
    ex.strategy.subquestions.push_back("step " + std::to_string(i + 1));
    ex.reference_docs.push_back("Reference sentence " + std::to_string(i + 1) + ".");
  }
  ex.strategy.skills = std::move(skills);
  ex.answer = "A";
  return ex;
}

// N in [1, max_n], strategy lengths in [1, max_len]. Skills are drawn from a
// random subset of the taxonomy so frequencies and ties vary.
inline std::vector<std::vector<pathguide::Skill>> random_strategies(std::mt19937_64& rng,
                                                                    std::size_t max_n,
                                                                    std::size_t max_len) {
  const std::size_t n = 1 + rng() % max_n;
  const std::size_t palette = 1 + rng() % 7;
  std::vector<std::vector<pathguide::Skill>> out(n);
  for (auto& s : out) {
    const std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i) {
      s.push_back(static_cast<pathguide::Skill>(rng() % palette));
    }
  }
  // Duplicate some strategies, sometimes permuted, to force exact ties.
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (rng() % 4 == 0) {
      out[i] = out[rng() % i];
      std::shuffle(out[i].begin(), out[i].end(), rng);
    }
  }
  return out;
}

// --- matcher oracle -------------------------------------------------------
//
// Exact comparison: coverage is k/7 and the uniqueness sum is the log of a
// rational product prod (N+1)/(f+1). Two totals are equal iff k and the
// product match (ln of a rational never equals a nonzero rational), so ties
// are detected with integer cross-multiplication and only strict orderings
// between different k fall back to long double.

struct OracleScore {
  int distinct = 0;               // k
  unsigned __int128 num = 1;      // product numerator
  unsigned __int128 den = 1;      // product denominator
  long double uniqueness = 0.0L;  // ln(num/den)
  long double total = 0.0L;
};

inline std::vector<OracleScore> oracle_scores(const std::vector<std::vector<pathguide::Skill>>& g) {
  const std::size_t n = g.size();
  std::vector<OracleScore> out;
  for (const auto& strategy : g) {
    OracleScore s;
    std::set<int> distinct;
    for (auto skill : strategy) {
      distinct.insert(static_cast<int>(skill));
      std::size_t freq = 0;
      for (const auto& other : g) {
        bool has = false;
        for (auto o : other) has = has || (o == skill);
        freq += has ? 1 : 0;
      }
      s.num *= static_cast<unsigned __int128>(n + 1);
      s.den *= static_cast<unsigned __int128>(freq + 1);
      s.uniqueness += std::log(static_cast<long double>(n + 1) / static_cast<long double>(freq + 1));
    }
    s.distinct = static_cast<int>(distinct.size());
    s.total = static_cast<long double>(s.distinct) / 7.0L + s.uniqueness;
    out.push_back(s);
  }
  return out;
}

// -1, 0, +1 comparing a against b under the given mode
// (0 full, 1 coverage only, 2 uniqueness only).
inline int oracle_compare(const OracleScore& a, const OracleScore& b, int mode) {
  auto cmp_product = [&] {
    const unsigned __int128 l = a.num * b.den;
    const unsigned __int128 r = b.num * a.den;
    return l < r ? -1 : (l > r ? 1 : 0);
  };
  if (mode == 1) return a.distinct < b.distinct ? -1 : (a.distinct > b.distinct ? 1 : 0);
  if (mode == 2) return cmp_product();
  if (a.distinct == b.distinct) return cmp_product();
  return a.total < b.total ? -1 : 1;
}

inline std::size_t oracle_argmax(const std::vector<std::vector<pathguide::Skill>>& g, int mode) {
  const auto scores = oracle_scores(g);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (oracle_compare(scores[i], scores[best], mode) > 0) best = i;
  }
  return best;
}

// --- ROUGE-L oracle ---------------------------------------------------------

inline std::vector<std::string> oracle_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isspace(c) || (c < 0x80 && std::ispunct(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Top-down memoized LCS, a different formulation from the bottom-up table.
inline std::size_t oracle_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size() || j == b.size()) return std::size_t{0};
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t v = (a[i] == b[j]) ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = v;
    return v;
  };
  return go(0, 0);
}

// F1 of LCS precision and recall equals 2*lcs / (|c| + |r|).
inline double oracle_rouge_l(const std::string& candidate, const std::string& reference) {
  const auto c = oracle_tokens(candidate);
  const auto r = oracle_tokens(reference);
  const std::size_t lcs = oracle_lcs(c, r);
  if (lcs == 0) return 0.0;
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(c.size() + r.size());
}

// Random word strings over a small vocabulary so LCS values vary; words
// sometimes carry case or punctuation the normalizer must strip.
inline std::string random_sentence(std::mt19937_64& rng, std::size_t max_words) {
  static const std::vector<std::string> kWords = {"the", "cat", "sat", "on", "mat", "a",
                                                  "dog", "ran", "fast", "Paris", "1889", "tower"};
  const std::size_t n = 1 + rng() % max_words;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w = kWords[rng() % kWords.size()];
    if (rng() % 5 == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (rng() % 6 == 0) w += ",";
    out += (i == 0 ? "" : " ") + w;
  }
  return out;
}

// --- Hits / Error oracle -----------------------------------------------------

// Sets as bitmasks over a small universe.
struct OracleSupport {
  unsigned cited = 0;
  unsigned gold = 0;
};

struct OracleHitsError {
  long hits = 0;        // sum 1[P superset G]
  long spurious = 0;    // sum 1[P not subset G]
  long questions = 0;
  long extra = 0;       // sum |P \ G|
  long cited = 0;       // sum |P|
};

inline OracleHitsError oracle_hits_error(const std::vector<OracleSupport>& records) {
  OracleHitsError out;
  for (const auto& r : records) {
    const bool superset = (r.cited & r.gold) == r.gold;
    const bool subset = (r.cited & r.gold) == r.cited;
    out.hits += superset ? 1 : 0;
    out.spurious += subset ? 0 : 1;
    out.questions += 1;
    out.extra += std::popcount(r.cited & ~r.gold);
    out.cited += std::popcount(r.cited);
  }
  return out;
}

// --- retrace fixtures --------------------------------------------------------

// Chains that revise their answer (a repair cue followed by a changed
// answer, or repeated <answer> markers).
inline std::vector<std::string> retrace_positive_fixtures() {
  return {
      "So the answer is X\u2026 wait, that seems wrong\u2014let me revise\u2026 the answer is Y",
      "<answer>Paris</answer> \u2026 <answer>Lyon</answer>",
      "<answer>Paris</answer> Actually I am confident. <answer>Paris</answer>",
      "The answer is 1887. Sorry, I misread the date. The answer is 1889.",
      "Answer: Liverpool. Actually, the film is set elsewhere, so the answer is London.",
      "I think the answer is blue. Let me rethink this. The answer is green.",
      "The answer is 42. Wait. Checking the document again, the answer is 24.",
      "Step one gives the answer is Newton. Hmm, actually the answer is Leibniz.",
  };
}

// Single-answer chains without any revision.
inline std::vector<std::string> retrace_clean_fixtures(std::size_t count, std::uint64_t seed) {
  static const std::vector<std::string> kLeads = {
      "The document says the tower was built for a fair.",
      "Both facts point to the same place.",
      "Reading the second segment first helps here.",
      "The subject of the film is John Lennon.",
      "We compare the two heights directly.",
      ""};
  static const std::vector<std::string> kAnswers = {"Paris", "1889", "Liverpool", "Big Ben",
                                                    "Marie Curie", "324 meters"};
  static const std::vector<std::string> kForms = {"The answer is {}.", "<answer>{}</answer>",
                                                  "Answer: {}", "So, {} is correct."};
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string form = kForms[rng() % kForms.size()];
    form.replace(form.find("{}"), 2, kAnswers[rng() % kAnswers.size()]);
    const std::string& lead = kLeads[rng() % kLeads.size()];
    out.push_back(lead.empty() ? form : lead + " " + form);
  }
  return out;
}

// --- question generator -----------------------------------------------------

struct GeneratedQuestion {
  std::string text;
  std::vector<std::string> entities;  // surface forms in order
};

inline GeneratedQuestion random_question(std::mt19937_64& rng) {
  static const std::vector<std::string> kPlaces = {
      "the Eiffel Tower", "the Empire State Building", "Big Ben", "Mount Fuji",
      "the Colosseum", "Lake Baikal", "the Golden Gate Bridge", "Machu Picchu"};
  static const std::vector<std::string> kPeople = {"Marie Curie", "Isaac Newton", "Ada Lovelace",
                                                   "Alan Turing", "Jane Austen", "Nikola Tesla"};
  static const std::vector<std::string> kAdjs = {"taller", "older", "larger", "heavier", "longer"};
  static const std::vector<std::string> kYears = {"1889", "1903", "1931", "1776", "2001"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  auto pick_two = [&](const std::vector<std::string>& v) {
    std::string a = pick(v);
    std::string b = pick(v);
    while (b == a) b = pick(v);
    return std::make_pair(a, b);
  };
  switch (rng() % 6) {
    case 0: {
      auto [a, b] = pick_two(kPlaces);
      const std::string adj = pick(kAdjs);
      return {"Which is " + adj + ", " + a + " or " + b + "?", {adj, a, b}};
    }
    case 1: {
      const std::string p = pick(kPlaces);
      return {"In what year was " + p + " constructed?", {p}};
    }
    case 2: {
      const std::string who = pick(kPeople);
      const std::string where = pick(kPlaces);
      const std::string y = pick(kYears);
      return {"Did " + who + " travel to " + where + " in " + y + "?", {who, where, y}};
    }
    case 3: {
      auto [a, b] = pick_two(kPeople);
      return {"Was " + a + " born before " + b + "?", {a, b}};
    }
    case 4: {
      const std::string p = pick(kPlaces);
      const std::string y = pick(kYears);
      return {"How many people visited " + p + " in " + y + "?", {p, y}};
    }
    default: {
      auto [a, b] = pick_two(kPlaces);
      const std::string adj = pick(kAdjs);
      return {"Is " + a + " " + adj + " than " + b + "?", {a, adj, b}};
    }
  }
}

}  // namespace testsupport
