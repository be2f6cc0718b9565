#include "pathguide/matcher.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "pathguide/error.hpp"

namespace pathguide {

std::string_view selection_mode_key(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kFull: return "full";
    case SelectionMode::kCoverageOnly: return "coverage";
    case SelectionMode::kUniquenessOnly: return "uniqueness";
    case SelectionMode::kRandom: return "random";
  }
  return {};
}

SelectionMode parse_selection_mode(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (const char* suffix : {"-only", "_only"}) {
    if (key.ends_with(suffix)) key.resize(key.size() - 5);
  }
  for (auto mode : {SelectionMode::kFull, SelectionMode::kCoverageOnly,
                    SelectionMode::kUniquenessOnly, SelectionMode::kRandom}) {
    if (selection_mode_key(mode) == key) return mode;
  }
  fail(ErrorCode::kInvalidArgument, "unknown selection mode '" + std::string(text) + "'");
}

double uniqueness(Skill skill, const ExampleCollection& collection) {
  if (collection.n() == 0) fail(ErrorCode::kEmptyCollection, "uniqueness over an empty collection");
  const double n = static_cast<double>(collection.n());
  const double f = static_cast<double>(collection.freq(skill));
  return std::log((n + 1.0) / (f + 1.0));
}

double coverage(const ReasoningStrategy& strategy, const std::vector<Skill>* required) {
  std::array<bool, kSkillCount> present{};
  for (Skill s : strategy.skills) present[skill_index(s)] = true;
  if (required == nullptr || required->empty()) {
    std::size_t distinct = 0;
    for (bool p : present) distinct += p ? 1 : 0;
    return static_cast<double>(distinct) / static_cast<double>(kSkillCount);
  }
  std::array<bool, kSkillCount> wanted{};
  for (Skill s : *required) wanted[skill_index(s)] = true;
  std::size_t hit = 0;
  std::size_t size = 0;
  for (std::size_t i = 0; i < kSkillCount; ++i) {
    size += wanted[i] ? 1 : 0;
    hit += (wanted[i] && present[i]) ? 1 : 0;
  }
  return static_cast<double>(hit) / static_cast<double>(size);
}

ExampleScore selection_score(const SimilarExample& example, const ExampleCollection& collection,
                             const std::vector<Skill>* required) {
  if (collection.n() == 0) fail(ErrorCode::kEmptyCollection, "scoring against an empty collection");
  ExampleScore score;
  score.coverage = coverage(example.strategy, required);
  for (Skill s : example.strategy.skills) score.uniqueness_sum += uniqueness(s, collection);
  score.total = score.coverage + score.uniqueness_sum;
  return score;
}

double mode_score(const ExampleScore& score, SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kCoverageOnly: return score.coverage;
    case SelectionMode::kUniquenessOnly: return score.uniqueness_sum;
    case SelectionMode::kFull:
    case SelectionMode::kRandom: return score.total;
  }
  return score.total;
}

namespace {

double round12(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

MatchResult select_best(const ExampleCollection& collection, SelectionMode mode,
                        const SelectionOptions& options) {
  if (mode == SelectionMode::kRandom && !options.seed) {
    fail(ErrorCode::kConfigError, "random selection needs an explicit seed");
  }
  if (collection.n() == 0) fail(ErrorCode::kEmptyCollection, "selection over an empty collection");
  const std::vector<Skill>* required =
      options.required_skills.empty() ? nullptr : &options.required_skills;

  MatchResult result;
  result.mode = mode;
  result.per_example.reserve(collection.n());
  for (const auto& ex : collection.examples()) {
    result.per_example.push_back(selection_score(ex, collection, required));
  }

  if (mode == SelectionMode::kRandom) {
    // Plain modulo keeps the draw identical across standard libraries;
    // distribution objects are implementation-defined.
    std::mt19937_64 rng(*options.seed);
    result.selected_index = static_cast<std::size_t>(rng() % collection.n());
    return result;
  }
  double best = round12(mode_score(result.per_example[0], mode));
  for (std::size_t i = 1; i < result.per_example.size(); ++i) {
    const double v = round12(mode_score(result.per_example[i], mode));
    if (v > best) {
      best = v;
      result.selected_index = i;
    }
  }
  return result;
}

nlohmann::ordered_json match_to_json(const MatchResult& result) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(selection_mode_key(result.mode));
  j["selected_index"] = result.selected_index;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : result.per_example) {
    rows.push_back({{"coverage", s.coverage}, {"uniqueness_sum", s.uniqueness_sum}, {"total", s.total}});
  }
  j["per_example"] = std::move(rows);
  return j;
}

}  // namespace pathguide
