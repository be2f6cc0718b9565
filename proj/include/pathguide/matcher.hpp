#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pathguide/collection.hpp"

namespace pathguide {

enum class SelectionMode { kFull, kCoverageOnly, kUniquenessOnly, kRandom };

// "full", "coverage", "uniqueness", "random".
std::string_view selection_mode_key(SelectionMode mode);
// Also accepts "coverage-only"/"coverage_only" style names.
SelectionMode parse_selection_mode(std::string_view text);

// alpha(s) = ln((N + 1) / (freq(s) + 1)). Throws kEmptyCollection.
double uniqueness(Skill skill, const ExampleCollection& collection);

// Distinct skills of the strategy over the taxonomy size (7). With
// `required` set, distinct skills inside `required` over |required|
// instead; an empty required set falls back to the taxonomy.
double coverage(const ReasoningStrategy& strategy, const std::vector<Skill>* required = nullptr);

struct ExampleScore {
  double coverage = 0.0;
  double uniqueness_sum = 0.0;  // alpha summed per strategy position
  double total = 0.0;
};

ExampleScore selection_score(const SimilarExample& example, const ExampleCollection& collection,
                             const std::vector<Skill>* required = nullptr);

struct SelectionOptions {
  std::optional<std::uint64_t> seed;  // required for kRandom
  std::vector<Skill> required_skills; // experimental coverage variant, empty = off
};

struct MatchResult {
  std::size_t selected_index = 0;  // zero-based
  std::vector<ExampleScore> per_example;
  SelectionMode mode = SelectionMode::kFull;
};

// Scores are compared after rounding to 12 decimals; the lowest index wins
// a tie. Random draws uniformly with the given seed (kConfigError without
// one). Throws kEmptyCollection.
MatchResult select_best(const ExampleCollection& collection, SelectionMode mode,
                        const SelectionOptions& options = {});

// Value the mode maximizes.
double mode_score(const ExampleScore& score, SelectionMode mode);

nlohmann::ordered_json match_to_json(const MatchResult& result);

}  // namespace pathguide
