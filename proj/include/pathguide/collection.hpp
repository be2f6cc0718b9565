#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathguide/examplegen.hpp"
#include "pathguide/taxonomy.hpp"

namespace pathguide {

inline constexpr int kCollectionFormatVersion = 1;

// Metadata carried by a collection file; not part of collection equality.
struct CollectionMeta {
  std::string created_at;
  ConstructionMode construction_mode = ConstructionMode::kGuidedFill;
  int delta = 7;
};

// Immutable after build. freq counts examples whose strategy uses a skill at
// least once, not skill occurrences.
class ExampleCollection {
 public:
  const std::vector<SimilarExample>& examples() const noexcept { return examples_; }
  std::size_t n() const noexcept { return examples_.size(); }
  std::size_t freq(Skill s) const noexcept { return freq_[skill_index(s)]; }
  const std::array<std::size_t, kSkillCount>& freq_index() const noexcept { return freq_; }
  const CollectionMeta& meta() const noexcept { return meta_; }

  bool operator==(const ExampleCollection& other) const {
    return examples_ == other.examples_ && freq_ == other.freq_;
  }

 private:
  friend ExampleCollection build_collection(std::vector<SimilarExample>, CollectionMeta);
  std::vector<SimilarExample> examples_;
  std::array<std::size_t, kSkillCount> freq_{};
  CollectionMeta meta_;
};

// Throws kEmptyCollection, or the example's own validation error.
ExampleCollection build_collection(std::vector<SimilarExample> examples, CollectionMeta meta = {});

// Membership counts recomputed from scratch.
std::array<std::size_t, kSkillCount> membership_counts(const std::vector<SimilarExample>& examples);

nlohmann::ordered_json example_to_json(const SimilarExample& example);
// Throws kCorruptCollection on missing fields or unknown skills.
SimilarExample example_from_json(const nlohmann::json& j);

nlohmann::ordered_json collection_to_json(const ExampleCollection& collection);
// Verifies n and freq_index against the examples. Throws kCorruptCollection.
ExampleCollection collection_from_json(const nlohmann::json& j);

// Throws kStorageError.
void persist_collection(const ExampleCollection& collection, const std::filesystem::path& path);
// Throws kStorageError / kCorruptCollection.
ExampleCollection restore_collection(const std::filesystem::path& path);

}  // namespace pathguide
