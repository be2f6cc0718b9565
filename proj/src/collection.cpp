#include "pathguide/collection.hpp"

#include <fstream>
#include <sstream>

#include "pathguide/error.hpp"

namespace pathguide {

std::array<std::size_t, kSkillCount> membership_counts(const std::vector<SimilarExample>& examples) {
  std::array<std::size_t, kSkillCount> counts{};
  for (const auto& ex : examples) {
    std::array<bool, kSkillCount> present{};
    for (Skill s : ex.strategy.skills) present[skill_index(s)] = true;
    for (std::size_t i = 0; i < kSkillCount; ++i) counts[i] += present[i] ? 1 : 0;
  }
  return counts;
}

ExampleCollection build_collection(std::vector<SimilarExample> examples, CollectionMeta meta) {
  if (examples.empty()) fail(ErrorCode::kEmptyCollection, "a collection needs at least one example");
  for (const auto& ex : examples) {
    ex.strategy.validate();
    if (ex.reference_docs.size() != ex.strategy.subquestions.size()) {
      fail(ErrorCode::kLengthMismatch, "example '" + ex.question + "' has " +
                                           std::to_string(ex.reference_docs.size()) +
                                           " reference segments for " +
                                           std::to_string(ex.strategy.subquestions.size()) +
                                           " subquestions");
    }
  }
  ExampleCollection c;
  c.freq_ = membership_counts(examples);
  c.examples_ = std::move(examples);
  c.meta_ = std::move(meta);
  return c;
}

nlohmann::ordered_json example_to_json(const SimilarExample& example) {
  nlohmann::ordered_json j;
  j["question"] = example.question;
  j["subquestions"] = example.strategy.subquestions;
  auto skills = nlohmann::ordered_json::array();
  for (Skill s : example.strategy.skills) skills.push_back(std::string(skill_key(s)));
  j["skills"] = std::move(skills);
  j["reference_docs"] = example.reference_docs;
  j["answer"] = example.answer;
  j["construction_mode"] = std::string(construction_mode_key(example.construction_mode));
  return j;
}

SimilarExample example_from_json(const nlohmann::json& j) {
  SimilarExample ex;
  try {
    ex.question = j.at("question").get<std::string>();
    ex.strategy.subquestions = j.at("subquestions").get<std::vector<std::string>>();
    for (const auto& s : j.at("skills")) ex.strategy.skills.push_back(parse_skill(s.get<std::string>()));
    ex.reference_docs = j.at("reference_docs").get<std::vector<std::string>>();
    ex.answer = j.at("answer").get<std::string>();
    if (j.contains("construction_mode")) {
      ex.construction_mode = parse_construction_mode(j.at("construction_mode").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptCollection, std::string("example record: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::kCorruptCollection, "example record: " + e.detail());
  }
  return ex;
}

nlohmann::ordered_json collection_to_json(const ExampleCollection& collection) {
  nlohmann::ordered_json j;
  j["version"] = kCollectionFormatVersion;
  j["n"] = collection.n();
  j["created_at"] = collection.meta().created_at;
  j["construction_mode"] = std::string(construction_mode_key(collection.meta().construction_mode));
  j["delta"] = collection.meta().delta;
  nlohmann::ordered_json freq;
  for (const auto& info : all_skills()) freq[std::string(info.key)] = collection.freq(info.id);
  j["freq_index"] = std::move(freq);
  auto examples = nlohmann::ordered_json::array();
  for (const auto& ex : collection.examples()) examples.push_back(example_to_json(ex));
  j["examples"] = std::move(examples);
  return j;
}

ExampleCollection collection_from_json(const nlohmann::json& j) {
  std::vector<SimilarExample> examples;
  CollectionMeta meta;
  std::size_t n = 0;
  std::array<std::size_t, kSkillCount> stored{};
  try {
    const int version = j.at("version").get<int>();
    if (version != kCollectionFormatVersion) {
      fail(ErrorCode::kCorruptCollection, "unsupported collection version " + std::to_string(version));
    }
    n = j.at("n").get<std::size_t>();
    meta.created_at = j.value("created_at", "");
    meta.delta = j.value("delta", 7);
    if (j.contains("construction_mode")) {
      meta.construction_mode = parse_construction_mode(j.at("construction_mode").get<std::string>());
    }
    for (const auto& [key, count] : j.at("freq_index").items()) {
      stored[skill_index(parse_skill(key))] = count.get<std::size_t>();
    }
    for (const auto& e : j.at("examples")) examples.push_back(example_from_json(e));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptCollection, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCollection) throw;
    fail(ErrorCode::kCorruptCollection, e.detail());
  }
  if (n != examples.size()) {
    fail(ErrorCode::kCorruptCollection, "n is " + std::to_string(n) + " but file holds " +
                                            std::to_string(examples.size()) + " examples");
  }
  const auto recomputed = membership_counts(examples);
  for (std::size_t i = 0; i < kSkillCount; ++i) {
    if (recomputed[i] != stored[i]) {
      fail(ErrorCode::kCorruptCollection,
           "freq_index[" + std::string(all_skills()[i].key) + "] is " + std::to_string(stored[i]) +
               ", examples give " + std::to_string(recomputed[i]));
    }
  }
  try {
    return build_collection(std::move(examples), std::move(meta));
  } catch (const Error& e) {
    fail(ErrorCode::kCorruptCollection, e.what());
  }
}

void persist_collection(const ExampleCollection& collection, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kStorageError, "cannot write collection " + path.string());
  out << collection_to_json(collection).dump(2) << '\n';
  if (!out) fail(ErrorCode::kStorageError, "write failed for " + path.string());
}

ExampleCollection restore_collection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open collection " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptCollection, path.string() + ": " + e.what());
  }
  try {
    return collection_from_json(j);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace pathguide
