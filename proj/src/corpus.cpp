#include "pathguide/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pathguide/error.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorCode::kValidationError, "field '" + field + "' " + why);
}

std::string required_text(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) invalid(field, "is missing");
  if (!j[field].is_string()) invalid(field, "must be a string");
  std::string v = j[field].get<std::string>();
  if (text::trim(v).empty()) invalid(field, "is empty");
  return v;
}

std::vector<std::string> required_texts(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) invalid(field, "is missing");
  if (!j[field].is_array()) invalid(field, "must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j[field]) {
    if (!e.is_string()) invalid(field, "must be an array of strings");
    if (text::trim(e.get<std::string>()).empty()) invalid(field, "contains an empty string");
    out.push_back(e.get<std::string>());
  }
  if (out.empty()) invalid(field, "is empty");
  return out;
}

}  // namespace

QARecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kValidationError, "record must be a JSON object");
  QARecord r;
  r.question_id = required_text(j, "question_id");
  r.question = required_text(j, "question");
  r.documents = required_texts(j, "documents");
  r.gold_answers = required_texts(j, "gold_answers");
  if (j.contains("gold_sentence_ids") && !j["gold_sentence_ids"].is_null()) {
    const auto& ids = j["gold_sentence_ids"];
    if (!ids.is_array()) invalid("gold_sentence_ids", "must be an array of [doc, sentence] pairs");
    const DocumentSet docs(r.documents);
    std::vector<SentenceRef> refs;
    for (const auto& pair : ids) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
          !pair[1].is_number_unsigned()) {
        invalid("gold_sentence_ids", "must be an array of [doc, sentence] pairs");
      }
      const SentenceRef ref{pair[0].get<std::size_t>(), pair[1].get<std::size_t>()};
      if (ref.first >= docs.sentences().size()) {
        invalid("gold_sentence_ids", "references document " + std::to_string(ref.first) + " of " +
                                         std::to_string(docs.sentences().size()));
      }
      if (ref.second >= docs.sentences()[ref.first].size()) {
        invalid("gold_sentence_ids",
                "references sentence " + std::to_string(ref.second) + " of document " +
                    std::to_string(ref.first) + ", which has " +
                    std::to_string(docs.sentences()[ref.first].size()));
      }
      refs.push_back(ref);
    }
    r.gold_sentence_ids = std::move(refs);
  }
  return r;
}

nlohmann::ordered_json record_to_json(const QARecord& record) {
  nlohmann::ordered_json j;
  j["question_id"] = record.question_id;
  j["question"] = record.question;
  j["documents"] = record.documents;
  j["gold_answers"] = record.gold_answers;
  if (record.gold_sentence_ids) {
    auto ids = nlohmann::ordered_json::array();
    for (const auto& [d, s] : *record.gold_sentence_ids) ids.push_back({d, s});
    j["gold_sentence_ids"] = std::move(ids);
  }
  return j;
}

std::vector<QARecord> parse_records(std::istream& in, const std::string& source) {
  std::vector<QARecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParseError, where + ": " + e.what());
    }
    try {
      QARecord r = record_from_json(j);
      if (!ids.insert(r.question_id).second) {
        invalid("question_id", "'" + r.question_id + "' is duplicated");
      }
      out.push_back(std::move(r));
    } catch (const Error& e) {
      fail(e.code(), where + ": " + e.detail());
    }
  }
  return out;
}

std::vector<QARecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open corpus " + path.string());
  return parse_records(in, path.string());
}

std::string serialize_records(const std::vector<QARecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

void save_records(const std::vector<QARecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kStorageError, "cannot write corpus " + path.string());
  out << serialize_records(records);
  if (!out) fail(ErrorCode::kStorageError, "write failed for " + path.string());
}

}  // namespace pathguide
