#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathguide/answerer.hpp"

namespace pathguide {

// One line of a corpus file:
// {"question_id", "question", "documents": [...], "gold_answers": [...],
//  "gold_sentence_ids": [[doc, sentence], ...]}  (last field optional)
struct QARecord {
  std::string question_id;
  std::string question;
  std::vector<std::string> documents;
  std::vector<std::string> gold_answers;
  std::optional<std::vector<SentenceRef>> gold_sentence_ids;

  bool operator==(const QARecord&) const = default;
};

// Validates one parsed line. Sentence ids are checked against
// DocumentSet segmentation. Throws kValidationError naming the field.
QARecord record_from_json(const nlohmann::json& j);
nlohmann::ordered_json record_to_json(const QARecord& record);

// Errors carry "<source>:<line>" in their detail: kParseError for bad JSON,
// kValidationError for schema or duplicate-id problems.
std::vector<QARecord> parse_records(std::istream& in, const std::string& source = "<input>");
// Throws kStorageError when the file cannot be opened.
std::vector<QARecord> load_records(const std::filesystem::path& path);

// Canonical form: one compact JSON object per line, fields in schema order.
std::string serialize_records(const std::vector<QARecord>& records);
void save_records(const std::vector<QARecord>& records, const std::filesystem::path& path);

}  // namespace pathguide
