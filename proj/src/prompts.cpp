#include "pathguide/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "embedded_data.hpp"
#include "pathguide/error.hpp"

namespace pathguide {

std::string_view prompt_file_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::kStrategy: return "strategy.txt";
    case PromptKind::kSimilarity: return "similarity.txt";
    case PromptKind::kAnswer: return "answer.txt";
    case PromptKind::kSubstitutes: return "substitutes.txt";
    case PromptKind::kParaphrase: return "paraphrase.txt";
    case PromptKind::kReferenceDoc: return "reference_doc.txt";
    case PromptKind::kSegment: return "segment.txt";
  }
  return {};
}

std::vector<std::string> template_slots(std::string_view tmpl) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = tmpl.find("{{", pos)) != std::string_view::npos) {
    const auto end = tmpl.find("}}", pos + 2);
    if (end == std::string_view::npos) break;
    std::string name(tmpl.substr(pos + 2, end - pos - 2));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    pos = end + 2;
  }
  return out;
}

std::string fill_slots(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    const auto close = open == std::string_view::npos ? open : tmpl.find("}}", open + 2);
    if (open == std::string_view::npos || close == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::string name(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) {
      fail(ErrorCode::kTemplateSlotMissing, "no value for slot {{" + name + "}}");
    }
    out += it->second;
    pos = close + 2;
  }
  return out;
}

const PromptLibrary& PromptLibrary::defaults() {
  static const PromptLibrary kLibrary = [] {
    PromptLibrary lib;
    for (PromptKind kind : kAllPromptKinds) {
      const std::string name = "prompts/" + std::string(prompt_file_name(kind));
      lib.templates_[kind] = std::string(embedded::lookup(name));
    }
    return lib;
  }();
  return kLibrary;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    fail(ErrorCode::kStorageError, "prompt directory not found: " + dir.string());
  }
  PromptLibrary lib = defaults();
  for (PromptKind kind : kAllPromptKinds) {
    const auto file = dir / prompt_file_name(kind);
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorCode::kStorageError, "cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    lib.templates_[kind] = ss.str();
  }
  return lib;
}

const std::string& PromptLibrary::text(PromptKind kind) const { return templates_.at(kind); }

std::string_view bundled_data(std::string_view name) { return embedded::lookup(name); }

}  // namespace pathguide
