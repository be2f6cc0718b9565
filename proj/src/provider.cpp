#include "pathguide/provider.hpp"

#include <cctype>
#include <charconv>
#include <exception>
#include <fstream>
#include <thread>

#include "pathguide/error.hpp"
#include "pathguide/text.hpp"

namespace pathguide {

using nlohmann::json;

TokenUsage make_usage(std::int64_t prompt_tokens, std::int64_t completion_tokens) {
  return TokenUsage{prompt_tokens, completion_tokens, prompt_tokens + completion_tokens};
}

void CompletionRequest::validate() const {
  if (text::trim(prompt).empty()) fail(ErrorCode::kInvalidArgument, "empty prompt");
  if (max_output_tokens < 1) fail(ErrorCode::kInvalidArgument, "max_output_tokens must be >= 1");
  if (!(temperature >= 0.0)) fail(ErrorCode::kInvalidArgument, "temperature must be >= 0");
}

std::int64_t count_whitespace_tokens(std::string_view s) {
  std::int64_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::string request_digest(const CompletionRequest& request) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), request.temperature);
  std::string material = request.prompt;
  material.push_back('\x1f');
  material.append(buf, res.ptr);
  material.push_back('\x1f');
  material += std::to_string(request.max_output_tokens);
  return text::sha256_hex(material);
}

std::string FingerprintSequencer::next(const CompletionRequest& request) {
  const std::string digest = request_digest(request);
  std::lock_guard lock(mutex_);
  const std::size_t n = seen_[digest]++;
  return digest + "#" + std::to_string(n);
}

void FingerprintSequencer::reset() {
  std::lock_guard lock(mutex_);
  seen_.clear();
}

// --- transcript ------------------------------------------------------------

Transcript::Transcript(std::string provider_name, std::string created_at)
    : provider_name_(std::move(provider_name)), created_at_(std::move(created_at)) {}

void Transcript::append(TranscriptEntry entry) {
  if (index_.contains(entry.fingerprint)) {
    fail(ErrorCode::kStorageError, "duplicate fingerprint " + entry.fingerprint);
  }
  index_[entry.fingerprint] = entries_.size();
  entries_.push_back(std::move(entry));
}

const TranscriptEntry* Transcript::find(const std::string& fingerprint) const {
  auto it = index_.find(fingerprint);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

json entry_to_json(const TranscriptEntry& e) {
  json j;
  j["fingerprint"] = e.fingerprint;
  j["request"] = {{"prompt", e.request.prompt},
                  {"temperature", e.request.temperature},
                  {"max_output_tokens", e.request.max_output_tokens},
                  {"tag", e.request.tag}};
  j["result"] = {{"text", e.result.text},
                 {"usage",
                  {{"prompt_tokens", e.result.usage.prompt_tokens},
                   {"completion_tokens", e.result.usage.completion_tokens},
                   {"total_tokens", e.result.usage.total_tokens}}},
                 {"latency_ms", e.result.latency_ms}};
  return j;
}

TranscriptEntry entry_from_json(const json& j) {
  TranscriptEntry e;
  e.fingerprint = j.at("fingerprint").get<std::string>();
  const json& req = j.at("request");
  e.request.prompt = req.at("prompt").get<std::string>();
  e.request.temperature = req.at("temperature").get<double>();
  e.request.max_output_tokens = req.at("max_output_tokens").get<int>();
  e.request.tag = req.value("tag", "");
  const json& res = j.at("result");
  e.result.text = res.at("text").get<std::string>();
  const json& usage = res.at("usage");
  e.result.usage.prompt_tokens = usage.at("prompt_tokens").get<std::int64_t>();
  e.result.usage.completion_tokens = usage.at("completion_tokens").get<std::int64_t>();
  e.result.usage.total_tokens = usage.at("total_tokens").get<std::int64_t>();
  e.result.latency_ms = res.at("latency_ms").get<double>();
  if (e.result.usage.total_tokens !=
      e.result.usage.prompt_tokens + e.result.usage.completion_tokens) {
    fail(ErrorCode::kStorageError, "usage totals do not add up for " + e.fingerprint);
  }
  return e;
}

void Transcript::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kStorageError, "cannot write transcript " + path.string());
  out << json{{"meta", {{"provider", provider_name_}, {"created_at", created_at_}}}}.dump()
      << '\n';
  for (const auto& e : entries_) out << entry_to_json(e).dump() << '\n';
  if (!out) fail(ErrorCode::kStorageError, "write failed for " + path.string());
}

Transcript Transcript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kStorageError, "cannot open transcript " + path.string());
  Transcript t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      if (j.contains("meta")) {
        t.provider_name_ = j["meta"].value("provider", "");
        t.created_at_ = j["meta"].value("created_at", "");
        continue;
      }
      t.append(entry_from_json(j));
    } catch (const json::exception& ex) {
      fail(ErrorCode::kStorageError,
           path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    } catch (const Error& ex) {
      fail(ErrorCode::kStorageError,
           path.string() + ":" + std::to_string(line_no) + ": " + ex.detail());
    }
  }
  return t;
}

// --- backends --------------------------------------------------------------

MockProvider::MockProvider(std::string fixed_reply)
    : responder_([reply = std::move(fixed_reply)](const CompletionRequest&) { return reply; }) {}

MockProvider::MockProvider(Responder responder) : responder_(std::move(responder)) {}

CompletionResult MockProvider::complete(const CompletionRequest& request) {
  request.validate();
  ++calls_;
  CompletionResult r;
  r.text = responder_(request);
  r.usage = make_usage(count_whitespace_tokens(request.prompt), count_whitespace_tokens(r.text));
  return r;
}

ReplayProvider::ReplayProvider(Transcript transcript) : transcript_(std::move(transcript)) {}

CompletionResult ReplayProvider::complete(const CompletionRequest& request) {
  request.validate();
  const std::string fp = sequencer_.next(request);
  const TranscriptEntry* e = transcript_.find(fp);
  if (e == nullptr) {
    fail(ErrorCode::kReplayMiss,
         "no recorded completion for fingerprint " + fp + " (tag '" + request.tag + "')");
  }
  return e->result;
}

RecordingProvider::RecordingProvider(Provider& inner, std::string created_at)
    : inner_(inner), transcript_(inner.name(), std::move(created_at)) {}

CompletionResult RecordingProvider::complete(const CompletionRequest& request) {
  const std::string fp = sequencer_.next(request);
  CompletionResult result = inner_.complete(request);
  std::lock_guard lock(mutex_);
  transcript_.append(TranscriptEntry{fp, request, result});
  return result;
}

Transcript RecordingProvider::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

void RecordingProvider::save(const std::filesystem::path& path) const {
  std::lock_guard lock(mutex_);
  transcript_.save(path);
}

Transcript record_transcript(Provider& backend, std::span<const CompletionRequest> requests,
                             const std::string& created_at) {
  RecordingProvider recorder(backend, created_at);
  for (const auto& r : requests) recorder.complete(r);
  return recorder.transcript();
}

BudgetedProvider::BudgetedProvider(Provider& inner, std::int64_t token_ceiling)
    : inner_(inner), ceiling_(token_ceiling) {}

CompletionResult BudgetedProvider::complete(const CompletionRequest& request) {
  if (used_.load() > ceiling_) {
    fail(ErrorCode::kBudgetExceeded, "token ceiling " + std::to_string(ceiling_) + " already spent");
  }
  CompletionResult r = inner_.complete(request);
  const std::int64_t now = used_.fetch_add(r.usage.total_tokens) + r.usage.total_tokens;
  if (now > ceiling_) {
    fail(ErrorCode::kBudgetExceeded, "run used " + std::to_string(now) +
                                         " tokens, ceiling is " + std::to_string(ceiling_));
  }
  return r;
}

// --- fan-out ---------------------------------------------------------------

void parallel_for(std::size_t count, std::size_t parallelism,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::min(count, std::max<std::size_t>(parallelism, 1));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !stop.load(); i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
            stop = true;
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<CompletionResult> complete_all(Provider& backend,
                                           std::span<const CompletionRequest> requests,
                                           std::size_t parallelism) {
  std::vector<CompletionResult> results(requests.size());
  parallel_for(requests.size(), parallelism,
               [&](std::size_t i) { results[i] = backend.complete(requests[i]); });
  return results;
}

}  // namespace pathguide
