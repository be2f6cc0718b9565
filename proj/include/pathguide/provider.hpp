#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace pathguide {

inline constexpr int kDefaultMaxOutputTokens = 4096;

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    total_tokens += other.total_tokens;
    return *this;
  }
  bool operator==(const TokenUsage&) const = default;
};

TokenUsage make_usage(std::int64_t prompt_tokens, std::int64_t completion_tokens);

struct CompletionRequest {
  std::string prompt;
  int max_output_tokens = kDefaultMaxOutputTokens;
  double temperature = 0.0;
  std::string tag;  // pipeline stage issuing the call

  // Throws kInvalidArgument on empty prompt, max_output_tokens < 1 or
  // negative temperature.
  void validate() const;
};

struct CompletionResult {
  std::string text;
  TokenUsage usage;
  double latency_ms = 0.0;

  bool operator==(const CompletionResult&) const = default;
};

// Whitespace-delimited token count, the accounting used by the mock backend.
std::int64_t count_whitespace_tokens(std::string_view s);

class Provider {
 public:
  virtual ~Provider() = default;
  // Implementations must be safe to call from several threads.
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Stable content hash of (prompt, temperature, max_output_tokens).
std::string request_digest(const CompletionRequest& request);

// Assigns "<digest>#<n>" fingerprints where n counts earlier requests with
// the same digest, so repeated prompts within a run stay distinct.
class FingerprintSequencer {
 public:
  std::string next(const CompletionRequest& request);
  void reset();

 private:
  std::mutex mutex_;
  std::map<std::string, std::size_t> seen_;
};

struct TranscriptEntry {
  std::string fingerprint;
  CompletionRequest request;
  CompletionResult result;
};

class Transcript {
 public:
  Transcript() = default;
  Transcript(std::string provider_name, std::string created_at);

  const std::string& provider_name() const noexcept { return provider_name_; }
  const std::string& created_at() const noexcept { return created_at_; }
  const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  // Throws kStorageError when the fingerprint is already present.
  void append(TranscriptEntry entry);
  const TranscriptEntry* find(const std::string& fingerprint) const;

  // Line-delimited: a {"meta":{...}} header, then one entry per line.
  void save(const std::filesystem::path& path) const;
  static Transcript load(const std::filesystem::path& path);

 private:
  std::string provider_name_;
  std::string created_at_;
  std::vector<TranscriptEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

nlohmann::json entry_to_json(const TranscriptEntry& entry);
TranscriptEntry entry_from_json(const nlohmann::json& j);

// Deterministic in-process backend. Usage is whitespace token counts and
// latency is always 0.
class MockProvider final : public Provider {
 public:
  using Responder = std::function<std::string(const CompletionRequest&)>;

  explicit MockProvider(std::string fixed_reply);
  explicit MockProvider(Responder responder);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "mock"; }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  Responder responder_;
  std::atomic<std::size_t> calls_{0};
};

// Serves results from a transcript; unknown fingerprints raise kReplayMiss.
class ReplayProvider final : public Provider {
 public:
  explicit ReplayProvider(Transcript transcript);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "replay"; }
  // Restarts occurrence counting so the same request sequence replays again.
  void rewind() { sequencer_.reset(); }

 private:
  Transcript transcript_;
  FingerprintSequencer sequencer_;
};

// Forwards to another backend and appends every call to a transcript.
class RecordingProvider final : public Provider {
 public:
  RecordingProvider(Provider& inner, std::string created_at);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_.name(); }

  Transcript transcript() const;
  void save(const std::filesystem::path& path) const;

 private:
  Provider& inner_;
  FingerprintSequencer sequencer_;
  mutable std::mutex mutex_;
  Transcript transcript_;
};

// Runs `requests` through `backend` and returns the recorded transcript.
Transcript record_transcript(Provider& backend, std::span<const CompletionRequest> requests,
                             const std::string& created_at = "");

// Raises kBudgetExceeded once cumulative total_tokens passes the ceiling.
// The call that crosses the ceiling is still charged.
class BudgetedProvider final : public Provider {
 public:
  BudgetedProvider(Provider& inner, std::int64_t token_ceiling);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_.name(); }
  std::int64_t used() const noexcept { return used_.load(); }

 private:
  Provider& inner_;
  std::int64_t ceiling_;
  std::atomic<std::int64_t> used_{0};
};

struct LiveConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;
  std::string api_key;
  int max_retries = 3;
  int initial_backoff_ms = 500;
  int timeout_seconds = 120;

  // PATHGUIDE_BASE_URL, PATHGUIDE_MODEL, PATHGUIDE_API_KEY.
  static LiveConfig from_env();
};

// Chat-completion style HTTP backend (POST <base_url>/chat/completions).
// Connection failures, 429 and 5xx responses are retried with exponential
// backoff; exhausting retries raises kTransportError. Other HTTP errors and
// malformed bodies raise kProviderError.
class LiveProvider final : public Provider {
 public:
  explicit LiveProvider(LiveConfig config);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "live:" + config_.model; }

 private:
  LiveConfig config_;
};

// Completes every request with at most `parallelism` calls in flight.
// Results keep request order; the lowest-index failure is rethrown.
std::vector<CompletionResult> complete_all(Provider& backend,
                                           std::span<const CompletionRequest> requests,
                                           std::size_t parallelism);

// Generic order-preserving fan-out used by the pipeline stages.
void parallel_for(std::size_t count, std::size_t parallelism,
                  const std::function<void(std::size_t)>& body);

}  // namespace pathguide
