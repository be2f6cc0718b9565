#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "pathguide/error.hpp"
#include "pathguide/provider.hpp"

namespace pathguide {
namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::kConfigError, "endpoint URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  ep.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  return ep;
}

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

LiveConfig LiveConfig::from_env() {
  LiveConfig c;
  c.base_url = env_or("PATHGUIDE_BASE_URL", "");
  c.model = env_or("PATHGUIDE_MODEL", "");
  c.api_key = env_or("PATHGUIDE_API_KEY", "");
  return c;
}

LiveProvider::LiveProvider(LiveConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) fail(ErrorCode::kConfigError, "live provider needs a base URL");
  if (config_.model.empty()) fail(ErrorCode::kConfigError, "live provider needs a model id");
  split_url(config_.base_url);
}

CompletionResult LiveProvider::complete(const CompletionRequest& request) {
  request.validate();
  const Endpoint ep = split_url(config_.base_url);

  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["max_tokens"] = request.max_output_tokens;
  body["temperature"] = request.temperature;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(config_.initial_backoff_ms) << (attempt - 1)));
    }
    httplib::Client client(ep.origin);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(ep.prefix + "/chat/completions", headers, payload, "application/json");
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (transient_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      fail(ErrorCode::kProviderError,
           "endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      CompletionResult out;
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage") && j["usage"].is_object()) {
        out.usage = make_usage(j["usage"].value("prompt_tokens", std::int64_t{0}),
                               j["usage"].value("completion_tokens", std::int64_t{0}));
      } else {
        out.usage = make_usage(count_whitespace_tokens(request.prompt),
                               count_whitespace_tokens(out.text));
      }
      out.latency_ms = latency;
      return out;
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::kProviderError, std::string("malformed completion body: ") + ex.what());
    }
  }
  fail(ErrorCode::kTransportError, "request failed after " + std::to_string(config_.max_retries + 1) +
                                       " attempts: " + last_error);
}

}  // namespace pathguide
