// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "codewiki/agent/chat.hpp"

namespace codewiki::agent {

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// Throws TransportError when no response was received.
  virtual HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body) = 0;
};

/// cpp-httplib client; https requires OpenSSL at build time.
std::unique_ptr<HttpTransport> make_default_transport(std::chrono::seconds timeout = std::chrono::seconds(600));

struct RetryPolicy {
  std::size_t attempts = 3;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to std::this_thread::sleep_for
};

/// Runs `fn`, retrying TransportError with exponential backoff.
/// Throws RetryExhaustedError after the last attempt.
template <class F>
auto with_retry(const RetryPolicy& policy, F&& fn) -> decltype(fn());

/// Reads the API key named by config.api_key_env; empty when unset.
std::string api_key(const ModelConfig& config);

/// OpenAI-style /chat/completions wire format.
class OpenAiBackend final : public ChatBackend {
 public:
  explicit OpenAiBackend(std::shared_ptr<HttpTransport> transport, RetryPolicy retry = {});
  AssistantTurn complete(const ModelConfig& config, const std::vector<Message>& messages,
                         const std::vector<ToolSpec>& tools, const RequestContext& context) override;

  static nlohmann::json request_body(const ModelConfig& config, const std::vector<Message>& messages,
                                     const std::vector<ToolSpec>& tools);
  static AssistantTurn parse_response(const nlohmann::json& body);

 private:
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
};

/// Anthropic /v1/messages wire format.
class AnthropicBackend final : public ChatBackend {
 public:
  explicit AnthropicBackend(std::shared_ptr<HttpTransport> transport, RetryPolicy retry = {});
  AssistantTurn complete(const ModelConfig& config, const std::vector<Message>& messages,
                         const std::vector<ToolSpec>& tools, const RequestContext& context) override;

  static nlohmann::json request_body(const ModelConfig& config, const std::vector<Message>& messages,
                                     const std::vector<ToolSpec>& tools);
  static AssistantTurn parse_response(const nlohmann::json& body);

 private:
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
};

/// Classifies a non-2xx reply: throws ContextOverflowError, TransportError
/// (retryable) or RemoteModelError.
[[noreturn]] void raise_http_error(const HttpResponse& response);

// ---------------------------------------------------------------------------

template <class F>
auto with_retry(const RetryPolicy& policy, F&& fn) -> decltype(fn()) {
  auto delay = policy.initial_delay;
  std::string last;
  const std::size_t attempts = policy.attempts == 0 ? 1 : policy.attempts;
  for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
    try {
      return fn();
    } catch (const TransportError& e) {
      last = e.what();
      if (attempt == attempts) break;
      if (policy.sleep) policy.sleep(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier));
    }
  }
  throw RetryExhaustedError("remote model unreachable after " + std::to_string(attempts) + " attempts: " + last,
                            attempts);
}

}  // namespace codewiki::agent
