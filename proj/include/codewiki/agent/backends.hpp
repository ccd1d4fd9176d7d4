// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "codewiki/agent/chat.hpp"
#include "codewiki/agent/http_backend.hpp"

namespace codewiki::agent {

/// Picks the backend serving a model config.
class BackendProvider {
 public:
  virtual ~BackendProvider() = default;
  virtual ChatBackend& backend_for(const ModelConfig& config) = 0;
};

/// Every model goes to one backend (tests, --mock-scripts).
class SingleBackend final : public BackendProvider {
 public:
  explicit SingleBackend(ChatBackend& backend) : backend_(backend) {}
  ChatBackend& backend_for(const ModelConfig&) override { return backend_; }

 private:
  ChatBackend& backend_;
};

/// Dispatch on ModelConfig::provider. "mock" needs a mock backend.
class ProviderBackends final : public BackendProvider {
 public:
  ProviderBackends(std::shared_ptr<HttpTransport> transport, ChatBackend* mock = nullptr, RetryPolicy retry = {});
  ChatBackend& backend_for(const ModelConfig& config) override;

 private:
  OpenAiBackend openai_;
  AnthropicBackend anthropic_;
  ChatBackend* mock_;
};

}  // namespace codewiki::agent
