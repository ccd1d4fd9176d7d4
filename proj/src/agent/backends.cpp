// SPDX-License-Identifier: Apache-2.0
#include "codewiki/agent/backends.hpp"

namespace codewiki::agent {

ProviderBackends::ProviderBackends(std::shared_ptr<HttpTransport> transport, ChatBackend* mock, RetryPolicy retry)
    : openai_(transport, retry), anthropic_(transport, retry), mock_(mock) {}

ChatBackend& ProviderBackends::backend_for(const ModelConfig& config) {
  if (config.provider == "openai") return openai_;
  if (config.provider == "anthropic") return anthropic_;
  if (config.provider == "mock") {
    if (!mock_) throw ValidationError("model '" + config.name + "' uses the mock provider but no mock scripts were given");
    return *mock_;
  }
  throw ValidationError("model '" + config.name + "': unknown provider '" + config.provider + "'");
}

}  // namespace codewiki::agent
