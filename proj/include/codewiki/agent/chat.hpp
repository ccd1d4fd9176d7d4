// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "codewiki/core/error.hpp"

namespace codewiki::agent {

struct ModelConfig {
  std::string name = "generator";  // config key, used in logs
  std::string provider = "openai";  // openai | anthropic | mock
  std::string endpoint;             // full URL of the chat endpoint
  std::string model;
  double temperature = 0.0;
  std::size_t max_output_tokens = 32768;
  std::size_t context_window = 200000;
  std::string api_key_env;  // name of the env var holding the key

  /// Throws ValidationError.
  void validate() const;
};

struct ToolSpec {
  std::string name;
  std::string description;
  nlohmann::json parameters = nlohmann::json::object();  // JSON schema
};

struct ToolCall {
  std::string id;
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
  std::string raw_arguments;               // as received
  std::optional<std::string> parse_error;  // set when raw_arguments is not a JSON object
};

enum class Role { System, User, Assistant, Tool };
std::string_view to_string(Role r);

struct Message {
  Role role = Role::User;
  std::string content;
  std::vector<ToolCall> tool_calls;  // assistant only
  std::string tool_call_id;          // tool only
  std::string tool_name;             // tool only
  bool is_error = false;             // tool only

  nlohmann::json to_json() const;
};

struct Usage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

struct AssistantTurn {
  std::string content;
  std::vector<ToolCall> tool_calls;
  Usage usage;
};

/// Who is asking. The mock backend keys scripts by (role, module_id, turn);
/// vars fill template placeholders in scripted replies.
struct RequestContext {
  std::string role;
  std::string module_id;
  std::size_t turn = 0;
  std::map<std::string, std::string> vars;
};

/// Prompt does not fit the model's context window.
class ContextOverflowError : public RemoteModelError {
 public:
  using RemoteModelError::RemoteModelError;
};

/// Transport or authentication failure; retried by the HTTP backends.
class TransportError : public RemoteModelError {
 public:
  using RemoteModelError::RemoteModelError;
};

class RetryExhaustedError : public RemoteModelError {
 public:
  RetryExhaustedError(const std::string& what, std::size_t attempts)
      : RemoteModelError(what), attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual AssistantTurn complete(const ModelConfig& config, const std::vector<Message>& messages,
                                 const std::vector<ToolSpec>& tools, const RequestContext& context) = 0;
};

/// Parses an arguments string into ToolCall::arguments, recording failures.
ToolCall make_tool_call(std::string id, std::string name, std::string raw_arguments);

}  // namespace codewiki::agent
