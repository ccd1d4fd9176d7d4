// SPDX-License-Identifier: Apache-2.0
#include "codewiki/agent/chat.hpp"

#include "codewiki/core/text.hpp"

namespace codewiki::agent {

void ModelConfig::validate() const {
  if (!(temperature >= 0.0)) throw ValidationError("model '" + name + "': temperature must be >= 0");
  if (max_output_tokens == 0) throw ValidationError("model '" + name + "': max_output_tokens must be > 0");
  if (context_window == 0) throw ValidationError("model '" + name + "': context_window must be > 0");
  if (provider != "openai" && provider != "anthropic" && provider != "mock")
    throw ValidationError("model '" + name + "': unknown provider '" + provider + "'");
  if (provider != "mock" && endpoint.empty()) throw ValidationError("model '" + name + "': endpoint is required");
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
  }
  return "user";
}

nlohmann::json Message::to_json() const {
  nlohmann::json j;
  j["role"] = std::string(to_string(role));
  j["content"] = content;
  if (role == Role::Assistant && !tool_calls.empty()) {
    auto& calls = j["tool_calls"] = nlohmann::json::array();
    for (const auto& c : tool_calls) {
      nlohmann::json cj{{"id", c.id}, {"name", c.name}};
      if (c.parse_error) {
        cj["arguments_raw"] = c.raw_arguments;
        cj["parse_error"] = *c.parse_error;
      } else {
        cj["arguments"] = c.arguments;
      }
      calls.push_back(std::move(cj));
    }
  }
  if (role == Role::Tool) {
    j["tool_call_id"] = tool_call_id;
    j["name"] = tool_name;
    if (is_error) j["is_error"] = true;
  }
  return j;
}

ToolCall make_tool_call(std::string id, std::string name, std::string raw_arguments) {
  ToolCall c;
  c.id = std::move(id);
  c.name = std::move(name);
  c.raw_arguments = std::move(raw_arguments);
  if (trim(c.raw_arguments).empty()) return c;
  try {
    auto j = nlohmann::json::parse(c.raw_arguments);
    if (!j.is_object()) {
      c.parse_error = "arguments must be a JSON object";
    } else {
      c.arguments = std::move(j);
    }
  } catch (const nlohmann::json::parse_error& e) {
    c.parse_error = std::string("invalid JSON arguments: ") + e.what();
  }
  return c;
}

}  // namespace codewiki::agent
