// SPDX-License-Identifier: Apache-2.0
#ifdef CODEWIKI_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "codewiki/agent/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include "codewiki/core/text.hpp"

namespace codewiki::agent {
namespace {

using nlohmann::json;

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("endpoint is not an absolute URL: " + url);
    auto path_begin = url.find('/', scheme_end + 3);
    std::string origin = path_begin == std::string::npos ? url : url.substr(0, path_begin);
    std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
#ifndef CODEWIKI_HAVE_OPENSSL
    if (starts_with(url, "https://")) throw TransportError("https endpoint requires a build with OpenSSL: " + url);
#endif
    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::seconds(30));
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

 private:
  std::chrono::seconds timeout_;
};

RetryPolicy with_default_sleep(RetryPolicy p) {
  if (!p.sleep) p.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  return p;
}

std::string error_text(const HttpResponse& r) {
  try {
    auto j = json::parse(r.body);
    if (j.contains("error")) {
      const auto& e = j["error"];
      if (e.is_string()) return e.get<std::string>();
      if (e.is_object() && e.contains("message") && e["message"].is_string()) return e["message"].get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return r.body.substr(0, 500);
}

json parse_body(const HttpResponse& r) {
  try {
    return json::parse(r.body);
  } catch (const json::exception& e) {
    throw RemoteModelError(std::string("model response is not JSON: ") + e.what());
  }
}

std::size_t usage_field(const json& usage, const char* key) {
  if (usage.is_object() && usage.contains(key) && usage[key].is_number_unsigned()) return usage[key].get<std::size_t>();
  return 0;
}

}  // namespace

std::unique_ptr<HttpTransport> make_default_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

std::string api_key(const ModelConfig& config) {
  if (config.api_key_env.empty()) return {};
  const char* v = std::getenv(config.api_key_env.c_str());
  return v ? std::string(v) : std::string();
}

void raise_http_error(const HttpResponse& response) {
  const std::string msg = error_text(response);
  const std::string lower = to_lower(msg);
  const bool overflow = lower.find("context_length") != std::string::npos ||
                        lower.find("context length") != std::string::npos ||
                        lower.find("prompt is too long") != std::string::npos ||
                        lower.find("too many tokens") != std::string::npos;
  if ((response.status == 400 || response.status == 413) && overflow)
    throw ContextOverflowError("context window exceeded: " + msg);
  if (response.status == 401 || response.status == 403 || response.status == 408 || response.status == 429 ||
      response.status >= 500)
    throw TransportError("HTTP " + std::to_string(response.status) + ": " + msg);
  throw RemoteModelError("HTTP " + std::to_string(response.status) + ": " + msg);
}

// ---------------------------------------------------------------- OpenAI

OpenAiBackend::OpenAiBackend(std::shared_ptr<HttpTransport> transport, RetryPolicy retry)
    : transport_(std::move(transport)), retry_(with_default_sleep(std::move(retry))) {}

json OpenAiBackend::request_body(const ModelConfig& config, const std::vector<Message>& messages,
                                 const std::vector<ToolSpec>& tools) {
  json msgs = json::array();
  for (const auto& m : messages) {
    json j{{"role", std::string(to_string(m.role))}, {"content", m.content}};
    if (m.role == Role::Assistant && !m.tool_calls.empty()) {
      json calls = json::array();
      for (const auto& c : m.tool_calls) {
        std::string args = c.parse_error ? c.raw_arguments : c.arguments.dump();
        calls.push_back({{"id", c.id}, {"type", "function"}, {"function", {{"name", c.name}, {"arguments", args}}}});
      }
      j["tool_calls"] = std::move(calls);
    }
    if (m.role == Role::Tool) j["tool_call_id"] = m.tool_call_id;
    msgs.push_back(std::move(j));
  }
  json body{{"model", config.model},
            {"messages", std::move(msgs)},
            {"temperature", config.temperature},
            {"max_tokens", config.max_output_tokens}};
  if (!tools.empty()) {
    json ts = json::array();
    for (const auto& t : tools)
      ts.push_back({{"type", "function"},
                    {"function", {{"name", t.name}, {"description", t.description}, {"parameters", t.parameters}}}});
    body["tools"] = std::move(ts);
  }
  return body;
}

AssistantTurn OpenAiBackend::parse_response(const json& body) {
  if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
    throw RemoteModelError("model response has no choices");
  const json& msg = body["choices"][0].value("message", json::object());
  AssistantTurn turn;
  if (msg.contains("content") && msg["content"].is_string()) turn.content = msg["content"].get<std::string>();
  if (msg.contains("tool_calls") && msg["tool_calls"].is_array()) {
    std::size_t k = 0;
    for (const auto& c : msg["tool_calls"]) {
      const json fn = c.value("function", json::object());
      std::string args;
      if (fn.contains("arguments")) args = fn["arguments"].is_string() ? fn["arguments"].get<std::string>() : fn["arguments"].dump();
      std::string id = c.contains("id") && c["id"].is_string() ? c["id"].get<std::string>() : "call_" + std::to_string(k);
      turn.tool_calls.push_back(make_tool_call(std::move(id), fn.value("name", std::string()), std::move(args)));
      ++k;
    }
  }
  const json usage = body.value("usage", json::object());
  turn.usage.prompt_tokens = usage_field(usage, "prompt_tokens");
  turn.usage.completion_tokens = usage_field(usage, "completion_tokens");
  return turn;
}

AssistantTurn OpenAiBackend::complete(const ModelConfig& config, const std::vector<Message>& messages,
                                      const std::vector<ToolSpec>& tools, const RequestContext&) {
  const std::string body = request_body(config, messages, tools).dump();
  std::map<std::string, std::string> headers;
  if (auto key = api_key(config); !key.empty()) headers["Authorization"] = "Bearer " + key;
  auto response = with_retry(retry_, [&] {
    auto r = transport_->post(config.endpoint, headers, body);
    if (r.status < 200 || r.status >= 300) raise_http_error(r);
    return r;
  });
  return parse_response(parse_body(response));
}

// ---------------------------------------------------------------- Anthropic

AnthropicBackend::AnthropicBackend(std::shared_ptr<HttpTransport> transport, RetryPolicy retry)
    : transport_(std::move(transport)), retry_(with_default_sleep(std::move(retry))) {}

json AnthropicBackend::request_body(const ModelConfig& config, const std::vector<Message>& messages,
                                    const std::vector<ToolSpec>& tools) {
  std::string system;
  json msgs = json::array();
  auto push = [&](const std::string& role, json block) {
    if (!msgs.empty() && msgs.back()["role"] == role) {
      msgs.back()["content"].push_back(std::move(block));
    } else {
      msgs.push_back({{"role", role}, {"content", json::array({std::move(block)})}});
    }
  };
  for (const auto& m : messages) {
    switch (m.role) {
      case Role::System:
        if (!system.empty()) system += "\n\n";
        system += m.content;
        break;
      case Role::User:
        push("user", {{"type", "text"}, {"text", m.content}});
        break;
      case Role::Assistant:
        if (!m.content.empty()) push("assistant", {{"type", "text"}, {"text", m.content}});
        for (const auto& c : m.tool_calls)
          push("assistant", {{"type", "tool_use"}, {"id", c.id}, {"name", c.name},
                             {"input", c.parse_error ? json::object() : c.arguments}});
        break;
      case Role::Tool:
        push("user", {{"type", "tool_result"}, {"tool_use_id", m.tool_call_id}, {"content", m.content},
                      {"is_error", m.is_error}});
        break;
    }
  }
  // The messages API needs a leading user turn.
  if (msgs.empty() || msgs.front()["role"] != "user")
    msgs.insert(msgs.begin(), json{{"role", "user"}, {"content", json::array({{{"type", "text"}, {"text", "Begin."}}})}});
  json body{{"model", config.model},
            {"messages", std::move(msgs)},
            {"temperature", config.temperature},
            {"max_tokens", config.max_output_tokens}};
  if (!system.empty()) body["system"] = system;
  if (!tools.empty()) {
    json ts = json::array();
    for (const auto& t : tools)
      ts.push_back({{"name", t.name}, {"description", t.description}, {"input_schema", t.parameters}});
    body["tools"] = std::move(ts);
  }
  return body;
}

AssistantTurn AnthropicBackend::parse_response(const json& body) {
  if (!body.contains("content") || !body["content"].is_array()) throw RemoteModelError("model response has no content");
  AssistantTurn turn;
  for (const auto& block : body["content"]) {
    const std::string type = block.value("type", std::string());
    if (type == "text") {
      turn.content += block.value("text", std::string());
    } else if (type == "tool_use") {
      const json input = block.value("input", json::object());
      turn.tool_calls.push_back(make_tool_call(block.value("id", std::string()), block.value("name", std::string()),
                                               input.is_string() ? input.get<std::string>() : input.dump()));
    }
  }
  const json usage = body.value("usage", json::object());
  turn.usage.prompt_tokens = usage_field(usage, "input_tokens");
  turn.usage.completion_tokens = usage_field(usage, "output_tokens");
  return turn;
}

AssistantTurn AnthropicBackend::complete(const ModelConfig& config, const std::vector<Message>& messages,
                                         const std::vector<ToolSpec>& tools, const RequestContext&) {
  const std::string body = request_body(config, messages, tools).dump();
  std::map<std::string, std::string> headers{{"anthropic-version", "2023-06-01"}};
  if (auto key = api_key(config); !key.empty()) headers["x-api-key"] = key;
  auto response = with_retry(retry_, [&] {
    auto r = transport_->post(config.endpoint, headers, body);
    if (r.status < 200 || r.status >= 300) raise_http_error(r);
    return r;
  });
  return parse_response(parse_body(response));
}

}  // namespace codewiki::agent
