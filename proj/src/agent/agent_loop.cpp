// SPDX-License-Identifier: Apache-2.0
#include "codewiki/agent/agent_loop.hpp"

#include <algorithm>
#include <set>

namespace codewiki::agent {
namespace {

constexpr const char* kTruncated = "[tool result truncated to fit the context window]";

std::size_t estimate(const std::vector<Message>& msgs, const graph::Tokenizer& tok) {
  std::size_t n = 0;
  for (const auto& m : msgs) {
    n += tok.count(m.content) + 4;
    for (const auto& c : m.tool_calls) n += tok.count(c.name) + tok.count(c.raw_arguments);
  }
  return n;
}

}  // namespace

void AgentTranscript::append(Message m) {
  if (m.role == Role::Tool) {
    auto it = std::find(pending_.begin(), pending_.end(), m.tool_call_id);
    if (it == pending_.end()) throw InvariantError("tool result for unknown or answered call '" + m.tool_call_id + "'");
    pending_.erase(it);
  } else {
    if (!pending_.empty()) throw InvariantError("message appended while tool calls are unanswered");
    for (const auto& c : m.tool_calls) {
      if (std::find(pending_.begin(), pending_.end(), c.id) != pending_.end())
        throw InvariantError("duplicate tool call id '" + c.id + "'");
      pending_.push_back(c.id);
    }
  }
  messages_.push_back(std::move(m));
}

void AgentTranscript::add_usage(const Usage& u) {
  usage_.prompt_tokens += u.prompt_tokens;
  usage_.completion_tokens += u.completion_tokens;
}

std::string AgentTranscript::to_jsonl(const std::string& agent) const {
  std::string out;
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    nlohmann::json line{{"agent", agent}, {"seq", i}, {"message", messages_[i].to_json()}};
    out += line.dump();
    out += '\n';
  }
  nlohmann::json tail{{"agent", agent},
                      {"usage", {{"prompt_tokens", usage_.prompt_tokens}, {"completion_tokens", usage_.completion_tokens}}}};
  out += tail.dump();
  out += '\n';
  return out;
}

AgentSession::AgentSession(ChatBackend& backend, ModelConfig config, std::string system_prompt,
                           std::vector<AgentTool> tools, AgentOptions options)
    : backend_(backend), config_(std::move(config)), tools_(std::move(tools)), options_(std::move(options)) {
  if (options_.max_turns == 0) throw ValidationError("max_turns must be >= 1");
  std::set<std::string> names;
  for (const auto& t : tools_) {
    if (!names.insert(t.spec.name).second) throw ValidationError("duplicate tool name '" + t.spec.name + "'");
    specs_.push_back(t.spec);
  }
  Message sys;
  sys.role = Role::System;
  sys.content = std::move(system_prompt);
  window_.push_back(sys);
  truncated_.push_back(false);
  transcript_.append(std::move(sys));
}

void AgentSession::add_user_message(std::string text) {
  Message m;
  m.role = Role::User;
  m.content = std::move(text);
  window_.push_back(m);
  truncated_.push_back(false);
  transcript_.append(std::move(m));
}

bool AgentSession::truncate_oldest_tool_result() {
  for (std::size_t i = 1; i < window_.size(); ++i) {
    if (window_[i].role == Role::Tool && !truncated_[i]) {
      window_[i].content = kTruncated;
      truncated_[i] = true;
      return true;
    }
  }
  return false;
}

void AgentSession::fit_window() {
  const auto& tok = options_.tokenizer ? *options_.tokenizer : graph::default_tokenizer();
  while (estimate(window_, tok) > config_.context_window)
    if (!truncate_oldest_tool_result()) break;
}

AssistantTurn AgentSession::request() {
  fit_window();
  RequestContext ctx{options_.role, options_.module_id, turn_, options_.vars};
  for (;;) {
    try {
      return backend_.complete(config_, window_, specs_, ctx);
    } catch (const ContextOverflowError&) {
      if (!truncate_oldest_tool_result()) throw;
    }
  }
}

ToolResult AgentSession::dispatch(const ToolCall& call) {
  if (call.parse_error) return {*call.parse_error + "; resend the call with a JSON object", true, false};
  auto it = std::find_if(tools_.begin(), tools_.end(), [&](const AgentTool& t) { return t.spec.name == call.name; });
  if (it == tools_.end()) {
    std::string names;
    for (const auto& t : tools_) names += (names.empty() ? "" : ", ") + t.spec.name;
    return {"unknown tool '" + call.name + "'; available tools: " + names, true, false};
  }
  try {
    return it->run(call.arguments);
  } catch (const ValidationError& e) {
    return {e.what(), true, false};
  } catch (const nlohmann::json::exception& e) {
    return {std::string("bad arguments: ") + e.what(), true, false};
  }
}

AgentResult AgentSession::run() {
  AgentResult result;
  std::string last_text;
  for (std::size_t step = 0; step < options_.max_turns; ++step) {
    AssistantTurn turn = request();
    ++turn_;
    ++result.turns;
    transcript_.add_usage(turn.usage);
    if (!turn.content.empty()) last_text = turn.content;

    Message am;
    am.role = Role::Assistant;
    am.content = turn.content;
    am.tool_calls = turn.tool_calls;
    window_.push_back(am);
    truncated_.push_back(false);
    transcript_.append(std::move(am));

    if (turn.tool_calls.empty()) {
      result.text = turn.content;
      result.transcript = transcript_;
      return result;
    }
    bool stop = false;
    for (const auto& call : turn.tool_calls) {
      ToolResult r = dispatch(call);
      stop = stop || r.stop;
      Message tm;
      tm.role = Role::Tool;
      tm.tool_call_id = call.id;
      tm.tool_name = call.name;
      tm.content = std::move(r.content);
      tm.is_error = r.is_error;
      window_.push_back(tm);
      truncated_.push_back(false);
      transcript_.append(std::move(tm));
    }
    if (stop) {
      result.text = last_text;
      result.stopped_by_tool = true;
      result.transcript = transcript_;
      return result;
    }
  }
  result.text = last_text;
  result.incomplete = true;
  result.transcript = transcript_;
  return result;
}

AgentResult run_agent_loop(ChatBackend& backend, const ModelConfig& config, const std::string& system_prompt,
                           const std::vector<AgentTool>& tools, const AgentOptions& options) {
  AgentSession session(backend, config, system_prompt, tools, options);
  return session.run();
}

}  // namespace codewiki::agent
