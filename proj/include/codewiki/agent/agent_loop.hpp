// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "codewiki/agent/chat.hpp"
#include "codewiki/graph/tokenizer.hpp"

namespace codewiki::agent {

inline constexpr std::size_t kDefaultMaxTurns = 40;

struct ToolResult {
  std::string content;
  bool is_error = false;
  bool stop = false;  // end the loop after this turn's calls are answered
};

using ToolImpl = std::function<ToolResult(const nlohmann::json& arguments)>;

struct AgentTool {
  ToolSpec spec;
  ToolImpl run;
};

/// Append-only message log. Every assistant tool call is answered by exactly
/// one tool message before the next assistant turn.
class AgentTranscript {
 public:
  /// Throws InvariantError when the pairing rule would break.
  void append(Message m);
  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }

  void add_usage(const Usage& u);
  const Usage& usage() const { return usage_; }

  /// True when no tool call is waiting for its result.
  bool complete() const { return pending_.empty(); }

  /// One JSON object per line: {"agent", "seq", "message"}; last line carries usage.
  std::string to_jsonl(const std::string& agent) const;

 private:
  std::vector<Message> messages_;
  std::vector<std::string> pending_;
  Usage usage_;
};

struct AgentOptions {
  std::size_t max_turns = kDefaultMaxTurns;
  std::string role;       // e.g. "leaf", "judge/a"
  std::string module_id;  // key for the mock backend
  std::map<std::string, std::string> vars;
  const graph::Tokenizer* tokenizer = nullptr;  // context estimates; default_tokenizer() when null
};

struct AgentResult {
  std::string text;
  bool incomplete = false;       // max_turns reached without a final answer
  bool stopped_by_tool = false;  // a tool returned stop
  std::size_t turns = 0;
  AgentTranscript transcript;
};

/// A resumable conversation. run() continues from the current transcript;
/// turn numbering carries across calls.
class AgentSession {
 public:
  /// Throws ValidationError on duplicate tool names or max_turns == 0.
  AgentSession(ChatBackend& backend, ModelConfig config, std::string system_prompt, std::vector<AgentTool> tools,
               AgentOptions options);

  void add_user_message(std::string text);
  AgentResult run();

  const AgentTranscript& transcript() const { return transcript_; }
  std::size_t turns_taken() const { return turn_; }

 private:
  AssistantTurn request();
  ToolResult dispatch(const ToolCall& call);
  void fit_window();
  bool truncate_oldest_tool_result();

  ChatBackend& backend_;
  ModelConfig config_;
  std::vector<AgentTool> tools_;
  std::vector<ToolSpec> specs_;
  AgentOptions options_;
  AgentTranscript transcript_;
  std::vector<Message> window_;  // what is sent; tool results may be truncated
  std::vector<bool> truncated_;
  std::size_t turn_ = 0;
};

AgentResult run_agent_loop(ChatBackend& backend, const ModelConfig& config, const std::string& system_prompt,
                           const std::vector<AgentTool>& tools, const AgentOptions& options);

}  // namespace codewiki::agent
