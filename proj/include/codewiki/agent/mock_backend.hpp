// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "codewiki/agent/chat.hpp"

namespace codewiki::agent {

struct ScriptedCall {
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
  std::optional<std::string> raw_arguments;  // sent verbatim, may be invalid JSON
};

struct ScriptedTurn {
  std::string content;
  std::vector<ScriptedCall> tool_calls;
};

/// Deterministic backend replaying scripted turns.
///
/// Script files are JSON: one script object, an array of them, or
/// {"scripts": [...]}. A script is
///   {"role": "leaf", "module": "root/core" | "*", "turns": [{"content": "...",
///    "tool_calls": [{"name": "...", "arguments": {...} | "arguments_raw": "..."}]}]}
/// Replies are looked up by (role, module, turn index); module "*" matches
/// any module without an exact script. `{{var}}` placeholders in content and
/// string arguments are filled from RequestContext::vars.
class MockBackend final : public ChatBackend {
 public:
  MockBackend() = default;

  /// Loads every *.json file under `dir` in path order. Throws ValidationError.
  static MockBackend from_directory(const std::filesystem::path& dir);

  void load(const nlohmann::json& doc, const std::string& origin = "<memory>");
  void add_script(const std::string& role, const std::string& module, std::vector<ScriptedTurn> turns);

  bool has_script(const std::string& role, const std::string& module) const;
  std::size_t script_count() const { return scripts_.size(); }

  AssistantTurn complete(const ModelConfig& config, const std::vector<Message>& messages,
                         const std::vector<ToolSpec>& tools, const RequestContext& context) override;

  static std::uint64_t script_key(const std::string& role, const std::string& module, std::size_t turn);

 private:
  std::map<std::uint64_t, ScriptedTurn> turns_;
  std::set<std::string> scripts_;  // role + '\x1f' + module
};

/// Replaces `{{name}}` with vars[name]; unknown placeholders stay as written.
std::string fill_template(const std::string& text, const std::map<std::string, std::string>& vars);

}  // namespace codewiki::agent
