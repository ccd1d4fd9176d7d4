// SPDX-License-Identifier: Apache-2.0
#include "codewiki/agent/mock_backend.hpp"

#include <algorithm>

#include "codewiki/core/text.hpp"
#include "codewiki/graph/tokenizer.hpp"

namespace codewiki::agent {
namespace {

using nlohmann::json;

json fill_json(const json& j, const std::map<std::string, std::string>& vars) {
  if (j.is_string()) return fill_template(j.get<std::string>(), vars);
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(fill_json(v, vars));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = fill_json(it.value(), vars);
    return out;
  }
  return j;
}

ScriptedTurn parse_turn(const json& t, const std::string& where) {
  if (!t.is_object()) throw ValidationError(where + ": turn must be an object");
  ScriptedTurn turn;
  if (t.contains("content")) {
    if (!t["content"].is_string()) throw ValidationError(where + ": content must be a string");
    turn.content = t["content"].get<std::string>();
  }
  if (t.contains("tool_calls")) {
    if (!t["tool_calls"].is_array()) throw ValidationError(where + ": tool_calls must be an array");
    for (const auto& c : t["tool_calls"]) {
      if (!c.is_object() || !c.contains("name") || !c["name"].is_string())
        throw ValidationError(where + ": tool call needs a string name");
      ScriptedCall call;
      call.name = c["name"].get<std::string>();
      if (c.contains("arguments_raw")) {
        if (!c["arguments_raw"].is_string()) throw ValidationError(where + ": arguments_raw must be a string");
        call.raw_arguments = c["arguments_raw"].get<std::string>();
      } else if (c.contains("arguments")) {
        call.arguments = c["arguments"];
      }
      turn.tool_calls.push_back(std::move(call));
    }
  }
  return turn;
}

}  // namespace

std::string fill_template(const std::string& text, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto open = text.find("{{", i);
    if (open == std::string::npos) break;
    auto close = text.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(text, i, open - i);
    std::string key = trim(std::string_view(text).substr(open + 2, close - open - 2));
    if (auto it = vars.find(key); it != vars.end()) {
      out += it->second;
    } else {
      out.append(text, open, close + 2 - open);
    }
    i = close + 2;
  }
  out.append(text, i, std::string::npos);
  return out;
}

std::uint64_t MockBackend::script_key(const std::string& role, const std::string& module, std::size_t turn) {
  return fnv1a64(role + '\x1f' + module + '\x1f' + std::to_string(turn));
}

MockBackend MockBackend::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError("mock script directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  MockBackend backend;
  for (const auto& f : files) {
    json doc;
    try {
      doc = json::parse(read_file(f));
    } catch (const json::parse_error& e) {
      throw ValidationError(f.string() + ": " + e.what());
    }
    backend.load(doc, f.string());
  }
  return backend;
}

void MockBackend::load(const json& doc, const std::string& origin) {
  if (doc.is_array()) {
    for (const auto& s : doc) load(s, origin);
    return;
  }
  if (!doc.is_object()) throw ValidationError(origin + ": script must be an object or array");
  if (doc.contains("scripts")) {
    load(doc["scripts"], origin);
    return;
  }
  if (!doc.contains("role") || !doc["role"].is_string()) throw ValidationError(origin + ": script needs a string role");
  if (!doc.contains("turns") || !doc["turns"].is_array()) throw ValidationError(origin + ": script needs a turns array");
  const std::string role = doc["role"].get<std::string>();
  const std::string module = doc.value("module", std::string("*"));
  std::vector<ScriptedTurn> turns;
  std::size_t k = 0;
  for (const auto& t : doc["turns"]) turns.push_back(parse_turn(t, origin + " [" + role + " " + module + " turn " + std::to_string(k++) + "]"));
  add_script(role, module, std::move(turns));
}

void MockBackend::add_script(const std::string& role, const std::string& module, std::vector<ScriptedTurn> turns) {
  const std::string id = role + '\x1f' + module;
  if (!scripts_.insert(id).second) throw ValidationError("duplicate mock script for role '" + role + "' module '" + module + "'");
  for (std::size_t i = 0; i < turns.size(); ++i) turns_[script_key(role, module, i)] = std::move(turns[i]);
}

bool MockBackend::has_script(const std::string& role, const std::string& module) const {
  return scripts_.count(role + '\x1f' + module) > 0 || scripts_.count(role + "\x1f*") > 0;
}

AssistantTurn MockBackend::complete(const ModelConfig&, const std::vector<Message>& messages,
                                    const std::vector<ToolSpec>&, const RequestContext& context) {
  const ScriptedTurn* turn = nullptr;
  const bool exact = scripts_.count(context.role + '\x1f' + context.module_id) > 0;
  auto it = turns_.find(script_key(context.role, exact ? context.module_id : "*", context.turn));
  if (it != turns_.end()) turn = &it->second;
  if (!turn)
    throw RemoteModelError("no mock script for role '" + context.role + "' module '" + context.module_id + "' turn " +
                           std::to_string(context.turn));

  AssistantTurn out;
  out.content = fill_template(turn->content, context.vars);
  std::size_t k = 0;
  for (const auto& c : turn->tool_calls) {
    std::string id = "call_" + std::to_string(context.turn) + "_" + std::to_string(k++);
    std::string raw = c.raw_arguments ? fill_template(*c.raw_arguments, context.vars) : fill_json(c.arguments, context.vars).dump();
    out.tool_calls.push_back(make_tool_call(std::move(id), c.name, std::move(raw)));
  }
  const auto& tok = graph::default_tokenizer();
  for (const auto& m : messages) out.usage.prompt_tokens += tok.count(m.content);
  out.usage.completion_tokens = tok.count(out.content);
  return out;
}

}  // namespace codewiki::agent
