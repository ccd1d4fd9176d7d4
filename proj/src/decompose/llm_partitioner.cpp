// SPDX-License-Identifier: Apache-2.0
#include "codewiki/decompose/llm_partitioner.hpp"

#include <optional>
#include <sstream>

namespace codewiki::decompose {

using nlohmann::json;

LlmPartitioner::LlmPartitioner(agent::ChatBackend& backend, agent::ModelConfig config, std::size_t max_turns)
    : backend_(backend), config_(std::move(config)), max_turns_(max_turns) {}

std::string LlmPartitioner::prompt(const PartitionInput& input) {
  std::ostringstream os;
  os << "You are organizing a code repository into feature-oriented modules.\n"
     << "Split the components of module '" << input.module_id << "' into cohesive submodules.\n"
     << "Each submodule should stay under " << input.capacity << " tokens where possible.\n"
     << "Every component must appear in exactly one submodule. Call propose_partition once.\n\n"
     << "Components (id, tokens):\n";
  for (const auto& id : input.component_ids) os << "- " << id << " (" << input.token_counts.at(id) << ")\n";
  os << "\nDependencies (from -> to):\n";
  for (const auto& [a, b] : input.edges) os << "- " << a << " -> " << b << "\n";
  os << "\nEntry points:\n";
  for (const auto& id : input.entry_points) os << "- " << id << "\n";
  return os.str();
}

std::vector<SubmoduleSpec> LlmPartitioner::partition(const PartitionInput& input) {
  std::optional<std::vector<SubmoduleSpec>> accepted;
  agent::AgentTool tool;
  tool.spec.name = "propose_partition";
  tool.spec.description = "Submit the submodule grouping.";
  tool.spec.parameters = json::parse(R"({
    "type": "object",
    "properties": {"groups": {"type": "array", "items": {"type": "object",
      "properties": {"name": {"type": "string"}, "component_ids": {"type": "array", "items": {"type": "string"}}},
      "required": ["name", "component_ids"]}}},
    "required": ["groups"]})");
  tool.run = [&](const json& args) -> agent::ToolResult {
    if (!args.contains("groups") || !args["groups"].is_array()) throw ValidationError("groups must be an array");
    std::vector<SubmoduleSpec> groups;
    for (const auto& g : args["groups"]) {
      SubmoduleSpec s;
      s.name = g.at("name").get<std::string>();
      s.component_ids = g.at("component_ids").get<std::vector<std::string>>();
      groups.push_back(std::move(s));
    }
    validate_partition(input, groups);
    accepted = std::move(groups);
    return {"partition accepted", false, true};
  };
  agent::AgentOptions opts;
  opts.max_turns = max_turns_;
  opts.role = "partitioner";
  opts.module_id = input.module_id;
  agent::run_agent_loop(backend_, config_, prompt(input), {tool}, opts);
  if (!accepted) throw RemoteModelError("partitioner gave no valid grouping for '" + input.module_id + "'");
  return *accepted;
}

}  // namespace codewiki::decompose
