// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codewiki/agent/chat.hpp"
#include "codewiki/decompose/decompose.hpp"

namespace codewiki::cli {

struct EmbeddingConfig {
  std::string provider = "hashing";  // hashing | remote
  std::size_t dims = 1024;
  std::string endpoint;
  std::string model;
  std::string api_key_env;
};

struct AppConfig {
  // scan
  std::vector<std::string> ignore;         // added to the built-in patterns
  std::vector<std::string> languages;      // empty = all
  // decompose
  std::size_t budget = decompose::kDefaultBudget;
  std::size_t max_depth = decompose::kDefaultMaxDepth;
  std::size_t max_children = 8;
  bool llm_partitioner = false;
  // agents
  std::size_t max_turns = 40;
  double delegation_guard = 0.8;
  agent::ModelConfig generator;
  std::vector<agent::ModelConfig> judges;
  std::vector<agent::ModelConfig> rubric_generators;
  std::string synthesizer;  // name among rubric_generators; empty = first
  EmbeddingConfig embeddings;
  // paths
  std::string out;
  std::string mock_scripts;
  // misc
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Built-in defaults.
AppConfig default_config();

/// Overlays a config file document. Unknown keys are rejected with
/// ValidationError so typos do not pass silently.
void apply_file(AppConfig& config, const nlohmann::json& doc);
void apply_file(AppConfig& config, const std::string& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// CODEWIKI_* variables; see README for the list.
void apply_env(AppConfig& config, const EnvLookup& env);

/// Every model config and range. Throws ValidationError.
void validate_config(const AppConfig& config);

nlohmann::json model_to_json(const agent::ModelConfig& m);
agent::ModelConfig model_from_json(const nlohmann::json& j, const std::string& default_name);

}  // namespace codewiki::cli
