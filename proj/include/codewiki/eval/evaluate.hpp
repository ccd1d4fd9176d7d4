// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codewiki/agent/agent_loop.hpp"
#include "codewiki/agent/backends.hpp"
#include "codewiki/eval/doc_structure.hpp"
#include "codewiki/eval/rubric.hpp"
#include "codewiki/eval/scoring.hpp"

namespace codewiki::eval {

inline constexpr const char* kJudgeFormatFailure = "judge-format-failure";

/// Tools shared by rubric generators and judges: fetch_section, search_docs.
std::vector<agent::AgentTool> doc_tools(const DocStructure& docs);

/// {"score": 0|1, "reasoning": "..."} from a reply that may wrap it in prose
/// or a code fence.
std::optional<JudgeVerdict> parse_verdict(const std::string& text, const std::string& judge);

/// First JSON object in a reply (bare, fenced, or embedded in prose).
std::optional<nlohmann::json> extract_json_object(const std::string& text);

/// One judge on one leaf requirement (role "judge/<name>", module = leaf
/// path). Unparseable output gets one re-prompt, then an excluded 0.
/// Throws InvariantError when `leaf` is not a leaf.
JudgeVerdict judge_leaf(const RubricNode& leaf, const std::string& leaf_path, const DocStructure& docs,
                        const agent::ModelConfig& judge, agent::ChatBackend& backend, std::size_t max_turns = 12);

struct LeafReport {
  std::string path;
  std::string name;
  std::string requirement;
  double weight = 1.0;
  std::vector<JudgeVerdict> verdicts;  // in judge order
  LeafScore score;
  bool covered = false;
};

struct EvaluationReport {
  RubricNode rubric;
  std::map<std::string, AggregateScore> nodes;  // by rubric path
  std::vector<LeafReport> leaves;
  AggregateScore overall;
  std::size_t covered = 0;
  std::size_t total = 0;

  nlohmann::json to_json() const;
};

struct EvaluateOptions {
  std::size_t threads = 1;  // concurrent (leaf, judge) calls
  std::size_t max_turns = 12;
};

/// Judges every leaf against the markdown corpus at `docs_dir`, then folds
/// the scores up the rubric. Throws ValidationError when no judge is given.
EvaluationReport evaluate(const std::filesystem::path& docs_dir, const RubricNode& rubric,
                          const std::vector<agent::ModelConfig>& judges, agent::BackendProvider& backends,
                          const EvaluateOptions& options = {});

EvaluationReport evaluate(const DocStructure& docs, const RubricNode& rubric,
                          const std::vector<agent::ModelConfig>& judges, agent::BackendProvider& backends,
                          const EvaluateOptions& options = {});

}  // namespace codewiki::eval
