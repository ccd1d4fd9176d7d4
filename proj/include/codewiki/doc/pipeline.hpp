// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "codewiki/doc/engine.hpp"
#include "codewiki/graph/scanner.hpp"

namespace codewiki::doc {

struct PipelineOptions {
  graph::ScanOptions scan;
  decompose::DecomposeOptions decompose;
  EngineOptions engine;  // budget and max_depth are taken from `decompose`
  bool resume = false;
  bool llm_partitioner = false;
  unsigned threads = 0;
};

struct PipelineResult {
  decompose::ModuleTree tree;
  std::vector<WriteLogEntry> write_log;
  std::vector<EngineEvent> events;
  std::vector<std::string> problems;  // verify_workspace() on the result
};

/// Workspace metadata lives under <out>/.codewiki: manifest.json (resume
/// state), graph.json, transcripts.jsonl.
inline constexpr const char* kMetaDir = ".codewiki";

/// scan, graph, condense, entry points, decompose, document, synthesize.
/// On a fatal error the manifest is left in state "failed" and the
/// exception propagates; `resume` picks up from there.
PipelineResult run_pipeline(const std::filesystem::path& repo_root, const std::filesystem::path& out,
                            agent::ChatBackend& backend, const agent::ModelConfig& model,
                            const PipelineOptions& options);

/// Same, starting from an existing graph.
PipelineResult run_pipeline(const graph::DependencyGraph& graph, const std::filesystem::path& out,
                            agent::ChatBackend& backend, const agent::ModelConfig& model,
                            const PipelineOptions& options, const std::string& repo_name);

}  // namespace codewiki::doc
