// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "codewiki/agent/agent_loop.hpp"
#include "codewiki/decompose/decompose.hpp"
#include "codewiki/doc/links.hpp"
#include "codewiki/doc/workspace.hpp"

namespace codewiki::doc {

enum class DelegationReason { Complexity, SemanticDiversity, ContextOverflow };
std::string_view to_string(DelegationReason r);
std::optional<DelegationReason> delegation_reason_from_string(std::string_view s);

struct DelegationRequest {
  std::string module_id;
  std::vector<decompose::SubmoduleSpec> submodules;
  DelegationReason reason = DelegationReason::Complexity;
  bool fallback = false;  // deterministic split made by the engine
};

struct LeafOutcome {
  std::optional<std::string> document;
  std::optional<DelegationRequest> delegation;
};

struct EngineOptions {
  std::size_t budget = decompose::kDefaultBudget;
  std::size_t max_depth = decompose::kDefaultMaxDepth;
  std::size_t max_turns = agent::kDefaultMaxTurns;
  double delegation_guard = 0.8;  // fraction of context_window
  std::string repo_name = "repository";
};

struct EngineEvent {
  std::string module_id;
  std::string kind;  // delegated, delegation_rejected, delegation_refused, fallback_split, truncated_context, ...
  std::string detail;
  friend bool operator==(const EngineEvent&, const EngineEvent&) = default;
};

/// Runs the recursive documentation algorithm over a module tree.
/// Sequential: registry lookups an agent sees depend on prior commits, so
/// a fixed order keeps mock runs reproducible.
class DocEngine {
 public:
  DocEngine(const graph::DependencyGraph& graph, decompose::ModuleTree tree, DocWorkspace& workspace,
            agent::ChatBackend& backend, agent::ModelConfig model, EngineOptions options = {});

  /// Documents one pending leaf or returns the delegation it asked for (the
  /// tree is already updated). Throws ValidationError unless the module is
  /// a pending leaf.
  LeafOutcome document_leaf(const std::string& module_id);
  /// Leaf, then its delegated children, then the parent-level revision.
  void process_module(const std::string& module_id);
  /// Writes the parent (or overview, for root) document. Throws
  /// InvariantError if a child has no document yet.
  std::string synthesize_parent(const std::string& module_id);
  /// Every pending module, then link repair.
  void run();

  const decompose::ModuleTree& tree() const { return tree_; }
  const ReferenceRegistry& registry() const { return registry_; }
  const std::vector<EngineEvent>& events() const { return events_; }
  const std::set<std::string>& delegated() const { return delegated_; }

  /// State from a resume manifest. Registers components of documented leaves.
  void restore(std::set<std::string> delegated, std::vector<EngineEvent> events);

  std::function<void()> on_commit;                           // after every document write
  std::function<void(const std::string&)> on_transcript;     // JSON lines of each agent run

 private:
  struct LeafState;

  std::string leaf_prompt(const decompose::ModuleNode& node, bool truncate, bool* truncated) const;
  std::string parent_prompt(const decompose::ModuleNode& node, const std::string& role) const;
  std::map<std::string, std::string> leaf_vars(const decompose::ModuleNode& node) const;
  std::map<std::string, std::string> parent_vars(const decompose::ModuleNode& node) const;
  std::vector<agent::AgentTool> common_tools(const std::string& module_id, std::optional<std::string>& draft);
  DelegationRequest fallback_split(const decompose::ModuleNode& node, DelegationReason reason) const;
  void apply_delegation(const DelegationRequest& request);
  std::string finalize_leaf(const decompose::ModuleNode& node, std::string markdown) const;
  std::string finalize_parent(const decompose::ModuleNode& node, std::string markdown) const;
  std::string child_links(const decompose::ModuleNode& node) const;
  std::string diagram(const decompose::ModuleNode& node) const;
  std::string tree_outline() const;
  void commit(const decompose::ModuleNode& node, const std::string& markdown);
  void record(std::string module_id, std::string kind, std::string detail);
  void emit_transcript(const agent::AgentResult& r, const std::string& role, const std::string& module_id);
  void repair_links();

  const graph::DependencyGraph& graph_;
  decompose::ModuleTree tree_;
  DocWorkspace& ws_;
  agent::ChatBackend& backend_;
  agent::ModelConfig model_;
  EngineOptions opt_;
  ReferenceRegistry registry_;
  std::map<std::string, std::string> anchor_owner_;  // anchor -> component id
  std::set<std::string> delegated_;
  std::vector<EngineEvent> events_;
};

/// Problems with the finished workspace: broken links, component anchors
/// missing or duplicated across leaf docs, write-log order. Empty when sound.
std::vector<std::string> verify_workspace(const decompose::ModuleTree& tree, const ReferenceRegistry& registry,
                                          const DocWorkspace& workspace);

/// True when every module appears after all of its descendants in `log`.
bool is_reverse_topological(const decompose::ModuleTree& tree, const std::vector<WriteLogEntry>& log);

}  // namespace codewiki::doc
