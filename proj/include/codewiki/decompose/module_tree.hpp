// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace codewiki::decompose {

enum class ModuleStatus { Pending, Documented, Synthesized };

std::string_view to_string(ModuleStatus s);
ModuleStatus module_status_from_string(std::string_view s);

struct ModuleNode {
  std::string id;  // "root", "root/module_1", ...
  std::string name;
  std::vector<std::string> component_ids;  // sorted; non-empty iff leaf
  std::vector<ModuleNode> children;
  ModuleStatus status = ModuleStatus::Pending;
  bool oversized = false;  // single component larger than the budget

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const ModuleNode&, const ModuleNode&) = default;
};

struct SubmoduleSpec {
  std::string name;
  std::vector<std::string> component_ids;
};

/// Hierarchy of modules. The root is depth 0.
class ModuleTree {
 public:
  ModuleTree();

  ModuleNode& root() { return root_; }
  const ModuleNode& root() const { return root_; }

  ModuleNode* find(std::string_view id);
  const ModuleNode* find(std::string_view id) const;
  /// Throws InvariantError for an unknown id.
  std::size_t depth_of(std::string_view id) const;
  std::optional<std::string> parent_of(std::string_view id) const;

  /// Pre-order.
  std::vector<const ModuleNode*> nodes() const;
  std::vector<const ModuleNode*> leaves() const;
  /// Children before parents; siblings in order.
  std::vector<const ModuleNode*> post_order() const;
  std::vector<std::string> all_components() const;  // sorted multiset over leaves

  /// Checks every ModuleNode invariant. Throws InvariantError.
  void validate(std::size_t max_depth) const;

  nlohmann::json to_json() const;
  static ModuleTree from_json(const nlohmann::json& doc);

  friend bool operator==(const ModuleTree&, const ModuleTree&) = default;

 private:
  ModuleNode root_;
};

/// Path-safe id for a child of `parent` named `name`, unique among `siblings`.
std::string child_id(const ModuleNode& parent, std::string_view name);

/// Replaces leaf `module_id` by a parent of new pending leaves, one per spec.
/// Rejects (tree unchanged) when the specs do not partition the leaf's
/// components or the leaf already sits at depth >= max_depth.
void update_tree(ModuleTree& tree, std::string_view module_id, const std::vector<SubmoduleSpec>& specs,
                 std::size_t max_depth);

}  // namespace codewiki::decompose
