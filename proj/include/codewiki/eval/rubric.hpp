// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace codewiki::eval {

/// Weighted rubric item. Leaves carry a requirement and no children.
struct RubricNode {
  std::string name;
  double weight = 1.0;
  std::optional<std::string> requirement;
  std::vector<RubricNode> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const RubricNode&, const RubricNode&) = default;
};

/// Throws ValidationError on: empty name, weight not finite and positive,
/// leaf without requirement, internal node with one.
void validate_rubric(const RubricNode& root);

/// Accepts a bare node or one carrying "schema_version": 1. Validates.
RubricNode rubric_from_json(const nlohmann::json& j);
/// Root carries "schema_version": 1.
nlohmann::json rubric_to_json(const RubricNode& root);
RubricNode load_rubric(const std::string& path);

/// Paths are "root", "root/0", "root/0/2" (child indices).
struct RubricLeaf {
  std::string path;
  const RubricNode* node;
};
std::vector<RubricLeaf> rubric_leaves(const RubricNode& root);

std::size_t rubric_depth(const RubricNode& root);  // root only = 1
std::size_t rubric_size(const RubricNode& root);   // every node

}  // namespace codewiki::eval
