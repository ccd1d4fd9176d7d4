// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "codewiki/graph/types.hpp"

namespace codewiki::graph {

/// Condensation of a dependency graph: one node per strongly connected component.
struct CondensedGraph {
  /// members[k] is sorted; nodes are ordered by their smallest member id.
  std::vector<std::vector<std::string>> members;
  /// Sorted, deduplicated successor lists over node indices.
  std::vector<std::vector<std::size_t>> successors;
  std::map<std::string, std::size_t> node_of;

  std::size_t size() const { return members.size(); }
  std::vector<std::size_t> in_degrees() const;
  /// Node indices ordered so that every edge goes from an earlier to a later node.
  std::vector<std::size_t> topological_order() const;
};

CondensedGraph condense_cycles(const DependencyGraph& graph);

}  // namespace codewiki::graph
