// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "codewiki/decompose/module_tree.hpp"
#include "codewiki/graph/condense.hpp"
#include "codewiki/graph/types.hpp"

namespace codewiki::decompose {

inline constexpr std::size_t kDefaultBudget = 32768;
inline constexpr std::size_t kDefaultMaxDepth = 3;

struct EntryPointSet {
  std::vector<std::size_t> scc_nodes;       // zero in-degree nodes of the condensed DAG
  std::vector<std::string> component_ids;   // their members, sorted
};

EntryPointSet find_entry_points(const graph::CondensedGraph& dag);

/// Sum of token counts. Throws InvariantError on an unknown id.
std::size_t estimate_tokens(const std::vector<std::string>& component_ids, const graph::DependencyGraph& graph);

/// What a partitioner sees: ids, sizes and topology. Never source text.
struct PartitionInput {
  std::string module_id;
  std::vector<std::string> component_ids;  // sorted
  std::map<std::string, std::size_t> token_counts;
  std::vector<std::pair<std::string, std::string>> edges;  // both ends inside component_ids
  std::vector<std::string> entry_points;                   // subset of component_ids
  std::size_t capacity = kDefaultBudget;
};

class Partitioner {
 public:
  virtual ~Partitioner() = default;
  /// Groups covering component_ids exactly once.
  virtual std::vector<SubmoduleSpec> partition(const PartitionInput& input) = 0;
};

/// Connected components, then greedy agglomeration (heaviest edge bundle
/// first) under the capacity, then first-fit-decreasing packing of the
/// resulting clusters. Names are module_<k>.
class GreedyPartitioner final : public Partitioner {
 public:
  std::vector<SubmoduleSpec> partition(const PartitionInput& input) override;
};

/// Throws ValidationError unless `groups` is a usable split of `input`.
void validate_partition(const PartitionInput& input, const std::vector<SubmoduleSpec>& groups);

struct DecomposeOptions {
  std::size_t budget = kDefaultBudget;
  std::size_t max_depth = kDefaultMaxDepth;
  std::size_t max_children = 8;  // fan-out before another level is introduced
};

struct DecomposeDiagnostics {
  std::vector<std::string> fallbacks;  // module ids where the primary partitioner was rejected
};

/// Builds the initial module tree. `primary` may be null; on any failure
/// the deterministic partitioner is used for that module.
ModuleTree decompose(const graph::DependencyGraph& graph, const EntryPointSet& entry_points,
                     const DecomposeOptions& options = {}, Partitioner* primary = nullptr,
                     DecomposeDiagnostics* diagnostics = nullptr);

}  // namespace codewiki::decompose
