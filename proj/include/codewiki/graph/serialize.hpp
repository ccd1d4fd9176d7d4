// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "codewiki/graph/types.hpp"

namespace codewiki::graph {

struct ExportOptions {
  bool include_source = true;
  bool include_misses = true;
};

/// Canonical, schema-versioned document. Keys sorted; components sorted by id.
nlohmann::json graph_to_json(const DependencyGraph& graph, const ExportOptions& options = {});
/// Throws ValidationError on schema violations, InvariantError on dangling edges.
DependencyGraph graph_from_json(const nlohmann::json& doc);

std::string export_graph(const DependencyGraph& graph, const ExportOptions& options = {});
DependencyGraph import_graph(const std::string& text);

}  // namespace codewiki::graph
