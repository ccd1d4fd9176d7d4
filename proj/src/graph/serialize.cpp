// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/serialize.hpp"

#include "codewiki/core/error.hpp"

namespace codewiki::graph {

using nlohmann::json;

json graph_to_json(const DependencyGraph& graph, const ExportOptions& options) {
  json comps = json::array();
  for (const auto& [id, c] : graph.components()) {
    json j = {{"id", c.id},
              {"kind", std::string(to_string(c.kind))},
              {"name", c.name},
              {"file", c.file},
              {"span", {c.span.start_line, c.span.end_line}},
              {"token_count", c.token_count}};
    if (options.include_source) j["source"] = c.source;
    comps.push_back(std::move(j));
  }
  json edges = json::array();
  for (const auto& e : graph.edges())
    edges.push_back({{"from", e.from}, {"to", e.to}, {"raw_kind", std::string(to_string(e.raw_kind))},
                     {"relation", "depends_on"}});
  json doc = {{"schema_version", 1}, {"components", std::move(comps)}, {"edges", std::move(edges)}};
  if (options.include_misses) {
    json misses = json::array();
    for (const auto& m : graph.misses())
      misses.push_back({{"from", m.from}, {"target", m.target}, {"raw_kind", std::string(to_string(m.raw_kind))}});
    doc["misses"] = std::move(misses);
  }
  return doc;
}

namespace {

const json& field(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError(std::string(where) + ": missing field '" + key + "'");
  return obj.at(key);
}

std::string str(const json& obj, const char* key, const char* where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) throw ValidationError(std::string(where) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

DependencyGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("graph: document must be an object");
  if (doc.contains("schema_version") && doc.at("schema_version") != 1)
    throw ValidationError("graph: unsupported schema_version");
  const auto& jc = field(doc, "components", "graph");
  const auto& je = field(doc, "edges", "graph");
  if (!jc.is_array() || !je.is_array()) throw ValidationError("graph: components and edges must be arrays");
  std::vector<CodeComponent> comps;
  for (const auto& j : jc) {
    CodeComponent c;
    c.id = str(j, "id", "component");
    try {
      c.kind = component_kind_from_string(str(j, "kind", "component"));
    } catch (const Error& e) {
      throw ValidationError(std::string("component ") + c.id + ": " + e.what());
    }
    c.name = str(j, "name", "component");
    c.file = str(j, "file", "component");
    const auto& span = field(j, "span", "component");
    if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() || !span[1].is_number_unsigned())
      throw ValidationError("component " + c.id + ": span must be [start, end]");
    c.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    const auto& tc = field(j, "token_count", "component");
    if (!tc.is_number_unsigned()) throw ValidationError("component " + c.id + ": token_count must be >= 0");
    c.token_count = tc.get<std::size_t>();
    if (j.contains("source")) c.source = str(j, "source", "component");
    comps.push_back(std::move(c));
  }
  std::vector<DependencyEdge> edges;
  for (const auto& j : je) {
    DependencyEdge e;
    e.from = str(j, "from", "edge");
    e.to = str(j, "to", "edge");
    try {
      e.raw_kind = raw_kind_from_string(str(j, "raw_kind", "edge"));
    } catch (const Error& err) {
      throw ValidationError(std::string("edge: ") + err.what());
    }
    edges.push_back(std::move(e));
  }
  std::vector<ReferenceMiss> misses;
  if (doc.contains("misses")) {
    for (const auto& j : doc.at("misses")) {
      ReferenceMiss m;
      m.from = str(j, "from", "miss");
      m.target = str(j, "target", "miss");
      m.raw_kind = raw_kind_from_string(str(j, "raw_kind", "miss"));
      misses.push_back(std::move(m));
    }
  }
  return build_graph(std::move(comps), std::move(edges), std::move(misses));
}

std::string export_graph(const DependencyGraph& graph, const ExportOptions& options) {
  return graph_to_json(graph, options).dump(2) + "\n";
}

DependencyGraph import_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("graph: invalid JSON: ") + e.what());
  }
  return graph_from_json(doc);
}

}  // namespace codewiki::graph
