// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/types.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::graph {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Python: return "python";
    case Language::Java: return "java";
    case Language::JavaScript: return "javascript";
    case Language::TypeScript: return "typescript";
    case Language::C: return "c";
    case Language::Cpp: return "cpp";
    case Language::CSharp: return "csharp";
  }
  return "unknown";
}

std::optional<Language> language_from_name(std::string_view name) {
  auto n = to_lower(name);
  if (n == "python" || n == "py") return Language::Python;
  if (n == "java") return Language::Java;
  if (n == "javascript" || n == "js") return Language::JavaScript;
  if (n == "typescript" || n == "ts") return Language::TypeScript;
  if (n == "c") return Language::C;
  if (n == "cpp" || n == "c++" || n == "cxx") return Language::Cpp;
  if (n == "csharp" || n == "c#" || n == "cs") return Language::CSharp;
  return std::nullopt;
}

std::optional<Language> language_from_path(std::string_view path) {
  auto dot = path.rfind('.');
  auto slash = path.rfind('/');
  if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) return std::nullopt;
  auto ext = to_lower(path.substr(dot));
  if (ext == ".py" || ext == ".pyi") return Language::Python;
  if (ext == ".java") return Language::Java;
  if (ext == ".js" || ext == ".jsx" || ext == ".mjs" || ext == ".cjs") return Language::JavaScript;
  if (ext == ".ts" || ext == ".tsx" || ext == ".mts" || ext == ".cts") return Language::TypeScript;
  if (ext == ".c" || ext == ".h") return Language::C;
  if (ext == ".cpp" || ext == ".cc" || ext == ".cxx" || ext == ".hpp" || ext == ".hh" || ext == ".hxx" ||
      ext == ".ipp" || ext == ".inl")
    return Language::Cpp;
  if (ext == ".cs") return Language::CSharp;
  return std::nullopt;
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Function: return "function";
    case ComponentKind::Method: return "method";
    case ComponentKind::Class: return "class";
    case ComponentKind::Struct: return "struct";
    case ComponentKind::Module: return "module";
    case ComponentKind::Interface: return "interface";
  }
  return "function";
}

ComponentKind component_kind_from_string(std::string_view s) {
  if (s == "function") return ComponentKind::Function;
  if (s == "method") return ComponentKind::Method;
  if (s == "class") return ComponentKind::Class;
  if (s == "struct") return ComponentKind::Struct;
  if (s == "module") return ComponentKind::Module;
  if (s == "interface") return ComponentKind::Interface;
  throw ValidationError("unknown component kind '" + std::string(s) + "'");
}

std::string_view to_string(RawKind kind) {
  switch (kind) {
    case RawKind::Call: return "call";
    case RawKind::Inheritance: return "inheritance";
    case RawKind::AttributeAccess: return "attribute_access";
    case RawKind::Import: return "import";
  }
  return "call";
}

RawKind raw_kind_from_string(std::string_view s) {
  if (s == "call") return RawKind::Call;
  if (s == "inheritance") return RawKind::Inheritance;
  if (s == "attribute_access") return RawKind::AttributeAccess;
  if (s == "import") return RawKind::Import;
  throw ValidationError("unknown edge kind '" + std::string(s) + "'");
}

const CodeComponent* DependencyGraph::find(std::string_view id) const {
  auto it = components_.find(std::string(id));
  return it == components_.end() ? nullptr : &it->second;
}

std::vector<std::string> DependencyGraph::successors(std::string_view id) const {
  auto it = out_.find(id);
  return it == out_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> DependencyGraph::predecessors(std::string_view id) const {
  auto it = in_.find(id);
  return it == in_.end() ? std::vector<std::string>{} : it->second;
}

void DependencyGraph::index_adjacency() {
  out_.clear();
  in_.clear();
  for (const auto& e : edges_) {
    out_[e.from].push_back(e.to);
    in_[e.to].push_back(e.from);
  }
  for (auto& [_, v] : out_) std::sort(v.begin(), v.end());
  for (auto& [_, v] : in_) std::sort(v.begin(), v.end());
}

DependencyGraph build_graph(std::vector<CodeComponent> components, std::vector<DependencyEdge> edges,
                            std::vector<ReferenceMiss> misses) {
  DependencyGraph g;
  for (auto& c : components) {
    if (c.span.start_line > c.span.end_line)
      throw InvariantError("component " + c.id + " has an inverted span");
    auto id = c.id;
    if (!g.components_.emplace(id, std::move(c)).second)
      throw InvariantError("duplicate component id " + id);
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& e : edges) {
    if (!g.components_.count(e.from) || !g.components_.count(e.to))
      throw InvariantError("dangling edge " + e.from + " -> " + e.to);
    if (e.from == e.to) continue;
    if (!seen.emplace(e.from, e.to).second) continue;
    g.edges_.push_back(std::move(e));
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const DependencyEdge& a, const DependencyEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  std::sort(misses.begin(), misses.end(), [](const ReferenceMiss& a, const ReferenceMiss& b) {
    return std::tie(a.from, a.target, a.raw_kind) < std::tie(b.from, b.target, b.raw_kind);
  });
  misses.erase(std::unique(misses.begin(), misses.end()), misses.end());
  g.misses_ = std::move(misses);
  g.index_adjacency();
  return g;
}

}  // namespace codewiki::graph
