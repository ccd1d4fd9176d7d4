// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace codewiki::graph {

enum class Language { Python, Java, JavaScript, TypeScript, C, Cpp, CSharp };

std::string_view to_string(Language lang);
std::optional<Language> language_from_name(std::string_view name);
/// Language implied by a file extension (".py", ".hpp", ...), if recognized.
std::optional<Language> language_from_path(std::string_view path);

struct SourceUnit {
  std::string path;  // repository-relative, '/' separated
  Language language;
  std::string content;
};

enum class ComponentKind { Function, Method, Class, Struct, Module, Interface };

std::string_view to_string(ComponentKind kind);
ComponentKind component_kind_from_string(std::string_view s);

struct Span {
  std::size_t start_line = 0;  // 1-based, inclusive
  std::size_t end_line = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct CodeComponent {
  std::string id;  // file::scope::name
  ComponentKind kind = ComponentKind::Function;
  std::string name;
  std::string file;
  Span span;
  std::string source;
  std::size_t token_count = 0;

  friend bool operator==(const CodeComponent&, const CodeComponent&) = default;
};

enum class RawKind { Call, Inheritance, AttributeAccess, Import };

std::string_view to_string(RawKind kind);
RawKind raw_kind_from_string(std::string_view s);

/// Edge (from -> to) means `from` depends_on `to`.
struct DependencyEdge {
  std::string from;
  std::string to;
  RawKind raw_kind = RawKind::Call;

  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

/// A reference that did not resolve to any component (external symbol,
/// dynamic receiver, builtin). Recorded instead of guessed.
struct ReferenceMiss {
  std::string from;
  std::string target;  // textual reference as written, e.g. "requests.get"
  RawKind raw_kind = RawKind::Call;

  friend bool operator==(const ReferenceMiss&, const ReferenceMiss&) = default;
};

/// Directed graph G = (V, E) under the depends_on relation.
///
/// Immutable once built: construct through build_graph() or from_json().
class DependencyGraph {
 public:
  DependencyGraph() = default;

  const std::map<std::string, CodeComponent>& components() const { return components_; }
  /// Sorted by (from, to); no self-loops, no duplicate pairs.
  const std::vector<DependencyEdge>& edges() const { return edges_; }
  const std::vector<ReferenceMiss>& misses() const { return misses_; }

  const CodeComponent* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  /// Target ids of edges leaving `id`, sorted.
  std::vector<std::string> successors(std::string_view id) const;
  /// Source ids of edges entering `id`, sorted.
  std::vector<std::string> predecessors(std::string_view id) const;

  std::size_t size() const { return components_.size(); }

  friend bool operator==(const DependencyGraph&, const DependencyGraph&) = default;

 private:
  friend DependencyGraph build_graph(std::vector<CodeComponent>, std::vector<DependencyEdge>,
                                     std::vector<ReferenceMiss>);
  void index_adjacency();

  std::map<std::string, CodeComponent> components_;
  std::vector<DependencyEdge> edges_;
  std::vector<ReferenceMiss> misses_;
  std::map<std::string, std::vector<std::string>, std::less<>> out_;
  std::map<std::string, std::vector<std::string>, std::less<>> in_;
};

/// Drops self-loops, collapses duplicate (from, to) pairs keeping the first
/// raw_kind seen. Throws InvariantError on a dangling endpoint or duplicate id.
DependencyGraph build_graph(std::vector<CodeComponent> components, std::vector<DependencyEdge> edges,
                            std::vector<ReferenceMiss> misses = {});

}  // namespace codewiki::graph
