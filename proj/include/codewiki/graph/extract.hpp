// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codewiki/graph/tokenizer.hpp"
#include "codewiki/graph/types.hpp"

namespace codewiki::graph {

/// A dependency candidate as written in source, before name resolution.
struct RawReference {
  std::string receiver;  // "" for unqualified; "self"/"this"; dotted chain "os.path"; "<expr>" if complex
  std::string name;
  RawKind kind = RawKind::Call;
  std::string module;  // Import refs only: module spec the name comes from

  std::string display() const;
};

/// Name imported into a file (or a function body).
struct ImportBinding {
  std::string alias;   // local name
  std::string module;  // module spec as written ("./util", "pkg.mod", "com.x.Foo")
  std::string symbol;  // imported symbol; empty when the alias names a module
  bool is_default = false;  // JS/TS default import
};

struct ParsedComponent {
  CodeComponent component;
  std::vector<std::string> scope;  // enclosing qualifiers (namespaces, classes, functions)
  std::optional<std::size_t> parent;  // index of the enclosing component in the unit
  bool is_type = false;               // class/struct/interface
  bool in_function = false;           // nested somewhere inside a function body
  std::vector<RawReference> references;  // from the component's own tokens
  std::vector<RawReference> bases;       // inheritance clause
  std::vector<ImportBinding> local_imports;
};

struct ParsedUnit {
  std::string path;
  Language language = Language::Python;
  std::vector<ParsedComponent> components;  // in source order
  std::vector<ImportBinding> imports;       // file-level
  std::optional<std::string> default_export;
};

/// Parses one unit. Throws ParseError when the text cannot be structured
/// (unbalanced braces, unterminated literals).
ParsedUnit parse_unit(const SourceUnit& unit, const Tokenizer& tokenizer = default_tokenizer());

struct Diagnostic {
  std::string path;
  std::string message;
};

struct ExtractResult {
  std::vector<CodeComponent> components;
  std::vector<Diagnostic> diagnostics;  // non-empty iff the unit was skipped
};

/// One component per named definition. Parse failures yield an empty list
/// plus a diagnostic instead of throwing.
ExtractResult extract_components(const SourceUnit& unit, const Tokenizer& tokenizer = default_tokenizer());

/// Repository-wide lookup structure used for cross-file name resolution.
class ComponentIndex {
 public:
  explicit ComponentIndex(const std::vector<ParsedUnit>& units);

  struct Entry {
    const ParsedUnit* unit;
    const ParsedComponent* parsed;
  };

  const Entry* find(std::string_view id) const;
  /// Components of `file` whose scope has no enclosing class or function.
  std::vector<const Entry*> top_level(std::string_view file, std::string_view name) const;
  /// Members (methods, nested types) declared directly inside class `class_id`,
  /// plus out-of-line C++ definitions qualified by the class name.
  std::vector<const Entry*> members(std::string_view class_id, std::string_view name) const;
  /// Globally visible (not nested in class/function) components by name.
  std::vector<const Entry*> global(std::string_view name, Language lang) const;
  /// Components named `name` whose innermost qualifier is `qualifier`.
  std::vector<const Entry*> qualified(std::string_view qualifier, std::string_view name) const;
  const ParsedUnit* unit(std::string_view path) const;
  bool has_file(std::string_view path) const { return unit(path) != nullptr; }

 private:
  std::map<std::string, Entry, std::less<>> by_id_;
  std::map<std::string, const ParsedUnit*, std::less<>> units_;
  std::map<std::string, std::vector<const Entry*>, std::less<>> top_level_;   // file + '\0' + name
  std::map<std::string, std::vector<const Entry*>, std::less<>> members_;     // class id + '\0' + name
  std::map<std::string, std::vector<const Entry*>, std::less<>> by_qualifier_;  // qualifier + '\0' + name
  std::map<std::string, std::vector<const Entry*>, std::less<>> global_;      // name
};

struct RelationResult {
  std::vector<DependencyEdge> edges;
  std::vector<ReferenceMiss> misses;
};

/// Resolves the references of every component in `unit` against `index`.
/// Unresolved targets become misses, never edges.
RelationResult extract_relations(const ParsedUnit& unit, const ComponentIndex& index);

struct AnalysisResult {
  DependencyGraph graph;
  std::vector<Diagnostic> diagnostics;
};

/// Parse (in parallel) + index + resolve + build_graph.
AnalysisResult analyze_units(const std::vector<SourceUnit>& units, const Tokenizer& tokenizer = default_tokenizer(),
                             unsigned threads = 0);

}  // namespace codewiki::graph
