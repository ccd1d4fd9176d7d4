// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace codewiki::eval {

enum class DocNodeKind { Directory, File, Section };

/// Titles and handles only; text is fetched on demand by id.
struct DocNode {
  std::string id;  // "d0", "d1", ... in pre-order
  std::string title;
  DocNodeKind kind = DocNodeKind::Section;
  std::string path;  // corpus-relative file or directory
  std::vector<DocNode> children;
};

class DocStructure {
 public:
  std::vector<DocNode> roots;

  /// Full text behind a handle: a section with its subsections, a whole
  /// file, or the concatenation of a directory's files.
  std::optional<std::string> fetch(const std::string& id) const;
  /// Ids whose text contains every word of `query` (case-insensitive).
  std::vector<std::string> search(const std::string& query, std::size_t limit = 20) const;
  std::size_t size() const { return text_.size(); }
  bool empty() const { return roots.empty(); }

  /// {"schema_version": 1, "nodes": [{id, title, kind, children}]}: no text.
  nlohmann::json to_json() const;

 private:
  friend DocStructure parse_official_docs(const std::filesystem::path& dir);
  std::map<std::string, std::string> text_;
};

/// Markdown corpus under `dir` (hidden entries skipped, non-markdown ignored).
/// A file with a single top-level heading becomes that heading's node.
DocStructure parse_official_docs(const std::filesystem::path& dir);

}  // namespace codewiki::eval
