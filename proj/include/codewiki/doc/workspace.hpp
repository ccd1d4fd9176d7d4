// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "codewiki/graph/types.hpp"

namespace codewiki::doc {

/// Workspace-relative markdown path for a module: "root" -> "index.md",
/// "root/a/b" -> "a/b.md".
std::string doc_path(const std::string& module_id);

/// Relative link target from the document at `from_doc` to `to_doc`
/// (both workspace-relative), with an optional "#anchor".
std::string relative_link(const std::string& from_doc, const std::string& to_doc, const std::string& anchor = {});

struct WriteLogEntry {
  std::size_t seq = 0;
  std::string module_id;
  std::string path;
};

/// Markdown documents on disk under one root. Writes are serialized.
class DocWorkspace {
 public:
  explicit DocWorkspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Maps a workspace-relative path to disk. Rejects absolute paths, "..",
  /// and anything outside the root with ValidationError.
  std::filesystem::path resolve(const std::string& relative) const;

  void write(const std::string& module_id, const std::string& markdown);
  std::optional<std::string> read(const std::string& module_id) const;
  std::optional<std::string> read_path(const std::string& relative) const;
  bool has(const std::string& module_id) const;

  std::vector<WriteLogEntry> write_log() const;
  /// Restores state after a resume.
  void restore_log(std::vector<WriteLogEntry> log);
  /// module id -> markdown, for every logged module.
  std::map<std::string, std::string> documents() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::vector<WriteLogEntry> log_;
  std::map<std::string, std::string> docs_;
};

struct RegistryEntry {
  std::string module_id;
  std::string anchor;
};

/// Component id -> where it is documented. Anchors are precomputed for
/// every component so links are stable before registration.
class ReferenceRegistry {
 public:
  ReferenceRegistry() = default;
  explicit ReferenceRegistry(const graph::DependencyGraph& graph);

  /// Slug anchor for a component id; unique across the graph.
  const std::string& anchor(const std::string& component_id) const;
  bool knows(const std::string& component_id) const { return anchors_.count(component_id) > 0; }

  /// Throws InvariantError if already registered to another module.
  void register_component(const std::string& component_id, const std::string& module_id);
  std::optional<RegistryEntry> lookup(const std::string& component_id) const;
  const std::map<std::string, RegistryEntry>& entries() const { return entries_; }
  const std::map<std::string, std::string>& anchors() const { return anchors_; }

 private:
  std::map<std::string, std::string> anchors_;
  std::map<std::string, RegistryEntry> entries_;
  mutable std::mutex mu_;
};

/// Markdown link from the document of `from_module` to a registered component;
/// nullopt is the miss sentinel.
std::optional<std::string> resolve_reference(const std::string& component_id, const ReferenceRegistry& registry,
                                             const std::string& from_module);

}  // namespace codewiki::doc
