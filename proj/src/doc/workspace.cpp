// SPDX-License-Identifier: Apache-2.0
#include "codewiki/doc/workspace.hpp"

#include <set>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::doc {

namespace fs = std::filesystem;

std::string doc_path(const std::string& module_id) {
  if (module_id == "root") return "index.md";
  if (!starts_with(module_id, "root/")) throw InvariantError("module id outside the tree: " + module_id);
  return module_id.substr(5) + ".md";
}

std::string relative_link(const std::string& from_doc, const std::string& to_doc, const std::string& anchor) {
  fs::path base = fs::path(from_doc).parent_path();
  std::string rel = fs::path(to_doc).lexically_relative(base.empty() ? fs::path(".") : base).generic_string();
  if (rel.empty() || rel == ".") rel = fs::path(to_doc).filename().generic_string();
  if (from_doc == to_doc) rel.clear();
  if (!anchor.empty()) rel += "#" + anchor;
  return rel;
}

DocWorkspace::DocWorkspace(fs::path root) : root_(std::move(root)) {}

fs::path DocWorkspace::resolve(const std::string& relative) const {
  if (relative.empty()) throw ValidationError("empty document path");
  fs::path p(relative);
  if (p.is_absolute() || p.has_root_name() || p.has_root_directory())
    throw ValidationError("document path must be relative: " + relative);
  for (const auto& part : p)
    if (part == "..") throw ValidationError("document path escapes the workspace: " + relative);
  fs::path normal = p.lexically_normal();
  if (normal.empty() || *normal.begin() == ".." || normal == ".")
    throw ValidationError("document path escapes the workspace: " + relative);
  return root_ / normal;
}

void DocWorkspace::write(const std::string& module_id, const std::string& markdown) {
  const std::string rel = doc_path(module_id);
  std::lock_guard lock(mu_);
  write_file(resolve(rel), markdown);
  log_.push_back({log_.size(), module_id, rel});
  docs_[module_id] = markdown;
}

std::optional<std::string> DocWorkspace::read(const std::string& module_id) const {
  std::lock_guard lock(mu_);
  auto it = docs_.find(module_id);
  if (it == docs_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> DocWorkspace::read_path(const std::string& relative) const {
  fs::path p = resolve(relative);
  std::lock_guard lock(mu_);
  for (const auto& [id, text] : docs_)
    if (doc_path(id) == fs::path(relative).lexically_normal().generic_string()) return text;
  if (fs::is_regular_file(p)) return read_file(p);
  return std::nullopt;
}

bool DocWorkspace::has(const std::string& module_id) const {
  std::lock_guard lock(mu_);
  return docs_.count(module_id) > 0;
}

std::vector<WriteLogEntry> DocWorkspace::write_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

void DocWorkspace::restore_log(std::vector<WriteLogEntry> log) {
  std::lock_guard lock(mu_);
  log_ = std::move(log);
  docs_.clear();
  for (const auto& e : log_) {
    fs::path p = root_ / e.path;
    if (!fs::is_regular_file(p)) throw IoError("resume: logged document missing: " + p.string());
    docs_[e.module_id] = read_file(p);
  }
}

std::map<std::string, std::string> DocWorkspace::documents() const {
  std::lock_guard lock(mu_);
  return docs_;
}

ReferenceRegistry::ReferenceRegistry(const graph::DependencyGraph& graph) {
  std::set<std::string> used;
  for (const auto& [id, c] : graph.components()) {
    std::string base = slugify(id, true);
    std::string a = base;
    for (int k = 1; used.count(a); ++k) a = base + "-" + std::to_string(k);
    used.insert(a);
    anchors_[id] = a;
  }
}

const std::string& ReferenceRegistry::anchor(const std::string& component_id) const {
  auto it = anchors_.find(component_id);
  if (it == anchors_.end()) throw InvariantError("unknown component " + component_id);
  return it->second;
}

void ReferenceRegistry::register_component(const std::string& component_id, const std::string& module_id) {
  const std::string& a = anchor(component_id);
  std::lock_guard lock(mu_);
  auto it = entries_.find(component_id);
  if (it != entries_.end()) {
    if (it->second.module_id != module_id)
      throw InvariantError("component " + component_id + " already documented in " + it->second.module_id);
    return;
  }
  entries_[component_id] = {module_id, a};
}

std::optional<RegistryEntry> ReferenceRegistry::lookup(const std::string& component_id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(component_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> resolve_reference(const std::string& component_id, const ReferenceRegistry& registry,
                                             const std::string& from_module) {
  auto e = registry.lookup(component_id);
  if (!e) return std::nullopt;
  return relative_link(doc_path(from_module), doc_path(e->module_id), e->anchor);
}

}  // namespace codewiki::doc
