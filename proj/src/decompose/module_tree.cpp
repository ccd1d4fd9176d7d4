// SPDX-License-Identifier: Apache-2.0
#include "codewiki/decompose/module_tree.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::decompose {

using nlohmann::json;

std::string_view to_string(ModuleStatus s) {
  switch (s) {
    case ModuleStatus::Pending: return "pending";
    case ModuleStatus::Documented: return "documented";
    case ModuleStatus::Synthesized: return "synthesized";
  }
  return "pending";
}

ModuleStatus module_status_from_string(std::string_view s) {
  if (s == "pending") return ModuleStatus::Pending;
  if (s == "documented") return ModuleStatus::Documented;
  if (s == "synthesized") return ModuleStatus::Synthesized;
  throw ValidationError("unknown module status '" + std::string(s) + "'");
}

ModuleTree::ModuleTree() {
  root_.id = "root";
  root_.name = "root";
}

namespace {

template <class Node, class F>
bool walk(Node& n, std::size_t depth, F&& f) {
  if (f(n, depth)) return true;
  for (auto& c : n.children)
    if (walk(c, depth + 1, f)) return true;
  return false;
}

void post(const ModuleNode& n, std::vector<const ModuleNode*>& out) {
  for (const auto& c : n.children) post(c, out);
  out.push_back(&n);
}

}  // namespace

ModuleNode* ModuleTree::find(std::string_view id) {
  ModuleNode* hit = nullptr;
  walk(root_, 0, [&](ModuleNode& n, std::size_t) {
    if (n.id == id) hit = &n;
    return hit != nullptr;
  });
  return hit;
}

const ModuleNode* ModuleTree::find(std::string_view id) const { return const_cast<ModuleTree*>(this)->find(id); }

std::size_t ModuleTree::depth_of(std::string_view id) const {
  std::optional<std::size_t> d;
  walk(root_, 0, [&](const ModuleNode& n, std::size_t depth) {
    if (n.id == id) d = depth;
    return d.has_value();
  });
  if (!d) throw InvariantError("unknown module '" + std::string(id) + "'");
  return *d;
}

std::optional<std::string> ModuleTree::parent_of(std::string_view id) const {
  std::optional<std::string> p;
  walk(root_, 0, [&](const ModuleNode& n, std::size_t) {
    for (const auto& c : n.children)
      if (c.id == id) p = n.id;
    return p.has_value();
  });
  return p;
}

std::vector<const ModuleNode*> ModuleTree::nodes() const {
  std::vector<const ModuleNode*> out;
  walk(root_, 0, [&](const ModuleNode& n, std::size_t) {
    out.push_back(&n);
    return false;
  });
  return out;
}

std::vector<const ModuleNode*> ModuleTree::leaves() const {
  std::vector<const ModuleNode*> out;
  for (const auto* n : nodes())
    if (n->is_leaf() && !n->component_ids.empty()) out.push_back(n);
  return out;
}

std::vector<const ModuleNode*> ModuleTree::post_order() const {
  std::vector<const ModuleNode*> out;
  post(root_, out);
  return out;
}

std::vector<std::string> ModuleTree::all_components() const {
  std::vector<std::string> out;
  for (const auto* n : leaves()) out.insert(out.end(), n->component_ids.begin(), n->component_ids.end());
  std::sort(out.begin(), out.end());
  return out;
}

void ModuleTree::validate(std::size_t max_depth) const {
  std::set<std::string> ids;
  std::set<std::string> comps;
  const bool empty_root = root_.children.empty() && root_.component_ids.empty();
  walk(root_, 0, [&](const ModuleNode& n, std::size_t depth) {
    if (!ids.insert(n.id).second) throw InvariantError("duplicate module id '" + n.id + "'");
    if (depth > 1 + max_depth) throw InvariantError("module '" + n.id + "' exceeds the depth limit");
    if (&n == &root_ && empty_root) return false;
    if (n.is_leaf() == n.component_ids.empty())
      throw InvariantError("module '" + n.id + "': leaf must own components and internal nodes none");
    if (!std::is_sorted(n.component_ids.begin(), n.component_ids.end()))
      throw InvariantError("module '" + n.id + "': component ids not sorted");
    for (const auto& c : n.component_ids)
      if (!comps.insert(c).second) throw InvariantError("component '" + c + "' owned by more than one leaf");
    for (const auto& c : n.children)
      if (!starts_with(c.id, n.id + "/")) throw InvariantError("module '" + c.id + "' is not under '" + n.id + "'");
    return false;
  });
}

namespace {

json node_to_json(const ModuleNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  json j = {{"id", n.id},
            {"name", n.name},
            {"status", std::string(to_string(n.status))},
            {"component_ids", n.component_ids},
            {"children", std::move(children)}};
  if (n.oversized) j["oversized"] = true;
  return j;
}

ModuleNode node_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("module tree: node must be an object");
  ModuleNode n;
  try {
    n.id = j.at("id").get<std::string>();
    n.name = j.value("name", n.id);
    n.status = module_status_from_string(j.value("status", std::string("pending")));
    n.component_ids = j.value("component_ids", std::vector<std::string>{});
    n.oversized = j.value("oversized", false);
    for (const auto& c : j.value("children", json::array())) n.children.push_back(node_from_json(c));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("module tree: ") + e.what());
  }
  std::sort(n.component_ids.begin(), n.component_ids.end());
  return n;
}

}  // namespace

json ModuleTree::to_json() const { return {{"schema_version", 1}, {"root", node_to_json(root_)}}; }

ModuleTree ModuleTree::from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("root")) throw ValidationError("module tree: missing 'root'");
  if (doc.contains("schema_version") && doc.at("schema_version") != 1)
    throw ValidationError("module tree: unsupported schema_version");
  ModuleTree t;
  t.root_ = node_from_json(doc.at("root"));
  return t;
}

std::string child_id(const ModuleNode& parent, std::string_view name) {
  std::string base = parent.id + "/" + slugify(name, true);
  std::string id = base;
  for (int k = 2;; ++k) {
    bool clash = std::any_of(parent.children.begin(), parent.children.end(),
                             [&](const ModuleNode& c) { return c.id == id; });
    if (!clash) return id;
    id = base + "-" + std::to_string(k);
  }
}

void update_tree(ModuleTree& tree, std::string_view module_id, const std::vector<SubmoduleSpec>& specs,
                 std::size_t max_depth) {
  ModuleNode* node = tree.find(module_id);
  if (!node) throw ValidationError("update_tree: unknown module '" + std::string(module_id) + "'");
  if (!node->is_leaf() || node->component_ids.empty())
    throw ValidationError("update_tree: module '" + node->id + "' is not a leaf");
  if (tree.depth_of(module_id) >= max_depth)
    throw ValidationError("update_tree: module '" + node->id + "' is at the delegation depth limit (" +
                          std::to_string(max_depth) + ")");
  if (specs.empty()) throw ValidationError("update_tree: no submodules given");
  std::vector<std::string> seen;
  for (const auto& s : specs) {
    if (s.component_ids.empty()) throw ValidationError("update_tree: submodule '" + s.name + "' is empty");
    seen.insert(seen.end(), s.component_ids.begin(), s.component_ids.end());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ValidationError("update_tree: a component appears in more than one submodule");
  if (seen != node->component_ids)
    throw ValidationError("update_tree: submodules do not cover exactly the components of '" + node->id + "'");

  std::vector<ModuleNode> children;
  ModuleNode scratch;
  scratch.id = node->id;
  for (const auto& s : specs) {
    ModuleNode c;
    c.name = s.name.empty() ? "module" : s.name;
    c.id = child_id(scratch, c.name);
    c.component_ids = s.component_ids;
    std::sort(c.component_ids.begin(), c.component_ids.end());
    scratch.children.push_back(c);
    children.push_back(std::move(c));
  }
  node->children = std::move(children);
  node->component_ids.clear();
  node->status = ModuleStatus::Pending;
  node->oversized = false;
}

}  // namespace codewiki::decompose
