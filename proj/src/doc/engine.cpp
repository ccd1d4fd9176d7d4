// SPDX-License-Identifier: Apache-2.0
#include "codewiki/doc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>

#include "codewiki/core/text.hpp"

namespace codewiki::doc {

using decompose::ModuleNode;
using decompose::ModuleStatus;
using nlohmann::json;

namespace {

const std::vector<std::pair<DelegationReason, std::string_view>> kReasons = {
    {DelegationReason::Complexity, "complexity"},
    {DelegationReason::SemanticDiversity, "semantic_diversity"},
    {DelegationReason::ContextOverflow, "context_overflow"},
};

std::string fence_lang(const std::string& file) {
  auto lang = graph::language_from_path(file);
  return lang ? std::string(graph::to_string(*lang)) : std::string();
}

json object_schema(json properties, std::vector<std::string> required) {
  return json{{"type", "object"}, {"properties", std::move(properties)}, {"required", std::move(required)}};
}

std::string str_arg(const json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_string()) throw ValidationError(std::string("missing string argument '") + key + "'");
  return args[key].get<std::string>();
}

std::string ensure_title(std::string md, const std::string& title) {
  for (const auto& [level, text] : headings(md))
    if (level == 1) return md;
  return "# " + title + "\n\n" + md;
}

std::string end_with_newline(std::string md) {
  while (!md.empty() && (md.back() == '\n' || md.back() == ' ')) md.pop_back();
  md += '\n';
  return md;
}

bool has_heading(const std::string& md, std::initializer_list<const char*> words) {
  for (const auto& [level, text] : headings(md)) {
    std::string t = to_lower(text);
    for (const char* w : words)
      if (t.find(w) != std::string::npos) return true;
  }
  return false;
}

bool has_diagram(const std::string& md) {
  for (const auto& lang : fence_languages(md))
    if (lang == "mermaid" || lang == "plantuml" || lang == "dot" || lang == "graphviz" || lang == "diagram" ||
        lang == "ditaa")
      return true;
  return false;
}

std::string fs_normal(const std::string& p) { return std::filesystem::path(p).lexically_normal().generic_string(); }

std::string mermaid_id(std::size_t k) { return "m" + std::to_string(k); }

std::string mermaid_label(const std::string& s) {
  std::string out = s;
  replace_all(out, "\"", "'");
  return out;
}

}  // namespace

std::string_view to_string(DelegationReason r) {
  for (const auto& [k, v] : kReasons)
    if (k == r) return v;
  return "complexity";
}

std::optional<DelegationReason> delegation_reason_from_string(std::string_view s) {
  for (const auto& [k, v] : kReasons)
    if (v == s) return k;
  return std::nullopt;
}

DocEngine::DocEngine(const graph::DependencyGraph& graph, decompose::ModuleTree tree, DocWorkspace& workspace,
                     agent::ChatBackend& backend, agent::ModelConfig model, EngineOptions options)
    : graph_(graph),
      tree_(std::move(tree)),
      ws_(workspace),
      backend_(backend),
      model_(std::move(model)),
      opt_(std::move(options)),
      registry_(graph) {
  for (const auto& [id, a] : registry_.anchors()) anchor_owner_[a] = id;
  for (const auto& id : tree_.all_components())
    if (!graph_.contains(id)) throw InvariantError("module tree names unknown component " + id);
}

void DocEngine::record(std::string module_id, std::string kind, std::string detail) {
  events_.push_back({std::move(module_id), std::move(kind), std::move(detail)});
}

void DocEngine::restore(std::set<std::string> delegated, std::vector<EngineEvent> events) {
  delegated_ = std::move(delegated);
  events_ = std::move(events);
  for (const ModuleNode* n : tree_.leaves())
    if (n->status == ModuleStatus::Documented)
      for (const auto& c : n->component_ids) registry_.register_component(c, n->id);
}

void DocEngine::emit_transcript(const agent::AgentResult& r, const std::string& role, const std::string& module_id) {
  if (on_transcript) on_transcript(r.transcript.to_jsonl(role + ":" + module_id));
}

// ------------------------------------------------------------------ prompts

std::string DocEngine::tree_outline() const {
  std::ostringstream os;
  std::function<void(const ModuleNode&, int)> walk = [&](const ModuleNode& n, int depth) {
    os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "- " << n.name << " (" << n.id << ", "
       << decompose::to_string(n.status);
    if (n.is_leaf()) os << ", " << n.component_ids.size() << " components";
    os << ")\n";
    for (const auto& c : n.children) walk(c, depth + 1);
  };
  walk(tree_.root(), 0);
  return os.str();
}

std::map<std::string, std::string> DocEngine::leaf_vars(const ModuleNode& node) const {
  std::ostringstream sections, refs, ids;
  std::set<std::string> own(node.component_ids.begin(), node.component_ids.end());
  std::set<std::string> external;
  std::set<std::string> files;
  for (const auto& id : node.component_ids) {
    const auto* c = graph_.find(id);
    files.insert(c->file);
    sections << "<a id=\"" << registry_.anchor(id) << "\"></a>\n### `" << c->name << "`\n\n`" << id << "` is a "
             << graph::to_string(c->kind) << " in `" << c->file << "` (lines " << c->span.start_line << "-"
             << c->span.end_line << ").\n\n";
    if (ids.tellp() > 0) ids << ", ";
    ids << id;
    for (const auto& dep : graph_.successors(id))
      if (!own.count(dep)) external.insert(dep);
  }
  for (const auto& dep : external) {
    const auto* c = graph_.find(dep);
    if (auto link = resolve_reference(dep, registry_, node.id)) {
      refs << "- [`" << c->name << "`](" << *link << ")\n";
    } else {
      refs << "- `" << dep << "`\n";
    }
  }
  return {{"module_id", node.id},
          {"module_name", node.name},
          {"doc_path", doc_path(node.id)},
          {"repo_name", opt_.repo_name},
          {"component_ids", ids.str()},
          {"component_count", std::to_string(node.component_ids.size())},
          {"files", join(std::vector<std::string>(files.begin(), files.end()), ", ")},
          {"components", sections.str()},
          {"references", refs.str().empty() ? std::string("None.\n") : refs.str()}};
}

std::string DocEngine::leaf_prompt(const ModuleNode& node, bool truncate, bool* truncated) const {
  std::ostringstream head;
  head << "You are documenting the module '" << node.name << "' (" << node.id << ") of the repository '"
       << opt_.repo_name << "'.\n"
       << "Write one markdown document for this module with create_doc, then reply with a short confirmation.\n"
       << "Explain purpose, architecture, the role of each component, and how they interact.\n"
       << "For every component below include its anchor tag exactly as given so other documents can link to it.\n"
       << "Use lookup_reference before describing a component owned by another module; link to it if documented.\n"
       << "If this module is too complex or too diverse to document well in one pass, call request_delegation\n"
       << "with a partition of its component ids into named submodules and a reason\n"
       << "(complexity, semantic_diversity or context_overflow).\n\n"
       << "Module tree:\n"
       << tree_outline() << "\nComponents:\n";
  for (const auto& id : node.component_ids) {
    const auto* c = graph_.find(id);
    head << "- " << id << " [" << graph::to_string(c->kind) << ", " << c->file << ":" << c->span.start_line << "-"
         << c->span.end_line << ", " << c->token_count << " tokens] anchor: <a id=\"" << registry_.anchor(id)
         << "\"></a>\n";
  }
  head << "\n";

  const auto& tok = graph::default_tokenizer();
  const double limit = opt_.delegation_guard * static_cast<double>(model_.context_window);
  std::size_t used = tok.count(head.str());
  std::ostringstream body;
  body << "Source code:\n\n";
  if (truncated) *truncated = false;
  for (const auto& id : node.component_ids) {
    const auto* c = graph_.find(id);
    std::ostringstream one;
    one << "#### " << id << "\n```" << fence_lang(c->file) << "\n" << c->source << "\n```\n\n";
    std::size_t n = tok.count(one.str());
    if (truncate && static_cast<double>(used + n) > limit) {
      body << "#### " << id << "\n[source omitted to fit the context window: " << c->token_count << " tokens]\n\n";
      if (truncated) *truncated = true;
      continue;
    }
    used += n;
    body << one.str();
  }
  return head.str() + body.str();
}

std::string DocEngine::child_links(const ModuleNode& node) const {
  std::ostringstream os;
  for (const auto& c : node.children)
    os << "- [" << c.name << "](" << relative_link(doc_path(node.id), doc_path(c.id)) << ")\n";
  return os.str();
}

std::string DocEngine::diagram(const ModuleNode& node) const {
  std::map<std::string, std::size_t> owner;  // component -> child index
  for (std::size_t k = 0; k < node.children.size(); ++k) {
    std::vector<const ModuleNode*> stack{&node.children[k]};
    while (!stack.empty()) {
      const ModuleNode* n = stack.back();
      stack.pop_back();
      for (const auto& c : n->component_ids) owner[c] = k;
      for (const auto& ch : n->children) stack.push_back(&ch);
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> deps;
  for (const auto& e : graph_.edges()) {
    auto a = owner.find(e.from);
    auto b = owner.find(e.to);
    if (a != owner.end() && b != owner.end() && a->second != b->second) deps.emplace(a->second, b->second);
  }
  std::ostringstream os;
  os << "```mermaid\ngraph TD\n";
  os << "  " << mermaid_id(0) << "[\"" << mermaid_label(node.name) << "\"]\n";
  for (std::size_t k = 0; k < node.children.size(); ++k)
    os << "  " << mermaid_id(0) << " --> " << mermaid_id(k + 1) << "[\"" << mermaid_label(node.children[k].name)
       << "\"]\n";
  for (const auto& [a, b] : deps) os << "  " << mermaid_id(a + 1) << " -. depends on .-> " << mermaid_id(b + 1) << "\n";
  os << "```\n";
  return os.str();
}

std::map<std::string, std::string> DocEngine::parent_vars(const ModuleNode& node) const {
  std::vector<std::string> names;
  std::size_t components = 0;
  std::vector<const ModuleNode*> stack{&node};
  while (!stack.empty()) {
    const ModuleNode* n = stack.back();
    stack.pop_back();
    components += n->component_ids.size();
    for (const auto& ch : n->children) stack.push_back(&ch);
  }
  for (const auto& c : node.children) names.push_back(c.name);
  return {{"module_id", node.id},
          {"module_name", node.id == "root" ? opt_.repo_name : node.name},
          {"doc_path", doc_path(node.id)},
          {"repo_name", opt_.repo_name},
          {"child_links", child_links(node)},
          {"child_names", join(names, ", ")},
          {"child_count", std::to_string(node.children.size())},
          {"component_count", std::to_string(components)},
          {"diagram", diagram(node)}};
}

std::string DocEngine::parent_prompt(const ModuleNode& node, const std::string& role) const {
  std::ostringstream os;
  if (role == "overview") {
    os << "You are writing the repository overview for '" << opt_.repo_name << "'.\n";
  } else {
    os << "You are writing the parent-level documentation of module '" << node.name << "' (" << node.id << ").\n";
  }
  if (role == "revise")
    os << "This module was split into submodules while being documented; regenerate its document from scratch\n"
       << "as an overview of the submodules below.\n";
  os << "Synthesize the child documents below into one markdown document written with create_doc. It must contain\n"
     << "an architecture overview, a feature summary, usage guidance, at least one fenced mermaid diagram of the\n"
     << "relationships between submodules, and a link to every child document (targets listed below).\n"
     << "Do not repeat component-level detail; link to it instead.\n\n"
     << "Module tree:\n"
     << tree_outline() << "\nChild documents:\n";
  for (const auto& c : node.children) {
    os << "\n=== " << c.name << " (link target: " << relative_link(doc_path(node.id), doc_path(c.id)) << ") ===\n";
    os << ws_.read(c.id).value_or("") << "\n";
  }
  return os.str();
}

// ------------------------------------------------------------------ tools

std::vector<agent::AgentTool> DocEngine::common_tools(const std::string& module_id, std::optional<std::string>& draft) {
  std::vector<agent::AgentTool> tools;
  const std::string own = doc_path(module_id);

  tools.push_back({{"view_doc", "Read a document of the workspace (default: the one being written).",
                    object_schema({{"path", {{"type", "string"}}}}, {})},
                   [this, own, &draft](const json& args) -> agent::ToolResult {
                     std::string path = args.contains("path") ? str_arg(args, "path") : own;
                     ws_.resolve(path);
                     if (path == own) {
                       if (draft) return {*draft};
                       throw ValidationError("the document " + own + " has not been created yet");
                     }
                     auto text = ws_.read_path(path);
                     if (!text) throw ValidationError("no such document: " + path);
                     return {*text};
                   }});
  tools.push_back({{"create_doc", "Create this module's markdown document.",
                    object_schema({{"content", {{"type", "string"}}}, {"path", {{"type", "string"}}}}, {"content"})},
                   [this, own, &draft](const json& args) -> agent::ToolResult {
                     if (args.contains("path")) {
                       std::string path = str_arg(args, "path");
                       ws_.resolve(path);
                       if (fs_normal(path) != own) throw ValidationError("you may only write " + own);
                     }
                     if (draft) throw ValidationError(own + " already exists; use edit_doc");
                     draft = str_arg(args, "content");
                     return {"created " + own};
                   }});
  tools.push_back({{"edit_doc", "Edit this module's document: replace old_text by new_text, or replace everything with content.",
                    object_schema({{"old_text", {{"type", "string"}}}, {"new_text", {{"type", "string"}}},
                                   {"content", {{"type", "string"}}}, {"path", {{"type", "string"}}}},
                                  {})},
                   [this, own, &draft](const json& args) -> agent::ToolResult {
                     if (args.contains("path")) {
                       std::string path = str_arg(args, "path");
                       ws_.resolve(path);
                       if (fs_normal(path) != own) throw ValidationError("you may only write " + own);
                     }
                     if (!draft) throw ValidationError(own + " does not exist yet; use create_doc");
                     if (args.contains("content")) {
                       draft = str_arg(args, "content");
                       return {"replaced " + own};
                     }
                     std::string old_text = str_arg(args, "old_text");
                     std::string new_text = str_arg(args, "new_text");
                     auto pos = draft->find(old_text);
                     if (old_text.empty() || pos == std::string::npos) throw ValidationError("old_text not found");
                     if (draft->find(old_text, pos + 1) != std::string::npos) throw ValidationError("old_text is not unique");
                     draft->replace(pos, old_text.size(), new_text);
                     return {"edited " + own};
                   }});
  tools.push_back({{"lookup_reference", "Find where a component is documented.",
                    object_schema({{"component_id", {{"type", "string"}}}}, {"component_id"})},
                   [this, module_id](const json& args) -> agent::ToolResult {
                     std::string id = str_arg(args, "component_id");
                     if (!registry_.knows(id)) throw ValidationError("unknown component " + id);
                     const ModuleNode* n = tree_.find(module_id);
                     if (n && std::binary_search(n->component_ids.begin(), n->component_ids.end(), id))
                       return {"#" + registry_.anchor(id) + " (this module)"};
                     if (auto link = resolve_reference(id, registry_, module_id)) return {*link};
                     return {"MISS: " + id + " is not documented yet. Describe it briefly inline or leave it out."};
                   }});
  tools.push_back({{"view_module_tree", "Show the current module tree.", object_schema(json::object(), {})},
                   [this](const json&) -> agent::ToolResult { return {tree_outline()}; }});
  return tools;
}

// ------------------------------------------------------------------ leaves

DelegationRequest DocEngine::fallback_split(const ModuleNode& node, DelegationReason reason) const {
  decompose::PartitionInput in;
  in.module_id = node.id;
  in.component_ids = node.component_ids;
  std::size_t total = 0;
  std::set<std::string> members(node.component_ids.begin(), node.component_ids.end());
  for (const auto& id : node.component_ids) {
    in.token_counts[id] = graph_.find(id)->token_count;
    total += in.token_counts[id];
  }
  for (const auto& e : graph_.edges())
    if (members.count(e.from) && members.count(e.to)) in.edges.emplace_back(e.from, e.to);
  in.capacity = std::max<std::size_t>(1, (total + 1) / 2);
  decompose::GreedyPartitioner greedy;
  auto groups = greedy.partition(in);
  if (groups.size() < 2) {
    // Balanced by count when one component dominates.
    groups.clear();
    const std::size_t half = (node.component_ids.size() + 1) / 2;
    groups.push_back({"module_1", {node.component_ids.begin(), node.component_ids.begin() + static_cast<long>(half)}});
    groups.push_back({"module_2", {node.component_ids.begin() + static_cast<long>(half), node.component_ids.end()}});
  }
  return {node.id, std::move(groups), reason, true};
}

void DocEngine::apply_delegation(const DelegationRequest& request) {
  decompose::update_tree(tree_, request.module_id, request.submodules, opt_.max_depth);
  delegated_.insert(request.module_id);
  std::vector<std::string> names;
  for (const auto& s : request.submodules) names.push_back(s.name);
  record(request.module_id, request.fallback ? "fallback_split" : "delegated",
         std::string(to_string(request.reason)) + ": " + join(names, ", "));
  if (on_commit) on_commit();
}

struct DocEngine::LeafState {
  std::optional<std::string> draft;
  std::optional<DelegationRequest> delegation;
  std::size_t rejected = 0;
};

LeafOutcome DocEngine::document_leaf(const std::string& module_id) {
  const ModuleNode* node = tree_.find(module_id);
  if (!node) throw ValidationError("unknown module " + module_id);
  if (!node->is_leaf()) throw ValidationError("module " + module_id + " is not a leaf");
  if (node->status != ModuleStatus::Pending) throw ValidationError("module " + module_id + " is already documented");

  const std::size_t depth = tree_.depth_of(module_id);
  const bool can_delegate = depth < opt_.max_depth && node->component_ids.size() > 1;
  const auto& tok = graph::default_tokenizer();
  const double limit = opt_.delegation_guard * static_cast<double>(model_.context_window);

  std::string prompt = leaf_prompt(*node, false, nullptr);
  if (static_cast<double>(tok.count(prompt)) > limit) {
    if (can_delegate) {
      auto req = fallback_split(*node, DelegationReason::ContextOverflow);
      apply_delegation(req);
      return {std::nullopt, req};
    }
    bool truncated = false;
    prompt = leaf_prompt(*node, true, &truncated);
    if (truncated) record(module_id, "truncated_context", "module prompt exceeds the delegation guard");
  }

  LeafState st;
  auto tools = common_tools(module_id, st.draft);
  tools.push_back({{"view_source", "Show the source of a component.",
                    object_schema({{"component_id", {{"type", "string"}}}}, {"component_id"})},
                   [this](const json& args) -> agent::ToolResult {
                     std::string id = str_arg(args, "component_id");
                     const auto* c = graph_.find(id);
                     if (!c) throw ValidationError("unknown component " + id);
                     std::ostringstream os;
                     os << id << " (" << graph::to_string(c->kind) << ") " << c->file << ":" << c->span.start_line << "-"
                        << c->span.end_line << "\n```" << fence_lang(c->file) << "\n" << c->source << "\n```\n";
                     return {os.str()};
                   }});
  tools.push_back({{"traverse_dependencies", "List what a component depends on (out) or what depends on it (in).",
                    object_schema({{"component_id", {{"type", "string"}}},
                                   {"direction", {{"type", "string"}, {"enum", {"out", "in"}}}}},
                                  {"component_id"})},
                   [this, module_id](const json& args) -> agent::ToolResult {
                     std::string id = str_arg(args, "component_id");
                     if (!graph_.contains(id)) throw ValidationError("unknown component " + id);
                     std::string dir = args.contains("direction") ? str_arg(args, "direction") : "out";
                     if (dir != "out" && dir != "in") throw ValidationError("direction must be 'out' or 'in'");
                     auto ids = dir == "out" ? graph_.successors(id) : graph_.predecessors(id);
                     const ModuleNode* self = tree_.find(module_id);
                     std::ostringstream os;
                     if (ids.empty()) os << "none\n";
                     for (const auto& d : ids) {
                       os << "- " << d;
                       if (self && std::binary_search(self->component_ids.begin(), self->component_ids.end(), d)) {
                         os << " (this module)";
                       } else if (auto link = resolve_reference(d, registry_, module_id)) {
                         os << " documented at " << *link;
                       } else {
                         os << " (not documented yet)";
                       }
                       os << "\n";
                     }
                     return {os.str()};
                   }});
  tools.push_back(
      {{"request_delegation", "Split this module into submodules that are documented first.",
        object_schema({{"submodules", {{"type", "array"},
                                       {"items", object_schema({{"name", {{"type", "string"}}},
                                                                {"component_ids", {{"type", "array"}, {"items", {{"type", "string"}}}}}},
                                                               {"name", "component_ids"})}}},
                       {"reason", {{"type", "string"}, {"enum", {"complexity", "semantic_diversity", "context_overflow"}}}}},
                      {"submodules", "reason"})},
       [this, module_id, depth, &st](const json& args) -> agent::ToolResult {
         if (depth >= opt_.max_depth) {
           record(module_id, "delegation_refused", "maximum delegation depth " + std::to_string(opt_.max_depth));
           return {"delegation refused: the maximum delegation depth (" + std::to_string(opt_.max_depth) +
                       ") is reached. Document this module directly with create_doc.",
                   true, false};
         }
         const ModuleNode* self = tree_.find(module_id);
         DelegationRequest req;
         req.module_id = module_id;
         try {
           if (!args.contains("reason") || !args["reason"].is_string())
             throw ValidationError("reason is required");
           auto reason = delegation_reason_from_string(args["reason"].get<std::string>());
           if (!reason) throw ValidationError("unknown reason '" + args["reason"].get<std::string>() + "'");
           req.reason = *reason;
           if (!args.contains("submodules") || !args["submodules"].is_array())
             throw ValidationError("submodules must be an array");
           for (const auto& s : args["submodules"]) {
             if (!s.is_object() || !s.contains("name") || !s["name"].is_string() || !s.contains("component_ids") ||
                 !s["component_ids"].is_array())
               throw ValidationError("each submodule needs a name and a component_ids array");
             decompose::SubmoduleSpec spec;
             spec.name = s["name"].get<std::string>();
             for (const auto& c : s["component_ids"]) {
               if (!c.is_string()) throw ValidationError("component ids must be strings");
               spec.component_ids.push_back(c.get<std::string>());
             }
             req.submodules.push_back(std::move(spec));
           }
           if (req.submodules.size() < 2) throw ValidationError("a delegation needs at least two submodules");
           decompose::ModuleTree probe = tree_;
           decompose::update_tree(probe, module_id, req.submodules, opt_.max_depth);
         } catch (const ValidationError& e) {
           ++st.rejected;
           record(module_id, "delegation_rejected", e.what());
           if (st.rejected == 1)
             return {std::string("delegation rejected: ") + e.what() +
                         ". The submodules must partition exactly this module's component ids. Fix it and retry once.",
                     true, false};
           st.delegation = fallback_split(*self, DelegationReason::Complexity);
           return {"delegation request was malformed twice; the engine applied a deterministic split", false, true};
         }
         st.delegation = std::move(req);
         return {"delegation accepted: " + std::to_string(st.delegation->submodules.size()) + " submodules", false, true};
       }});

  agent::AgentOptions ao;
  ao.max_turns = opt_.max_turns;
  ao.role = "leaf";
  ao.module_id = module_id;
  ao.vars = leaf_vars(*node);
  auto result = agent::run_agent_loop(backend_, model_, prompt, tools, ao);
  emit_transcript(result, "leaf", module_id);
  if (result.incomplete) record(module_id, "incomplete", "max_turns reached");

  if (st.delegation) {
    apply_delegation(*st.delegation);
    return {std::nullopt, st.delegation};
  }
  std::string md = st.draft ? *st.draft : result.text;
  if (trim(md).empty()) throw RemoteModelError("leaf agent produced no document for " + module_id);
  md = finalize_leaf(*node, std::move(md));
  commit(*node, md);
  return {md, std::nullopt};
}

std::string DocEngine::finalize_leaf(const ModuleNode& node, std::string md) const {
  std::set<std::string> own;
  for (const auto& id : node.component_ids) own.insert(registry_.anchor(id));
  // Anchors of components owned elsewhere would break conservation.
  static const std::regex tag(R"re(<a\s+(?:id|name)\s*=\s*"([^"]+)"\s*>\s*</a>)re");
  std::string cleaned;
  std::set<std::string> present;
  auto begin = std::sregex_iterator(md.begin(), md.end(), tag);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::string a = (*it)[1].str();
    const bool component = anchor_owner_.count(a) > 0;
    const bool keep = !component || (own.count(a) && !present.count(a));
    cleaned.append(md, last, static_cast<std::size_t>(it->position()) - last);
    if (keep) {
      cleaned += it->str();
      present.insert(a);
    }
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  cleaned.append(md, last, std::string::npos);
  md = ensure_title(std::move(cleaned), node.name);

  std::ostringstream missing;
  for (const auto& id : node.component_ids) {
    const std::string& a = registry_.anchor(id);
    if (present.count(a)) continue;
    const auto* c = graph_.find(id);
    missing << "<a id=\"" << a << "\"></a>\n### `" << c->name << "`\n\n`" << id << "` is a " << graph::to_string(c->kind)
            << " in `" << c->file << "` (lines " << c->span.start_line << "-" << c->span.end_line << ").\n\n";
  }
  if (missing.tellp() > 0) md = end_with_newline(std::move(md)) + "\n## Component index\n\n" + missing.str();
  return end_with_newline(std::move(md));
}

void DocEngine::commit(const ModuleNode& node, const std::string& markdown) {
  ws_.write(node.id, markdown);
  ModuleNode* n = tree_.find(node.id);
  if (n->is_leaf()) {
    n->status = ModuleStatus::Documented;
    for (const auto& c : n->component_ids) registry_.register_component(c, n->id);
  } else {
    n->status = ModuleStatus::Synthesized;
  }
  if (on_commit) on_commit();
}

// ------------------------------------------------------------------ parents

std::string DocEngine::finalize_parent(const ModuleNode& node, std::string md) const {
  static const std::regex tag(R"re(<a\s+(?:id|name)\s*=\s*"([^"]+)"\s*>\s*</a>)re");
  std::string cleaned;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(md.begin(), md.end(), tag); it != std::sregex_iterator(); ++it) {
    cleaned.append(md, last, static_cast<std::size_t>(it->position()) - last);
    if (!anchor_owner_.count((*it)[1].str())) cleaned += it->str();
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  cleaned.append(md, last, std::string::npos);
  const bool is_root = node.id == "root";
  md = ensure_title(std::move(cleaned), is_root ? opt_.repo_name : node.name);

  std::vector<std::string> names;
  for (const auto& c : node.children) names.push_back(c.name);
  std::ostringstream add;
  if (!has_heading(md, {"overview", "architecture"}))
    add << "\n## Architecture overview\n\n" << (is_root ? opt_.repo_name : node.name) << " is organized into "
        << node.children.size() << (node.children.size() == 1 ? " submodule: " : " submodules: ") << join(names, ", ")
        << ".\n";
  if (!has_diagram(md)) add << "\n" << diagram(node);
  if (!has_heading(md, {"feature"})) add << "\n## Feature summary\n\n" << child_links(node);
  if (!has_heading(md, {"usage", "guidance", "getting started", "how to use"}))
    add << "\n## Usage guidance\n\nStart with the submodule that matches the task and follow its links to the "
           "documented components.\n";

  std::set<std::string> targets;
  for (const auto& l : extract_links(md)) targets.insert(l.target.substr(0, l.target.find('#')));
  std::ostringstream links;
  for (const auto& c : node.children) {
    std::string t = relative_link(doc_path(node.id), doc_path(c.id));
    if (!targets.count(t)) links << "- [" << c.name << "](" << t << ")\n";
  }
  if (links.tellp() > 0) add << "\n## Submodules\n\n" << links.str();
  if (add.tellp() > 0) md = end_with_newline(std::move(md)) + add.str();
  return end_with_newline(std::move(md));
}

std::string DocEngine::synthesize_parent(const std::string& module_id) {
  const ModuleNode* node = tree_.find(module_id);
  if (!node) throw ValidationError("unknown module " + module_id);
  if (node->status != ModuleStatus::Pending) throw ValidationError("module " + module_id + " is already documented");
  for (const auto& c : node->children)
    if (!ws_.has(c.id)) throw InvariantError("child " + c.id + " of " + module_id + " has no document yet");

  if (module_id == "root" && node->children.empty()) {
    std::string md = "# " + opt_.repo_name + "\n\nNo documentable components were found in this repository.\n";
    commit(*node, md);
    return md;
  }
  const std::string role = module_id == "root" ? "overview" : (delegated_.count(module_id) ? "revise" : "parent");
  std::optional<std::string> draft;
  auto tools = common_tools(module_id, draft);
  agent::AgentOptions ao;
  ao.max_turns = opt_.max_turns;
  ao.role = role;
  ao.module_id = module_id;
  ao.vars = parent_vars(*node);
  auto result = agent::run_agent_loop(backend_, model_, parent_prompt(*node, role), tools, ao);
  emit_transcript(result, role, module_id);
  if (result.incomplete) record(module_id, "incomplete", "max_turns reached");
  std::string md = draft ? *draft : result.text;
  if (trim(md).empty()) throw RemoteModelError(role + " agent produced no document for " + module_id);
  md = finalize_parent(*node, std::move(md));
  commit(*node, md);
  return md;
}

// ------------------------------------------------------------------ driver

void DocEngine::process_module(const std::string& module_id) {
  const ModuleNode* node = tree_.find(module_id);
  if (!node || node->status != ModuleStatus::Pending) return;
  if (node->is_leaf()) {
    auto outcome = document_leaf(module_id);
    if (outcome.document) return;
    node = tree_.find(module_id);
  }
  std::vector<std::string> children;
  for (const auto& c : node->children) children.push_back(c.id);
  for (const auto& c : children) process_module(c);
  synthesize_parent(module_id);
}

void DocEngine::run() {
  const ModuleNode& root = tree_.root();
  if (root.is_leaf() && root.component_ids.empty()) {
    if (root.status == ModuleStatus::Pending)
      commit(root, "# " + opt_.repo_name + "\n\nNo components were found in this repository.\n");
    return;
  }
  std::vector<std::string> order;
  for (const ModuleNode* n : tree_.post_order()) order.push_back(n->id);
  for (const auto& id : order) {
    const ModuleNode* n = tree_.find(id);
    if (n && n->status == ModuleStatus::Pending && (n->is_leaf() || delegated_.count(id))) process_module(id);
  }
  order.clear();
  for (const ModuleNode* n : tree_.post_order()) order.push_back(n->id);
  for (const auto& id : order)
    if (tree_.find(id)->status == ModuleStatus::Pending) synthesize_parent(id);
  repair_links();
}

void DocEngine::repair_links() {
  std::map<std::string, std::string> by_path;
  std::map<std::string, std::string> module_of;
  for (const auto& [id, md] : ws_.documents()) {
    by_path[doc_path(id)] = md;
    module_of[doc_path(id)] = id;
  }
  std::map<std::string, std::set<std::string>> broken;
  for (const auto& b : check_links(by_path)) broken[b.document].insert(b.target);
  for (const auto& [path, targets] : broken) {
    const std::string& id = module_of[path];
    record(id, "link_repaired", join(std::vector<std::string>(targets.begin(), targets.end()), ", "));
    std::string md = unlink(by_path[path], targets);
    write_file(ws_.resolve(path), md);
    ws_.restore_log(ws_.write_log());
  }
  if (!broken.empty() && on_commit) on_commit();
}

// ------------------------------------------------------------------ checks

bool is_reverse_topological(const decompose::ModuleTree& tree, const std::vector<WriteLogEntry>& log) {
  std::map<std::string, std::size_t> last;
  for (const auto& e : log) last[e.module_id] = e.seq;
  for (const ModuleNode* n : tree.nodes()) {
    auto self = last.find(n->id);
    if (self == last.end()) return false;
    for (const auto& c : n->children) {
      auto child = last.find(c.id);
      if (child == last.end() || child->second >= self->second) return false;
    }
  }
  return true;
}

std::vector<std::string> verify_workspace(const decompose::ModuleTree& tree, const ReferenceRegistry& registry,
                                          const DocWorkspace& workspace) {
  std::vector<std::string> problems;
  auto docs = workspace.documents();
  std::map<std::string, std::string> by_path;
  for (const auto& [id, md] : docs) by_path[doc_path(id)] = md;
  for (const auto& b : check_links(by_path)) problems.push_back("broken link in " + b.document + ": " + b.target + " (" + b.reason + ")");
  if (!is_reverse_topological(tree, workspace.write_log())) problems.push_back("write log is not in reverse-topological order");

  std::map<std::string, std::string> owner_of_anchor;
  for (const auto& [id, a] : registry.anchors()) owner_of_anchor[a] = id;
  std::map<std::string, std::vector<std::string>> seen;  // component -> docs with its anchor
  for (const auto& [id, md] : docs)
    for (const auto& a : explicit_anchors(md))
      if (auto it = owner_of_anchor.find(a); it != owner_of_anchor.end()) seen[it->second].push_back(id);
  for (const ModuleNode* leaf : tree.leaves()) {
    for (const auto& c : leaf->component_ids) {
      auto it = seen.find(c);
      if (it == seen.end() || it->second.empty()) {
        problems.push_back("component " + c + " has no anchor");
      } else if (it->second.size() != 1 || it->second.front() != leaf->id) {
        problems.push_back("component " + c + " is anchored in " + join(it->second, ", ") + " instead of " + leaf->id);
      }
    }
  }
  for (const ModuleNode* n : tree.nodes())
    if (!docs.count(n->id)) problems.push_back("module " + n->id + " has no document");
  return problems;
}

}  // namespace codewiki::doc
