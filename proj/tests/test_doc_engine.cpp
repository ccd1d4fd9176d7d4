// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <chrono>
#include <json.hpp>

#include "codewiki/agent/mock_backend.hpp"
#include "codewiki/core/error.hpp"
#include "codewiki/doc/engine.hpp"
#include "codewiki/doc/links.hpp"
#include "codewiki/doc/pipeline.hpp"
#include "codewiki/graph/serialize.hpp"
#include "support.hpp"

using namespace codewiki;
using namespace codewiki::doc;
using namespace testsupport;
using agent::MockBackend;
using agent::ScriptedTurn;
using nlohmann::json;

namespace {

agent::ModelConfig mock_model() {
  agent::ModelConfig m;
  m.name = "generator";
  m.provider = "mock";
  return m;
}

graph::DependencyGraph small_graph(const std::vector<std::string>& names,
                                   const std::vector<std::pair<std::string, std::string>>& calls = {}) {
  std::vector<graph::CodeComponent> comps;
  std::size_t line = 1;
  for (const auto& n : names) {
    graph::CodeComponent c;
    c.id = "app.py::" + n;
    c.name = n;
    c.file = "app.py";
    c.span = {line, line + 1};
    line += 3;
    c.source = "def " + n + "():\n    pass";
    c.token_count = 8;
    comps.push_back(c);
  }
  std::vector<graph::DependencyEdge> edges;
  for (const auto& [a, b] : calls) edges.push_back({"app.py::" + a, "app.py::" + b, graph::RawKind::Call});
  return graph::build_graph(comps, edges);
}

decompose::ModuleTree one_leaf(const graph::DependencyGraph& g) {
  decompose::ModuleTree t;
  decompose::ModuleNode leaf;
  leaf.id = "root/core";
  leaf.name = "core";
  for (const auto& [id, _] : g.components()) leaf.component_ids.push_back(id);
  t.root().children.push_back(leaf);
  return t;
}

agent::ScriptedCall create(const std::string& content) { return {"create_doc", {{"content", content}}}; }

ScriptedTurn call(agent::ScriptedCall c) { return {"", {std::move(c)}}; }

ScriptedTurn delegate(const json& submodules, const std::string& reason = "complexity") {
  return call({"request_delegation", {{"submodules", submodules}, {"reason", reason}}});
}

void add_defaults(MockBackend& mock) {
  mock.add_script("leaf", "*", {call(create("# {{module_name}}\n\nLeaf text.\n")), {"ok", {}}});
  for (const char* role : {"parent", "revise", "overview"})
    mock.add_script(role, "*", {call(create("# {{module_name}}\n\nParent text.\n")), {"ok", {}}});
}

struct Fixture {
  fs::path dir = temp_dir("engine");
  DocWorkspace ws{dir};
  ~Fixture() { fs::remove_all(dir); }
};

std::vector<std::string> log_modules(const std::vector<WriteLogEntry>& log) {
  std::vector<std::string> out;
  for (const auto& e : log) out.push_back(e.module_id);
  return out;
}

std::size_t count_docs(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".md" &&
        fs::relative(e.path(), dir).begin()->string() != kMetaDir)
      ++n;
  return n;
}

}  // namespace

TEST(Workspace, PathsAndTraversal) {
  EXPECT_EQ(doc_path("root"), "index.md");
  EXPECT_EQ(doc_path("root/a/b"), "a/b.md");
  EXPECT_EQ(relative_link("a/b.md", "c.md", "x"), "../c.md#x");
  EXPECT_EQ(relative_link("a/b.md", "a/b.md", "x"), "#x");
  EXPECT_EQ(relative_link("index.md", "a/b.md"), "a/b.md");
  Fixture f;
  EXPECT_THROW(f.ws.resolve("../escape.md"), ValidationError);
  EXPECT_THROW(f.ws.resolve("a/../../escape.md"), ValidationError);
  EXPECT_THROW(f.ws.resolve("/etc/passwd"), ValidationError);
  f.ws.write("root/a", "# A\n");
  EXPECT_EQ(f.ws.read("root/a"), "# A\n");
  EXPECT_EQ(slurp(f.dir / "a.md"), "# A\n");
  EXPECT_TRUE(f.ws.has("root/a"));
  ASSERT_EQ(f.ws.write_log().size(), 1u);
  EXPECT_EQ(f.ws.write_log()[0].path, "a.md");
}

TEST(Links, ExtractionSkipsCode) {
  const std::string md = "See [a](x.md) and `[b](y.md)` and ![img](p.png).\n```\n[c](z.md)\n```\n[d](#top)\n";
  auto links = extract_links(md);
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0].target, "x.md");
  EXPECT_EQ(links[1].target, "#top");
  EXPECT_TRUE(is_external_link("https://example.com"));
  EXPECT_FALSE(is_external_link("a.md"));
}

TEST(Links, AnchorsAndChecks) {
  const std::string md = "# Hello World\n## Hello World\n<a id=\"x-1\"></a>\n### `parse_row` (v2)\n";
  auto a = document_anchors(md);
  EXPECT_TRUE(a.count("hello-world"));
  EXPECT_TRUE(a.count("hello-world-1"));
  EXPECT_TRUE(a.count("x-1"));
  EXPECT_TRUE(a.count("parse_row-v2"));
  std::map<std::string, std::string> docs{{"index.md", "[ok](a.md#x-1) [bad](a.md#nope) [gone](b.md)\n"},
                                          {"a.md", "<a id=\"x-1\"></a>\n"}};
  auto broken = check_links(docs);
  ASSERT_EQ(broken.size(), 2u);
  auto fixed = unlink(docs["index.md"], {"a.md#nope", "b.md"});
  EXPECT_EQ(fixed, "[ok](a.md#x-1) bad gone\n");
}

TEST(Registry, AnchorsUniqueAndReferencesResolve) {
  auto g = small_graph({"f_g", "f-g", "F_G", "other"});
  ReferenceRegistry reg(g);
  std::set<std::string> seen;
  for (const auto& [id, _] : g.components()) {
    EXPECT_TRUE(seen.insert(reg.anchor(id)).second) << id;
    EXPECT_EQ(simple_slug(reg.anchor(id)), reg.anchor(id));
  }
  EXPECT_FALSE(resolve_reference("app.py::other", reg, "root/x"));
  reg.register_component("app.py::other", "root/a/b");
  auto link = resolve_reference("app.py::other", reg, "root/x");
  ASSERT_TRUE(link);
  EXPECT_NE(link->find("a/b.md#" + reg.anchor("app.py::other")), std::string::npos);
  EXPECT_THROW(reg.register_component("app.py::other", "root/c"), InvariantError);
  EXPECT_FALSE(resolve_reference("app.py::unknown", reg, "root/x"));
}

TEST(Engine, SingleFunctionLeaf) {
  Fixture f;
  auto g = small_graph({"solo"});
  MockBackend mock;
  mock.add_script("leaf", "root/core", {call(create("Only prose, no title.")), {"ok", {}}});
  DocEngine engine(g, one_leaf(g), f.ws, mock, mock_model());
  auto out = engine.document_leaf("root/core");
  ASSERT_TRUE(out.document);
  EXPECT_FALSE(out.delegation);
  const auto& md = *out.document;
  EXPECT_EQ(md.rfind("# ", 0), 0u);
  EXPECT_NE(md.find("<a id=\"" + engine.registry().anchor("app.py::solo") + "\"></a>"), std::string::npos);
  EXPECT_EQ(engine.tree().find("root/core")->status, decompose::ModuleStatus::Documented);
  EXPECT_EQ(engine.registry().lookup("app.py::solo")->module_id, "root/core");
  EXPECT_THROW(engine.document_leaf("root/core"), ValidationError);
  EXPECT_THROW(engine.document_leaf("root"), ValidationError);
}

TEST(Engine, LeafCannotWriteForeignDocuments) {
  Fixture f;
  auto g = small_graph({"solo"});
  MockBackend mock;
  mock.add_script("leaf", "root/core",
                  {call({"create_doc", {{"path", "index.md"}, {"content", "# hijack"}}}), call(create("# core\n")),
                   {"ok", {}}});
  DocEngine engine(g, one_leaf(g), f.ws, mock, mock_model());
  engine.document_leaf("root/core");
  EXPECT_FALSE(f.ws.has("root"));
  EXPECT_FALSE(fs::exists(f.dir / "index.md"));
}

TEST(Engine, DelegationSplitsThenRevises) {
  Fixture f;
  auto g = small_graph({"a", "b", "c"}, {{"b", "c"}});
  MockBackend mock;
  mock.add_script("leaf", "root/core",
                  {delegate({{{"name", "first"}, {"component_ids", {"app.py::a"}}},
                             {{"name", "rest"}, {"component_ids", {"app.py::b", "app.py::c"}}}})});
  add_defaults(mock);
  DocEngine engine(g, one_leaf(g), f.ws, mock, mock_model());
  engine.run();
  const auto* core = engine.tree().find("root/core");
  ASSERT_EQ(core->children.size(), 2u);
  EXPECT_EQ(core->children[0].component_ids, (std::vector<std::string>{"app.py::a"}));
  EXPECT_EQ(core->children[1].component_ids, (std::vector<std::string>{"app.py::b", "app.py::c"}));
  EXPECT_TRUE(engine.delegated().count("root/core"));
  EXPECT_EQ(log_modules(f.ws.write_log()),
            (std::vector<std::string>{"root/core/first", "root/core/rest", "root/core", "root"}));
  auto parent = *f.ws.read("root/core");
  EXPECT_NE(parent.find("(core/first.md)"), std::string::npos);
  EXPECT_NE(parent.find("(core/rest.md)"), std::string::npos);
  EXPECT_NE(parent.find("```mermaid"), std::string::npos);
  EXPECT_EQ(verify_workspace(engine.tree(), engine.registry(), f.ws), std::vector<std::string>{});
}

TEST(Engine, MalformedDelegationTwiceFallsBack) {
  Fixture f;
  auto g = small_graph({"a", "b", "c", "d"});
  MockBackend mock;
  json bad = {{{"name", "x"}, {"component_ids", {"app.py::a"}}}, {{"name", "y"}, {"component_ids", {"app.py::zz"}}}};
  mock.add_script("leaf", "root/core", {delegate(bad), delegate(bad)});
  add_defaults(mock);
  DocEngine engine(g, one_leaf(g), f.ws, mock, mock_model());
  auto out = engine.document_leaf("root/core");
  ASSERT_TRUE(out.delegation);
  EXPECT_TRUE(out.delegation->fallback);
  std::size_t rejected = 0;
  for (const auto& e : engine.events()) rejected += e.kind == "delegation_rejected";
  EXPECT_EQ(rejected, 2u);
  const auto* core = engine.tree().find("root/core");
  EXPECT_GE(core->children.size(), 2u);
  std::vector<std::string> ids;
  for (const auto& c : core->children) ids.insert(ids.end(), c.component_ids.begin(), c.component_ids.end());
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, engine.tree().all_components());
}

TEST(Engine, SingleMalformedDelegationCanBeRepaired) {
  Fixture f;
  auto g = small_graph({"a", "b"});
  MockBackend mock;
  mock.add_script("leaf", "root/core",
                  {delegate({{{"name", "only"}, {"component_ids", {"app.py::a", "app.py::b"}}}}),
                   delegate({{{"name", "x"}, {"component_ids", {"app.py::a"}}},
                             {{"name", "y"}, {"component_ids", {"app.py::b"}}}},
                            "semantic_diversity")});
  DocEngine engine(g, one_leaf(g), f.ws, mock, mock_model());
  auto out = engine.document_leaf("root/core");
  ASSERT_TRUE(out.delegation);
  EXPECT_FALSE(out.delegation->fallback);
  EXPECT_EQ(out.delegation->reason, DelegationReason::SemanticDiversity);
}

TEST(Engine, DelegationRefusedAtMaxDepth) {
  Fixture f;
  auto g = small_graph({"a", "b"});
  MockBackend mock;
  mock.add_script("leaf", "root/core",
                  {delegate({{{"name", "x"}, {"component_ids", {"app.py::a"}}},
                             {{"name", "y"}, {"component_ids", {"app.py::b"}}}}),
                   call(create("# core\n")), {"ok", {}}});
  EngineOptions opt;
  opt.max_depth = 1;
  DocEngine engine(g, one_leaf(g), f.ws, mock, mock_model(), opt);
  auto out = engine.document_leaf("root/core");
  EXPECT_TRUE(out.document);
  EXPECT_TRUE(engine.tree().find("root/core")->is_leaf());
  ASSERT_FALSE(engine.events().empty());
  EXPECT_EQ(engine.events()[0].kind, "delegation_refused");
}

TEST(Engine, ParentDocumentGetsRequiredStructure) {
  Fixture f;
  auto g = small_graph({"a", "b"});
  decompose::ModuleTree t;
  for (const char* n : {"a", "b"}) {
    decompose::ModuleNode leaf;
    leaf.id = std::string("root/") + n;
    leaf.name = n;
    leaf.component_ids = {std::string("app.py::") + n};
    t.root().children.push_back(leaf);
  }
  MockBackend mock;
  mock.add_script("leaf", "*", {call(create("# {{module_name}}\n")), {"ok", {}}});
  mock.add_script("overview", "root", {{"Bare overview without structure.", {}}});
  DocEngine engine(g, t, f.ws, mock, mock_model());
  EXPECT_THROW(engine.synthesize_parent("root"), InvariantError);
  engine.run();
  auto md = *f.ws.read("root");
  EXPECT_EQ(md.rfind("# ", 0), 0u);
  EXPECT_NE(md.find("](a.md)"), std::string::npos);
  EXPECT_NE(md.find("](b.md)"), std::string::npos);
  EXPECT_FALSE(fence_languages(md).empty());
  EXPECT_TRUE(explicit_anchors(md).empty());
  EXPECT_EQ(engine.tree().root().status, decompose::ModuleStatus::Synthesized);
}

TEST(Engine, ContextGuardForcesSplit) {
  Fixture f;
  auto g = small_graph({"a", "b", "c"});
  MockBackend mock;
  add_defaults(mock);
  auto model = mock_model();
  model.context_window = 50;
  DocEngine engine(g, one_leaf(g), f.ws, mock, model);
  auto out = engine.document_leaf("root/core");
  ASSERT_TRUE(out.delegation);
  EXPECT_EQ(out.delegation->reason, DelegationReason::ContextOverflow);
  EXPECT_TRUE(out.delegation->fallback);
}

TEST(Engine, ContextGuardTruncatesWhenSplitImpossible) {
  Fixture f;
  auto g = small_graph({"solo"});
  MockBackend mock;
  add_defaults(mock);
  auto model = mock_model();
  model.context_window = 50;
  DocEngine engine(g, one_leaf(g), f.ws, mock, model);
  auto out = engine.document_leaf("root/core");
  EXPECT_TRUE(out.document);
  bool truncated = false;
  for (const auto& e : engine.events()) truncated = truncated || e.kind == "truncated_context";
  EXPECT_TRUE(truncated);
}

TEST(Engine, LookupReferenceTool) {
  Fixture f;
  auto g = small_graph({"a", "b"}, {{"b", "a"}});
  decompose::ModuleTree t;
  for (const char* n : {"a", "b"}) {
    decompose::ModuleNode leaf;
    leaf.id = std::string("root/") + n;
    leaf.name = n;
    leaf.component_ids = {std::string("app.py::") + n};
    t.root().children.push_back(leaf);
  }
  MockBackend mock;
  mock.add_script("leaf", "root/a", {call(create("# a\n")), {"ok", {}}});
  mock.add_script("leaf", "root/b",
                  {call({"lookup_reference", {{"component_id", "app.py::a"}}}),
                   call(create("# b\n\nUses {{references}}\n")), {"ok", {}}});
  add_defaults(mock);
  std::vector<std::string> transcripts;
  DocEngine engine(g, t, f.ws, mock, mock_model());
  engine.on_transcript = [&](const std::string& s) { transcripts.push_back(s); };
  engine.run();
  std::string joined;
  for (const auto& s : transcripts) joined += s;
  EXPECT_NE(joined.find("a.md#" + engine.registry().anchor("app.py::a")), std::string::npos);
  EXPECT_TRUE(broken_links(f.dir).empty());
}

TEST(Pipeline, EndToEndFixture) {
  auto out = temp_dir("e2e");
  auto mock = MockBackend::from_directory(fixtures() / "e2e" / "scripts");
  PipelineOptions opt;
  opt.decompose.budget = 120;
  opt.decompose.max_depth = 3;
  auto start = std::chrono::steady_clock::now();
  auto r = run_pipeline(fixtures() / "e2e" / "repo", out, mock, mock_model(), opt);
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 30.0);
  std::size_t leaves = r.tree.leaves().size(), parents = r.tree.nodes().size() - leaves - 1;
  EXPECT_GE(parents, 1u);
  EXPECT_EQ(count_docs(out), leaves + parents + 1);
  EXPECT_EQ(r.problems, std::vector<std::string>{});
  EXPECT_EQ(broken_links(out), std::vector<std::string>{});
  EXPECT_EQ(check_write_order(r.tree, r.write_log), "");
  EXPECT_TRUE(is_reverse_topological(r.tree, r.write_log));
  auto manifest = json::parse(slurp(out / kMetaDir / "manifest.json"));
  EXPECT_EQ(manifest["state"], "complete");

  // Every component anchor appears exactly once across leaf documents.
  ReferenceRegistry reg(graph::import_graph(slurp(out / kMetaDir / "graph.json")));
  for (const auto& [id, anchor] : reg.anchors()) {
    std::size_t hits = 0;
    for (const auto* leaf : r.tree.leaves()) {
      auto md = slurp(out / doc_path(leaf->id));
      for (auto p = md.find("<a id=\"" + anchor + "\">"); p != std::string::npos;
           p = md.find("<a id=\"" + anchor + "\">", p + 1))
        ++hits;
    }
    EXPECT_EQ(hits, 1u) << id;
  }

  auto again = temp_dir("e2e");
  auto mock2 = MockBackend::from_directory(fixtures() / "e2e" / "scripts");
  run_pipeline(fixtures() / "e2e" / "repo", again, mock2, mock_model(), opt);
  EXPECT_EQ(tree_snapshot(out), tree_snapshot(again));
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST(Pipeline, DelegationScenario) {
  auto out = temp_dir("deleg");
  auto mock = MockBackend::from_directory(fixtures() / "delegation" / "scripts");
  PipelineOptions opt;
  opt.decompose.budget = 100000;
  opt.decompose.max_depth = 3;
  auto r = run_pipeline(fixtures() / "delegation" / "repo", out, mock, mock_model(), opt);
  EXPECT_EQ(log_modules(r.write_log),
            (std::vector<std::string>{"root/module_1/core/inner", "root/module_1/core/outer", "root/module_1/core",
                                      "root/module_1/io", "root/module_1", "root"}));
  ASSERT_NE(r.tree.find("root/module_1/core/inner"), nullptr);
  EXPECT_TRUE(r.tree.find("root/module_1/core/inner")->is_leaf());
  bool refused = false;
  for (const auto& e : r.events)
    refused = refused || (e.kind == "delegation_refused" && e.module_id == "root/module_1/core/inner");
  EXPECT_TRUE(refused);
  EXPECT_EQ(r.problems, std::vector<std::string>{});
  fs::remove_all(out);
}

TEST(Pipeline, EmptyRepository) {
  auto repo = temp_dir("empty-repo");
  auto out = temp_dir("empty-out");
  MockBackend mock;
  auto r = run_pipeline(repo, out, mock, mock_model(), {});
  EXPECT_EQ(count_docs(out), 1u);
  EXPECT_NE(slurp(out / "index.md").find("No components"), std::string::npos);
  EXPECT_TRUE(r.problems.empty());
  fs::remove_all(repo);
  fs::remove_all(out);
}

TEST(Pipeline, RefusesForeignOutputDirectory) {
  auto out = temp_dir("foreign");
  std::ofstream(out / "keep.txt") << "precious";
  MockBackend mock;
  add_defaults(mock);
  EXPECT_THROW(run_pipeline(small_graph({"a"}), out, mock, mock_model(), {}, "r"), ValidationError);
  EXPECT_TRUE(fs::exists(out / "keep.txt"));
  fs::remove_all(out);
}

TEST(Pipeline, ResumeAfterFailure) {
  auto out = temp_dir("resume");
  auto g = small_graph({"a", "b", "c", "d"});
  PipelineOptions opt;
  opt.decompose.budget = 16;
  MockBackend partial;
  partial.add_script("leaf", "*", {call(create("# {{module_name}}\n")), {"ok", {}}});
  EXPECT_THROW(run_pipeline(g, out, partial, mock_model(), opt, "r"), RemoteModelError);
  auto manifest = json::parse(slurp(out / kMetaDir / "manifest.json"));
  EXPECT_EQ(manifest["state"], "failed");
  const auto done = manifest["write_log"].size();
  EXPECT_GT(done, 0u);
  auto first_doc = slurp(out / manifest["write_log"][0]["path"].get<std::string>());

  MockBackend full;
  add_defaults(full);
  opt.resume = true;
  auto r = run_pipeline(g, out, full, mock_model(), opt, "r");
  EXPECT_EQ(r.write_log.size(), r.tree.nodes().size());
  EXPECT_EQ(check_write_order(r.tree, r.write_log), "");
  EXPECT_EQ(slurp(out / r.write_log[0].path), first_doc);
  EXPECT_EQ(json::parse(slurp(out / kMetaDir / "manifest.json"))["state"], "complete");
  fs::remove_all(out);
}
