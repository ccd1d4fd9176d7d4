// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "codewiki/agent/mock_backend.hpp"
#include "codewiki/core/error.hpp"
#include "codewiki/decompose/llm_partitioner.hpp"
#include "support.hpp"

using namespace codewiki;
using namespace testsupport;
using decompose::ModuleTree;
using decompose::SubmoduleSpec;

namespace {

decompose::ModuleTree decompose_graph(const graph::DependencyGraph& g, const decompose::DecomposeOptions& opt,
                                      decompose::Partitioner* primary = nullptr,
                                      decompose::DecomposeDiagnostics* diag = nullptr) {
  auto dag = graph::condense_cycles(g);
  return decompose::decompose(g, decompose::find_entry_points(dag), opt, primary, diag);
}

ModuleTree three_leaf_tree() {
  ModuleTree t;
  decompose::ModuleNode leaf;
  leaf.id = "root/m";
  leaf.name = "m";
  leaf.component_ids = {"a", "b", "c"};
  t.root().children.push_back(leaf);
  return t;
}

}  // namespace

TEST(Decompose, InvariantsOnRandomGraphs) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(0, 120);
  std::uniform_real_distribution<double> density(0.0, 0.08);
  std::uniform_int_distribution<std::size_t> budget(200, 3000);
  std::uniform_int_distribution<std::size_t> depth(1, 4);
  for (int iter = 0; iter < 200; ++iter) {
    auto g = random_graph(rng, size(rng), density(rng), 600);
    decompose::DecomposeOptions opt;
    opt.budget = budget(rng);
    opt.max_depth = depth(rng);
    auto tree = decompose_graph(g, opt);
    ASSERT_EQ(check_decomposition(g, tree, opt), "") << "iteration " << iter;
    EXPECT_NO_THROW(tree.validate(opt.max_depth + 1));
  }
}

TEST(Decompose, DeterministicAcrossRuns) {
  std::mt19937_64 rng(3);
  auto g = random_graph(rng, 60, 0.05);
  decompose::DecomposeOptions opt;
  opt.budget = 800;
  EXPECT_EQ(decompose_graph(g, opt), decompose_graph(g, opt));
}

TEST(Decompose, SmallRepositoryIsOneModule) {
  std::mt19937_64 rng(5);
  auto g = random_graph(rng, 6, 0.2, 10);
  auto tree = decompose_graph(g, {});
  ASSERT_EQ(tree.root().children.size(), 1u);
  EXPECT_EQ(tree.root().children[0].component_ids.size(), 6u);
}

TEST(Decompose, OversizedComponentGetsItsOwnLeaf) {
  std::vector<graph::CodeComponent> comps(3);
  for (int i = 0; i < 3; ++i) {
    comps[i].id = "a.py::f" + std::to_string(i);
    comps[i].token_count = i == 1 ? 5000 : 10;
  }
  auto g = graph::build_graph(comps, {});
  decompose::DecomposeOptions opt;
  opt.budget = 100;
  auto tree = decompose_graph(g, opt);
  bool found = false;
  for (const auto* leaf : tree.leaves())
    if (leaf->oversized) {
      found = true;
      EXPECT_EQ(leaf->component_ids, (std::vector<std::string>{"a.py::f1"}));
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(check_decomposition(g, tree, opt), "");
}

TEST(Decompose, EmptyGraphGivesEmptyRoot) {
  auto tree = decompose_graph(graph::build_graph({}, {}), {});
  EXPECT_TRUE(tree.root().children.empty());
  EXPECT_TRUE(tree.root().component_ids.empty());
}

TEST(UpdateTree, ReplacesLeafWithChildren) {
  auto t = three_leaf_tree();
  decompose::update_tree(t, "root/m", {{"x", {"a"}}, {"y", {"b", "c"}}}, 3);
  const auto* m = t.find("root/m");
  ASSERT_EQ(m->children.size(), 2u);
  EXPECT_TRUE(m->component_ids.empty());
  EXPECT_EQ(m->children[0].id, "root/m/x");
  EXPECT_EQ(m->children[1].component_ids, (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(t.depth_of("root/m/y"), 2u);
  EXPECT_EQ(t.parent_of("root/m/y"), "root/m");
}

TEST(UpdateTree, RejectsBadPartitionsAndLeavesTreeUnchanged) {
  const auto original = three_leaf_tree();
  auto t = original;
  EXPECT_THROW(decompose::update_tree(t, "root/m", {{"x", {"a"}}, {"y", {"b"}}}, 3), ValidationError);
  EXPECT_THROW(decompose::update_tree(t, "root/m", {{"x", {"a", "b"}}, {"y", {"b", "c"}}}, 3), ValidationError);
  EXPECT_THROW(decompose::update_tree(t, "root/m", {{"x", {"a", "b", "c", "d"}}}, 3), ValidationError);
  EXPECT_THROW(decompose::update_tree(t, "root/nope", {{"x", {"a"}}}, 3), ValidationError);
  EXPECT_THROW(decompose::update_tree(t, "root/m", {{"x", {"a"}}, {"y", {"b", "c"}}}, 1), ValidationError);
  EXPECT_EQ(t, original);
}

TEST(ModuleTree, JsonRoundTripAndOrders) {
  auto t = three_leaf_tree();
  decompose::update_tree(t, "root/m", {{"x", {"a"}}, {"y", {"b", "c"}}}, 3);
  t.find("root/m/x")->status = decompose::ModuleStatus::Documented;
  EXPECT_EQ(ModuleTree::from_json(t.to_json()), t);
  std::vector<std::string> post;
  for (const auto* n : t.post_order()) post.push_back(n->id);
  EXPECT_EQ(post, (std::vector<std::string>{"root/m/x", "root/m/y", "root/m", "root"}));
  EXPECT_EQ(t.all_components(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ModuleTree, ChildIdsAreUniqueAndPathSafe) {
  decompose::ModuleNode parent;
  parent.id = "root";
  decompose::ModuleNode c;
  c.id = "root/core";
  parent.children.push_back(c);
  auto id = decompose::child_id(parent, "core");
  EXPECT_NE(id, "root/core");
  auto odd = decompose::child_id(parent, "../evil name");
  EXPECT_EQ(odd.find(".."), std::string::npos);
  EXPECT_EQ(odd.rfind("root/", 0), 0u);
}

TEST(Partition, ValidatePartitionRejectsOverlap) {
  decompose::PartitionInput in;
  in.component_ids = {"a", "b"};
  in.token_counts = {{"a", 1}, {"b", 1}};
  EXPECT_NO_THROW(decompose::validate_partition(in, {{"g1", {"a"}}, {"g2", {"b"}}}));
  EXPECT_THROW(decompose::validate_partition(in, {{"g1", {"a", "b"}}, {"g2", {"b"}}}), ValidationError);
  EXPECT_THROW(decompose::validate_partition(in, {{"g1", {"a"}}}), ValidationError);
}

TEST(Partition, LlmPartitionerProposalIsUsed) {
  std::vector<graph::CodeComponent> comps(4);
  for (int i = 0; i < 4; ++i) {
    comps[i].id = "a.py::f" + std::to_string(i);
    comps[i].token_count = 60;
  }
  auto g = graph::build_graph(comps, {});
  agent::MockBackend mock;
  nlohmann::json groups = nlohmann::json::array();
  groups.push_back({{"name", "left"}, {"component_ids", {"a.py::f0", "a.py::f3"}}});
  groups.push_back({{"name", "right"}, {"component_ids", {"a.py::f1", "a.py::f2"}}});
  agent::ScriptedTurn propose;
  propose.tool_calls.push_back({"propose_partition", {{"groups", groups}}});
  mock.add_script("partitioner", "root", {propose, {"ok", {}}});
  agent::ModelConfig model;
  model.name = "gen";
  model.provider = "mock";
  decompose::LlmPartitioner llm(mock, model);
  decompose::DecomposeOptions opt;
  opt.budget = 150;
  decompose::DecomposeDiagnostics diag;
  auto tree = decompose_graph(g, opt, &llm, &diag);
  ASSERT_EQ(tree.root().children.size(), 2u);
  EXPECT_EQ(tree.root().children[0].name, "left");
  EXPECT_EQ(tree.root().children[0].component_ids, (std::vector<std::string>{"a.py::f0", "a.py::f3"}));
  EXPECT_TRUE(diag.fallbacks.empty());
  EXPECT_EQ(check_decomposition(g, tree, opt), "");
}

TEST(Partition, LlmFailureFallsBackToGreedy) {
  std::vector<graph::CodeComponent> comps(4);
  for (int i = 0; i < 4; ++i) {
    comps[i].id = "a.py::f" + std::to_string(i);
    comps[i].token_count = 60;
  }
  auto g = graph::build_graph(comps, {});
  agent::MockBackend mock;  // no scripts: every call fails
  agent::ModelConfig model;
  model.name = "gen";
  model.provider = "mock";
  decompose::LlmPartitioner llm(mock, model);
  decompose::DecomposeOptions opt;
  opt.budget = 150;
  decompose::DecomposeDiagnostics diag;
  auto tree = decompose_graph(g, opt, &llm, &diag);
  EXPECT_FALSE(diag.fallbacks.empty());
  EXPECT_EQ(check_decomposition(g, tree, opt), "");
  decompose::GreedyPartitioner greedy;
  EXPECT_EQ(tree, decompose_graph(g, opt, &greedy));
}
