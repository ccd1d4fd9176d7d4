// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <json.hpp>

#include "codewiki/core/error.hpp"
#include "codewiki/graph/serialize.hpp"
#include "codewiki/graph/tokenizer.hpp"
#include "support.hpp"

using namespace codewiki;
using namespace testsupport;

class GoldFixture : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldFixture, ComponentsAndEdgesMatchGold) {
  const auto dir = fixtures() / "lang" / GetParam();
  auto scan = graph::scan_repository(dir);
  ASSERT_FALSE(scan.units.empty());
  auto result = graph::analyze_units(scan.units);
  EXPECT_TRUE(result.diagnostics.empty());
  auto got = graph_lines(result.graph);
  auto want = gold_lines(fixtures() / "lang" / (GetParam() + ".gold"));
  std::vector<std::string> missing, extra;
  std::set_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(missing));
  std::set_difference(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(extra));
  for (const auto& l : missing) ADD_FAILURE() << "missing: " << l;
  for (const auto& l : extra) ADD_FAILURE() << "unexpected: " << l;
}

TEST_P(GoldFixture, FixtureIsSmall) {
  std::size_t lines = 0;
  for (const auto& u : graph::scan_repository(fixtures() / "lang" / GetParam()).units)
    lines += static_cast<std::size_t>(std::count(u.content.begin(), u.content.end(), '\n'));
  EXPECT_LE(lines, 200u);
}

INSTANTIATE_TEST_SUITE_P(Languages, GoldFixture, ::testing::ValuesIn(fixture_languages()));

TEST(Condense, MatchesReachabilityOracleOnRandomGraphs) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(0, 50);
  std::uniform_real_distribution<double> density(0.0, 0.12);
  for (int iter = 0; iter < 1000; ++iter) {
    auto g = random_graph(rng, size(rng), density(rng));
    auto c = graph::condense_cycles(g);
    ASSERT_EQ(check_condensation(g, c), "") << "iteration " << iter;
  }
}

TEST(Condense, TwoCycleCollapses) {
  std::vector<graph::CodeComponent> comps(3);
  for (int i = 0; i < 3; ++i) {
    comps[i].id = "a.py::f" + std::to_string(i);
    comps[i].name = "f" + std::to_string(i);
    comps[i].file = "a.py";
  }
  auto g = graph::build_graph(comps, {{"a.py::f0", "a.py::f1", graph::RawKind::Call},
                                      {"a.py::f1", "a.py::f0", graph::RawKind::Call},
                                      {"a.py::f1", "a.py::f2", graph::RawKind::Call}});
  auto c = graph::condense_cycles(g);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.members[0], (std::vector<std::string>{"a.py::f0", "a.py::f1"}));
  EXPECT_EQ(c.in_degrees(), (std::vector<std::size_t>{0, 1}));
  auto ep = decompose::find_entry_points(c);
  EXPECT_EQ(ep.component_ids, (std::vector<std::string>{"a.py::f0", "a.py::f1"}));
}

TEST(BuildGraph, DropsSelfLoopsAndDuplicates) {
  std::vector<graph::CodeComponent> comps(2);
  comps[0].id = "x::a";
  comps[1].id = "x::b";
  auto g = graph::build_graph(comps, {{"x::a", "x::a", graph::RawKind::Call},
                                      {"x::a", "x::b", graph::RawKind::Import},
                                      {"x::a", "x::b", graph::RawKind::Call}});
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges()[0].raw_kind, graph::RawKind::Import);
  EXPECT_THROW(graph::build_graph(comps, {{"x::a", "x::zzz", graph::RawKind::Call}}), InvariantError);
}

TEST(Scanner, IgnoresVendoredAndHiddenFiles) {
  auto dir = temp_dir("scan");
  fs::create_directories(dir / "node_modules" / "lib");
  fs::create_directories(dir / ".hidden");
  fs::create_directories(dir / "src");
  std::ofstream(dir / "node_modules" / "lib" / "x.js") << "function x() {}\n";
  std::ofstream(dir / ".hidden" / "y.py") << "def y():\n    pass\n";
  std::ofstream(dir / "src" / "z.py") << "def z():\n    pass\n";
  std::ofstream(dir / "src" / "gen.py") << "def g():\n    pass\n";
  std::ofstream(dir / "README.md") << "# readme\n";
  graph::ScanOptions opt;
  opt.ignore.push_back("gen.py");
  auto r = graph::scan_repository(dir, opt);
  ASSERT_EQ(r.units.size(), 1u);
  EXPECT_EQ(r.units[0].path, "src/z.py");
  EXPECT_EQ(r.units[0].language, graph::Language::Python);
  fs::remove_all(dir);
}

TEST(Scanner, MissingRootThrows) {
  EXPECT_THROW(graph::scan_repository("/nonexistent/codewiki/root"), IoError);
}

TEST(Scanner, GlobPatterns) {
  EXPECT_TRUE(graph::glob_match("*.py", "a.py"));
  EXPECT_TRUE(graph::glob_match("**/test_*.py", "x/y/test_a.py"));
  EXPECT_FALSE(graph::glob_match("src/*.py", "src/a/b.py"));
  graph::IgnoreMatcher m({"build/", "*.log", "!keep.log"});
  EXPECT_TRUE(m.ignored("build", true));
  EXPECT_FALSE(m.ignored("build", false));
  EXPECT_TRUE(m.ignored("x/debug.log", false));
  EXPECT_FALSE(m.ignored("keep.log", false));
}

TEST(Serialize, RoundTripIsExact) {
  auto scan = graph::scan_repository(fixtures() / "lang" / "python");
  auto g = graph::analyze_units(scan.units).graph;
  auto text = graph::export_graph(g);
  auto back = graph::import_graph(text);
  EXPECT_EQ(back, g);
  EXPECT_EQ(graph::export_graph(back), text);
  EXPECT_EQ(nlohmann::json::parse(text).at("schema_version"), 1);
}

TEST(Serialize, RejectsDanglingEdgesAndBadSchema) {
  nlohmann::json doc = {{"schema_version", 1},
                        {"components", nlohmann::json::array()},
                        {"edges", {{{"from", "a"}, {"to", "b"}, {"raw_kind", "call"}}}}};
  EXPECT_THROW(graph::graph_from_json(doc), Error);
  doc["schema_version"] = 9;
  EXPECT_THROW(graph::graph_from_json(doc), ValidationError);
}

TEST(Tokenizer, ApproximationIsDeterministicAndMonotone) {
  const auto& tok = graph::default_tokenizer();
  EXPECT_EQ(tok.count(""), 0u);
  EXPECT_EQ(tok.count("abcd"), 1u);
  EXPECT_EQ(tok.count("abcde"), 2u);
  std::string s = "def f(x):\n    return x + 1\n";
  EXPECT_EQ(tok.count(s), tok.count(s));
  EXPECT_LT(tok.count(s), tok.count(s + s));
}

TEST(Extract, ParseFailureYieldsDiagnostic) {
  graph::SourceUnit u{"bad.js", graph::Language::JavaScript, "function f() { if (x) { \n"};
  auto r = graph::extract_components(u);
  EXPECT_TRUE(r.components.empty());
  EXPECT_FALSE(r.diagnostics.empty());
}
