// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <chrono>
#include <json.hpp>

#include "codewiki/agent/backends.hpp"
#include "codewiki/agent/mock_backend.hpp"
#include "codewiki/core/error.hpp"
#include "codewiki/eval/doc_structure.hpp"
#include "codewiki/eval/evaluate.hpp"
#include "codewiki/eval/generate.hpp"
#include "support.hpp"

using namespace codewiki;
using namespace codewiki::eval;
using namespace testsupport;
using agent::MockBackend;
using nlohmann::json;

namespace {

agent::ModelConfig judge(const std::string& name) {
  agent::ModelConfig m;
  m.name = name;
  m.provider = "mock";
  return m;
}

RubricNode leaf(const std::string& name, double w) {
  RubricNode n;
  n.name = name;
  n.weight = w;
  n.requirement = "req " + name;
  return n;
}

}  // namespace

TEST(Scoring, LeafExamples) {
  auto s = score_leaf(std::vector<int>{1, 0, 1});
  EXPECT_NEAR(s.mean, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.sigma, std::sqrt(1.0 / 3.0), 1e-12);
  EXPECT_NEAR(s.mean, 0.6667, 1e-4);
  EXPECT_NEAR(s.sigma, 0.5774, 1e-4);
  EXPECT_EQ(s.m, 3u);
  auto one = score_leaf(std::vector<int>{1});
  EXPECT_EQ(one.sigma, 0.0);
  EXPECT_TRUE(one.low_confidence);
  EXPECT_THROW(score_leaf(std::vector<int>{}), ValidationError);
  EXPECT_THROW(score_leaf(std::vector<int>{2}), ValidationError);
}

TEST(Scoring, PropagationExamples) {
  auto sig = combine({{1.0, {0.5, 0.1}}, {1.0, {0.5, 0.2}}});
  EXPECT_NEAR(sig.sigma, std::sqrt(0.01 + 0.04) / 2.0, 1e-12);
  EXPECT_NEAR(sig.sigma, 0.1118, 1e-4);
  auto mean = combine({{2.0, {1.0, 0.0}}, {1.0, {0.0, 0.0}}});
  EXPECT_NEAR(mean.score, 0.6667, 1e-4);
  EXPECT_THROW(combine({}), InvariantError);
  EXPECT_THROW(combine({{0.0, {1.0, 0.0}}}), InvariantError);
}

TEST(Scoring, ExcludedVerdictsCountAsZeroButNotInSigma) {
  std::vector<JudgeVerdict> v{{"a", 1, "", false}, {"b", 1, "", false}, {"c", 0, kJudgeFormatFailure, true}};
  auto s = score_leaf(v);
  EXPECT_NEAR(s.mean, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(s.sigma, 0.0);
  EXPECT_FALSE(s.low_confidence);
  v[1].excluded = true;
  v[1].score = 0;
  EXPECT_TRUE(score_leaf(v).low_confidence);
}

TEST(Scoring, AggregateMatchesFlatOracle) {
  std::mt19937_64 rng(17);
  auto start = std::chrono::steady_clock::now();
  for (int iter = 0; iter < 500; ++iter) {
    auto r = random_rubric(rng);
    ASSERT_LE(rubric_depth(r), 4u);
    ASSERT_LE(rubric_leaves(r).size(), 20u);
    auto scores = random_leaf_scores(rng, r);
    std::map<std::string, AggregateScore> nodes;
    auto got = aggregate(r, scores, &nodes);
    auto want = flat_aggregate(r, scores);
    ASSERT_NEAR(got.score, want.score, 1e-12) << iter;
    ASSERT_NEAR(got.sigma, want.sigma, 1e-12) << iter;
    ASSERT_EQ(nodes.size(), rubric_size(r));
    ASSERT_GE(got.score, 0.0);
    ASSERT_LE(got.score, 1.0);
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
}

TEST(Scoring, AggregateProperties) {
  RubricNode root;
  root.name = "r";
  root.children = {leaf("a", 3), leaf("b", 1)};
  std::map<std::string, LeafScore> all_one{{"root/0", {1, 0, 3, false}}, {"root/1", {1, 0, 3, false}}};
  auto s = aggregate(root, all_one);
  EXPECT_DOUBLE_EQ(s.score, 1.0);
  EXPECT_DOUBLE_EQ(s.sigma, 0.0);
  // Scaling all sibling weights leaves the result unchanged.
  auto scaled = root;
  for (auto& c : scaled.children) c.weight *= 7.5;
  std::map<std::string, LeafScore> mixed{{"root/0", {0.25, 0.3, 3, false}}, {"root/1", {0.75, 0.1, 3, false}}};
  EXPECT_NEAR(aggregate(root, mixed).score, aggregate(scaled, mixed).score, 1e-12);
  EXPECT_NEAR(aggregate(root, mixed).sigma, aggregate(scaled, mixed).sigma, 1e-12);
  mixed.erase("root/1");
  EXPECT_THROW(aggregate(root, mixed), ValidationError);
  EXPECT_TRUE(covered({0.6667, 0, 3, false}));
  EXPECT_FALSE(covered({0.5, 0, 2, false}));
}

TEST(Rubric, JsonRoundTripAndValidation) {
  auto r = load_rubric((fixtures() / "eval" / "rubric5.json").string());
  EXPECT_EQ(rubric_leaves(r).size(), 5u);
  EXPECT_EQ(rubric_depth(r), 3u);
  EXPECT_EQ(rubric_size(r), 8u);
  EXPECT_EQ(rubric_leaves(r)[4].path, "root/1/1");
  auto j = rubric_to_json(r);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(rubric_from_json(j), r);
  j.erase("schema_version");
  EXPECT_EQ(rubric_from_json(j), r);

  EXPECT_THROW(rubric_from_json(json::parse(R"({"name":"x","weight":1})")), ValidationError);
  EXPECT_THROW(rubric_from_json(json::parse(R"({"name":"x","weight":-1,"requirement":"r"})")), ValidationError);
  EXPECT_THROW(rubric_from_json(json::parse(R"({"name":"x","weight":1,"requirement":"r",
      "children":[{"name":"y","weight":1,"requirement":"q"}]})")), ValidationError);
  // Extra descriptive keys from generators are tolerated.
  EXPECT_EQ(rubric_from_json(json::parse(R"({"name":"x","weight":1,"requirement":"r","note":"n"})")).name, "x");
}

TEST(DocStructure, ParsesCorpus) {
  auto docs = parse_official_docs(fixtures() / "eval" / "docs");
  ASSERT_FALSE(docs.empty());
  auto j = docs.to_json();
  EXPECT_EQ(j.dump().find("quantity times price"), std::string::npos);
  EXPECT_NE(j.dump().find("Data model"), std::string::npos);
  EXPECT_EQ(j.dump().find("notes.txt"), std::string::npos);
  auto hits = docs.search("QUANTITY price");
  ASSERT_FALSE(hits.empty());
  bool found = false;
  for (const auto& id : hits) found = found || docs.fetch(id)->find("quantity times price") != std::string::npos;
  EXPECT_TRUE(found);
  EXPECT_FALSE(docs.fetch("d999"));
  EXPECT_TRUE(docs.search("zebra").empty());
}

TEST(Judge, ParsesVerdicts) {
  EXPECT_EQ(parse_verdict(R"(Sure. {"score": 1, "reasoning": "ok"})", "a")->score, 1);
  EXPECT_EQ(parse_verdict("```json\n{\"score\": false}\n```", "a")->score, 0);
  EXPECT_FALSE(parse_verdict(R"({"score": 0.5})", "a"));
  EXPECT_FALSE(parse_verdict("no idea", "a"));
}

TEST(Judge, FormatFailureAfterOneRepromptIsExcluded) {
  auto docs = parse_official_docs(fixtures() / "eval" / "docs");
  MockBackend mock;
  mock.add_script("judge/a", "root/0", {{"hmm", {}}, {"still prose", {}}});
  mock.add_script("judge/b", "root/0", {{"hmm", {}}, {R"({"score": 1})", {}}});
  auto l = leaf("x", 1);
  auto va = judge_leaf(l, "root/0", docs, judge("a"), mock);
  EXPECT_TRUE(va.excluded);
  EXPECT_EQ(va.score, 0);
  EXPECT_EQ(va.reasoning, kJudgeFormatFailure);
  auto vb = judge_leaf(l, "root/0", docs, judge("b"), mock);
  EXPECT_FALSE(vb.excluded);
  EXPECT_EQ(vb.score, 1);
  RubricNode internal;
  internal.children = {l};
  EXPECT_THROW(judge_leaf(internal, "root", docs, judge("a"), mock), InvariantError);
}

TEST(Evaluate, AllJudgesAgree) {
  auto rubric = load_rubric((fixtures() / "eval" / "rubric5.json").string());
  auto mock = MockBackend::from_directory(fixtures() / "eval" / "agree");
  agent::SingleBackend backends(mock);
  auto r = evaluate(fixtures() / "eval" / "docs", rubric, {judge("a"), judge("b"), judge("c")}, backends);
  EXPECT_DOUBLE_EQ(r.overall.score, 1.0);
  EXPECT_DOUBLE_EQ(r.overall.sigma, 0.0);
  EXPECT_EQ(r.covered, 5u);
  EXPECT_EQ(r.total, 5u);
  auto j = r.to_json();
  EXPECT_EQ(j["coverage"]["covered"], 5);
  EXPECT_EQ(j["schema_version"], 1);
}

TEST(Evaluate, TwoVersusOneSplitsWithThreads) {
  auto rubric = load_rubric((fixtures() / "eval" / "rubric5.json").string());
  auto mock = MockBackend::from_directory(fixtures() / "eval" / "split");
  agent::SingleBackend backends(mock);
  EvaluateOptions opt;
  opt.threads = 4;
  auto r = evaluate(fixtures() / "eval" / "docs", rubric, {judge("a"), judge("b"), judge("c")}, backends, opt);
  ASSERT_EQ(r.leaves.size(), 5u);
  std::map<std::string, LeafScore> oracle;
  for (const auto& l : r.leaves) {
    EXPECT_NEAR(l.score.mean, 0.6667, 1e-4) << l.path;
    EXPECT_NEAR(l.score.sigma, std::sqrt(1.0 / 3.0), 1e-12);
    EXPECT_TRUE(l.covered);
    ASSERT_EQ(l.verdicts.size(), 3u);
    EXPECT_EQ(l.verdicts[2].judge, "c");
    oracle[l.path] = score_leaf(std::vector<int>{1, 1, 0});
  }
  EXPECT_EQ(r.covered, 5u);
  auto want = flat_aggregate(rubric, oracle);
  EXPECT_NEAR(r.overall.score, want.score, 1e-12);
  EXPECT_NEAR(r.overall.sigma, want.sigma, 1e-12);
}

TEST(Evaluate, RequiresJudges) {
  auto rubric = load_rubric((fixtures() / "eval" / "rubric5.json").string());
  MockBackend mock;
  agent::SingleBackend backends(mock);
  EXPECT_THROW(evaluate(fixtures() / "eval" / "docs", rubric, {}, backends), ValidationError);
}

TEST(Generate, SingleGeneratorPassesThrough) {
  auto docs = parse_official_docs(fixtures() / "eval" / "docs");
  auto mock = MockBackend::from_directory(fixtures() / "eval" / "generators");
  agent::SingleBackend backends(mock);
  auto g = generate_rubric(docs, {judge("g1")}, backends);
  EXPECT_EQ(g.candidates.size(), 1u);
  EXPECT_EQ(g.rubric, g.candidates[0]);
  EXPECT_EQ(rubric_leaves(g.rubric).size(), 2u);
}

TEST(Generate, FailingGeneratorDroppedAndSynthesisUsed) {
  auto docs = parse_official_docs(fixtures() / "eval" / "docs");
  auto mock = MockBackend::from_directory(fixtures() / "eval" / "generators");
  mock.add_script("rubric_synthesizer", "docs",
                  {{R"({"name":"docs","weight":1,"children":[{"name":"All","weight":1,"requirement":"Everything."}]})", {}}});
  agent::SingleBackend backends(mock);
  auto g = generate_rubric(docs, {judge("g1"), judge("bad"), judge("g2")}, backends);
  EXPECT_EQ(g.candidates.size(), 2u);
  ASSERT_EQ(g.diagnostics.size(), 1u);
  EXPECT_NE(g.diagnostics[0].find("bad"), std::string::npos);
  EXPECT_EQ(g.rubric.children.size(), 1u);
  EXPECT_EQ(g.rubric.children[0].name, "All");
}

TEST(Generate, InvalidSynthesisFallsBackToMerge) {
  auto docs = parse_official_docs(fixtures() / "eval" / "docs");
  auto mock = MockBackend::from_directory(fixtures() / "eval" / "generators");
  mock.add_script("rubric_synthesizer", "docs", {{"nope", {}}, {"still nope", {}}});
  agent::SingleBackend backends(mock);
  auto g = generate_rubric(docs, {judge("g1"), judge("g2")}, backends);
  EXPECT_EQ(g.rubric, merge_rubrics(g.candidates));
  // "Model" and "model" merge; weights average.
  ASSERT_EQ(g.rubric.children.size(), 3u);
  EXPECT_DOUBLE_EQ(g.rubric.children[0].weight, 3.0);
  EXPECT_EQ(rubric_leaves(g.rubric).size(), 4u);
}

TEST(Generate, AllGeneratorsFailing) {
  auto docs = parse_official_docs(fixtures() / "eval" / "docs");
  auto mock = MockBackend::from_directory(fixtures() / "eval" / "generators");
  agent::SingleBackend backends(mock);
  EXPECT_THROW(generate_rubric(docs, {judge("bad")}, backends), RemoteModelError);
}
