// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "codewiki/decompose/decompose.hpp"
#include "codewiki/decompose/module_tree.hpp"
#include "codewiki/doc/workspace.hpp"
#include "codewiki/eval/rubric.hpp"
#include "codewiki/eval/scoring.hpp"
#include "codewiki/graph/condense.hpp"
#include "codewiki/graph/extract.hpp"
#include "codewiki/graph/scanner.hpp"
#include "codewiki/graph/types.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace codewiki;

inline fs::path fixtures() { return fs::path(CODEWIKI_FIXTURES); }

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline fs::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  fs::path p = fs::temp_directory_path() / ("codewiki-test-" + tag + "-" + std::to_string(rng()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------- graph gold

inline std::set<std::string> graph_lines(const graph::DependencyGraph& g) {
  std::set<std::string> lines;
  for (const auto& [id, c] : g.components())
    lines.insert("component " + std::string(graph::to_string(c.kind)) + " " + std::to_string(c.span.start_line) + "-" +
                 std::to_string(c.span.end_line) + " " + id);
  for (const auto& e : g.edges())
    lines.insert("edge " + std::string(graph::to_string(e.raw_kind)) + " " + e.from + " -> " + e.to);
  return lines;
}

inline std::set<std::string> gold_lines(const fs::path& file) {
  std::set<std::string> lines;
  std::ifstream in(file);
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.insert(line);
  }
  return lines;
}

inline const std::vector<std::string>& fixture_languages() {
  static const std::vector<std::string> langs{"python", "java", "javascript", "typescript", "c", "cpp", "csharp"};
  return langs;
}

// ------------------------------------------------------------ random graphs

inline graph::DependencyGraph random_graph(std::mt19937_64& rng, std::size_t n, double p,
                                           std::size_t max_tokens = 400) {
  std::vector<graph::CodeComponent> comps;
  std::uniform_int_distribution<std::size_t> tokens(1, max_tokens);
  for (std::size_t i = 0; i < n; ++i) {
    graph::CodeComponent c;
    c.name = "f" + std::to_string(i);
    c.file = "m" + std::to_string(i % 5) + ".py";
    c.id = c.file + "::" + c.name;
    c.span = {i + 1, i + 1};
    c.source = "def " + c.name + "(): pass";
    c.token_count = tokens(rng);
    comps.push_back(std::move(c));
  }
  std::bernoulli_distribution edge(p);
  std::vector<graph::DependencyEdge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && edge(rng)) edges.push_back({comps[a].id, comps[b].id, graph::RawKind::Call});
  return graph::build_graph(std::move(comps), std::move(edges));
}

// Strongly connected components by mutual reachability.
inline std::string check_condensation(const graph::DependencyGraph& g, const graph::CondensedGraph& c) {
  std::vector<std::string> ids;
  for (const auto& [id, _] : g.components()) ids.push_back(id);
  const std::size_t n = ids.size();
  std::map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < n; ++i) at[ids[i]] = i;
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
  for (const auto& e : g.edges()) reach[at[e.from]][at[e.to]] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;

  std::set<std::vector<std::string>> expected;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> group;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j] && reach[j][i]) group.push_back(ids[j]);
    expected.insert(group);
  }
  std::set<std::vector<std::string>> got(c.members.begin(), c.members.end());
  if (got != expected) return "scc membership differs";
  if (got.size() != c.members.size()) return "duplicate scc";

  std::vector<std::set<std::size_t>> want(c.size());
  for (const auto& e : g.edges()) {
    std::size_t a = c.node_of.at(e.from), b = c.node_of.at(e.to);
    if (a != b) want[a].insert(b);
  }
  for (std::size_t k = 0; k < c.size(); ++k)
    if (std::vector<std::size_t>(want[k].begin(), want[k].end()) != c.successors[k]) return "condensed edges differ";

  auto order = c.topological_order();
  if (order.size() != c.size()) return "topological order incomplete";
  std::vector<std::size_t> pos(c.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (std::size_t k = 0; k < c.size(); ++k)
    for (auto s : c.successors[k])
      if (pos[s] <= pos[k]) return "condensation has a back edge";
  return "";
}

// ------------------------------------------------------------ decomposition

inline std::size_t tree_height(const decompose::ModuleNode& n) {
  std::size_t h = 0;
  for (const auto& c : n.children) h = std::max(h, 1 + tree_height(c));
  return h;
}

inline std::string check_decomposition(const graph::DependencyGraph& g, const decompose::ModuleTree& tree,
                                       const decompose::DecomposeOptions& opt) {
  std::vector<std::string> owned;
  std::vector<const decompose::ModuleNode*> stack{&tree.root()};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    if (n->is_leaf()) {
      owned.insert(owned.end(), n->component_ids.begin(), n->component_ids.end());
      std::size_t sum = 0;
      for (const auto& id : n->component_ids) sum += g.find(id)->token_count;
      if (!n->oversized && sum > opt.budget) return "leaf " + n->id + " exceeds the budget";
      if (n->oversized && n->component_ids.size() != 1) return "oversized leaf with several components";
    } else if (!n->component_ids.empty() && n->id != "root") {
      return "internal node " + n->id + " owns components";
    }
    for (const auto& c : n->children) stack.push_back(&c);
  }
  std::sort(owned.begin(), owned.end());
  std::vector<std::string> all;
  for (const auto& [id, _] : g.components()) all.push_back(id);
  if (owned != all) return "component conservation violated";
  if (tree_height(tree.root()) > 1 + opt.max_depth) return "tree deeper than 1 + max_depth";
  return "";
}

// ----------------------------------------------------------- documentation

// Each module appears once, after all of its descendants.
inline std::string check_write_order(const decompose::ModuleTree& tree, const std::vector<doc::WriteLogEntry>& log) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < log.size(); ++i)
    if (!pos.emplace(log[i].module_id, i).second) return "module written twice: " + log[i].module_id;
  std::string err;
  std::function<std::size_t(const decompose::ModuleNode&)> visit = [&](const decompose::ModuleNode& n) -> std::size_t {
    auto it = pos.find(n.id);
    if (it == pos.end()) {
      err = "module never written: " + n.id;
      return 0;
    }
    for (const auto& c : n.children) {
      std::size_t cp = visit(c);
      if (err.empty() && cp >= it->second) err = "child " + c.id + " written after " + n.id;
    }
    return it->second;
  };
  visit(tree.root());
  if (err.empty() && pos.size() != tree.nodes().size()) err = "log has modules not in the tree";
  return err;
}

inline std::string simple_slug(std::string text) {
  std::string out;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) out += static_cast<char>(std::tolower(ch));
    else if (ch == ' ' || ch == '-') out += '-';
    else if (ch == '_') out += '_';
  }
  return out;
}

// Every relative link in every markdown file resolves to a file and, when
// given, to an explicit anchor or a heading.
inline std::vector<std::string> broken_links(const fs::path& root) {
  std::vector<std::string> broken;
  static const std::regex link(R"(\]\(([^)\s]+)\))");
  static const std::regex anchor_tag(R"re(<a id="([^"]+)"></a>)re");
  std::map<fs::path, std::set<std::string>> anchors;
  auto anchors_of = [&](const fs::path& file) -> const std::set<std::string>& {
    auto it = anchors.find(file);
    if (it != anchors.end()) return it->second;
    std::set<std::string> a;
    std::string text = slurp(file);
    for (std::sregex_iterator m(text.begin(), text.end(), anchor_tag), e; m != e; ++m) a.insert((*m)[1]);
    std::istringstream in(text);
    bool fence = false;
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("```", 0) == 0) fence = !fence;
      if (fence || line.empty() || line[0] != '#') continue;
      std::size_t k = line.find_first_not_of('#');
      if (k == std::string::npos || line[k] != ' ') continue;
      a.insert(simple_slug(line.substr(k + 1)));
    }
    return anchors.emplace(file, std::move(a)).first->second;
  };
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".md") continue;
    std::string text = slurp(entry.path());
    std::string body;
    std::istringstream in(text);
    bool fence = false;
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("```", 0) == 0) fence = !fence;
      else if (!fence) body += line + "\n";
    }
    for (std::sregex_iterator m(body.begin(), body.end(), link), e; m != e; ++m) {
      std::string target = (*m)[1];
      if (target.find("://") != std::string::npos || target.rfind("mailto:", 0) == 0) continue;
      std::string file = target, frag;
      if (auto h = target.find('#'); h != std::string::npos) {
        file = target.substr(0, h);
        frag = target.substr(h + 1);
      }
      fs::path dest = file.empty() ? entry.path() : (entry.path().parent_path() / file).lexically_normal();
      if (!fs::is_regular_file(dest)) {
        broken.push_back(fs::relative(entry.path(), root).string() + " -> " + target);
        continue;
      }
      if (!frag.empty() && !anchors_of(dest).count(frag))
        broken.push_back(fs::relative(entry.path(), root).string() + " -> " + target);
    }
  }
  return broken;
}

inline std::map<std::string, std::string> tree_snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).generic_string()] = slurp(entry.path());
  return files;
}

// ----------------------------------------------------------------- rubrics

inline eval::RubricNode random_rubric(std::mt19937_64& rng, std::size_t max_levels = 4, std::size_t max_leaves = 20,
                                      bool integer_weights = false) {
  std::uniform_real_distribution<double> real_w(0.1, 10.0);
  std::uniform_int_distribution<int> int_w(1, 5);
  std::size_t leaves = 0;
  int counter = 0;
  std::function<eval::RubricNode(std::size_t)> build = [&](std::size_t level) {
    eval::RubricNode n;
    n.name = "n" + std::to_string(counter++);
    n.weight = integer_weights ? int_w(rng) : real_w(rng);
    std::uniform_int_distribution<int> fan(0, 4);
    int k = level + 1 >= max_levels || leaves + 1 >= max_leaves ? 0 : fan(rng);
    if (level == 0 && k == 0 && max_levels > 1 && max_leaves > 1) k = 1;
    for (int i = 0; i < k && leaves < max_leaves; ++i) n.children.push_back(build(level + 1));
    if (n.children.empty()) {
      n.requirement = "requirement " + n.name;
      ++leaves;
    }
    return n;
  };
  return build(0);
}

inline std::map<std::string, eval::LeafScore> random_leaf_scores(std::mt19937_64& rng, const eval::RubricNode& r) {
  std::map<std::string, eval::LeafScore> out;
  std::uniform_int_distribution<int> judges(1, 5);
  std::bernoulli_distribution coin(0.6);
  for (const auto& leaf : eval::rubric_leaves(r)) {
    std::vector<int> v(static_cast<std::size_t>(judges(rng)));
    for (auto& s : v) s = coin(rng) ? 1 : 0;
    out[leaf.path] = eval::score_leaf(v);
  }
  return out;
}

// Flat recomputation: each leaf contributes the product of normalized
// weights along its path.
inline eval::AggregateScore flat_aggregate(const eval::RubricNode& root,
                                           const std::map<std::string, eval::LeafScore>& scores) {
  double s = 0.0, var = 0.0;
  std::function<void(const eval::RubricNode&, const std::string&, double)> walk = [&](const eval::RubricNode& n,
                                                                                      const std::string& path,
                                                                                      double factor) {
    if (n.children.empty()) {
      const auto& ls = scores.at(path);
      s += factor * ls.mean;
      var += factor * factor * ls.sigma * ls.sigma;
      return;
    }
    double w = 0.0;
    for (const auto& c : n.children) w += c.weight;
    for (std::size_t i = 0; i < n.children.size(); ++i)
      walk(n.children[i], path + "/" + std::to_string(i), factor * n.children[i].weight / w);
  };
  walk(root, "root", 1.0);
  return {s, std::sqrt(var)};
}

}  // namespace testsupport
