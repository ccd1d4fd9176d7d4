// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/condense.hpp"

#include <algorithm>
#include <queue>
#include <functional>

namespace codewiki::graph {

std::vector<std::size_t> CondensedGraph::in_degrees() const {
  std::vector<std::size_t> deg(size(), 0);
  for (const auto& succ : successors)
    for (auto t : succ) ++deg[t];
  return deg;
}

std::vector<std::size_t> CondensedGraph::topological_order() const {
  auto deg = in_degrees();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < size(); ++i)
    if (deg[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (auto t : successors[n])
      if (--deg[t] == 0) ready.push(t);
  }
  return order;
}

CondensedGraph condense_cycles(const DependencyGraph& graph) {
  // Iterative Tarjan over ids in sorted order.
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index_of;
  for (const auto& [id, _] : graph.components()) {
    index_of.emplace(id, ids.size());
    ids.push_back(id);
  }
  const std::size_t n = ids.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : graph.edges()) adj[index_of.at(e.from)].push_back(index_of.at(e.to));

  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> sccs;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adj[v].size()) {
        auto w = adj[v][next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> members;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          members.push_back(w);
        } while (w != v);
        sccs.push_back(std::move(members));
      }
      auto done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }

  for (auto& s : sccs) std::sort(s.begin(), s.end());
  std::sort(sccs.begin(), sccs.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });

  CondensedGraph out;
  out.members.resize(sccs.size());
  out.successors.resize(sccs.size());
  for (std::size_t k = 0; k < sccs.size(); ++k) {
    for (auto v : sccs[k]) {
      comp[v] = k;
      out.members[k].push_back(ids[v]);
      out.node_of.emplace(ids[v], k);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    for (auto w : adj[v])
      if (comp[v] != comp[w]) out.successors[comp[v]].push_back(comp[w]);
  for (auto& s : out.successors) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

}  // namespace codewiki::graph
