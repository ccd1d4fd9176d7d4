// SPDX-License-Identifier: Apache-2.0
#include "codewiki/decompose/decompose.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "codewiki/core/error.hpp"

namespace codewiki::decompose {

EntryPointSet find_entry_points(const graph::CondensedGraph& dag) {
  EntryPointSet out;
  auto deg = dag.in_degrees();
  for (std::size_t i = 0; i < dag.size(); ++i) {
    if (deg[i] != 0) continue;
    out.scc_nodes.push_back(i);
    out.component_ids.insert(out.component_ids.end(), dag.members[i].begin(), dag.members[i].end());
  }
  std::sort(out.component_ids.begin(), out.component_ids.end());
  return out;
}

std::size_t estimate_tokens(const std::vector<std::string>& component_ids, const graph::DependencyGraph& graph) {
  std::size_t total = 0;
  for (const auto& id : component_ids) {
    const auto* c = graph.find(id);
    if (!c) throw InvariantError("estimate_tokens: unknown component '" + id + "'");
    total += c->token_count;
  }
  return total;
}

namespace {

struct Cluster {
  std::vector<std::size_t> members;
  std::size_t weight = 0;
  std::size_t version = 0;
  bool alive = true;
  std::map<std::size_t, std::size_t> links;  // neighbor cluster -> edge count
};

// Greedy agglomeration inside one connected component.
std::vector<std::vector<std::size_t>> agglomerate(const std::vector<std::size_t>& comp,
                                                  const std::vector<std::size_t>& weight,
                                                  const std::vector<std::map<std::size_t, std::size_t>>& adj,
                                                  std::size_t cap) {
  std::map<std::size_t, Cluster> clusters;  // keyed by smallest member (ids are sorted, so index order = id order)
  for (auto v : comp) {
    Cluster c;
    c.members = {v};
    c.weight = weight[v];
    clusters.emplace(v, std::move(c));
  }
  for (auto v : comp)
    for (const auto& [u, cnt] : adj[v]) clusters[v].links[u] += cnt;

  // (-edge count, combined weight, a, b, version a, version b)
  using Key = std::tuple<long long, std::size_t, std::size_t, std::size_t, std::size_t, std::size_t>;
  std::set<Key> queue;
  auto push = [&](std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    const auto& ca = clusters.at(a);
    const auto& cb = clusters.at(b);
    if (ca.weight + cb.weight > cap) return;
    queue.emplace(-static_cast<long long>(ca.links.at(b)), ca.weight + cb.weight, a, b, ca.version, cb.version);
  };
  for (const auto& [a, c] : clusters)
    for (const auto& [b, _] : c.links)
      if (a < b) push(a, b);

  while (!queue.empty()) {
    auto [neg, w, a, b, va, vb] = *queue.begin();
    queue.erase(queue.begin());
    auto& ca = clusters.at(a);
    auto& cb = clusters.at(b);
    if (!ca.alive || !cb.alive || ca.version != va || cb.version != vb) continue;
    // merge b into a (a has the smaller representative)
    ca.members.insert(ca.members.end(), cb.members.begin(), cb.members.end());
    ca.weight += cb.weight;
    ++ca.version;
    cb.alive = false;
    ca.links.erase(b);
    for (const auto& [n, cnt] : cb.links) {
      if (n == a) continue;
      ca.links[n] += cnt;
      auto& cn = clusters.at(n);
      cn.links.erase(b);
      cn.links[a] = ca.links[n];
    }
    cb.links.clear();
    for (const auto& [n, _] : ca.links) push(a, n);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [_, c] : clusters) {
    if (!c.alive) continue;
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c.members));
  }
  return out;
}

}  // namespace

std::vector<SubmoduleSpec> GreedyPartitioner::partition(const PartitionInput& input) {
  const auto& ids = input.component_ids;
  const std::size_t n = ids.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(ids[i], i);
  std::vector<std::size_t> weight(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = input.token_counts.find(ids[i]);
    weight[i] = it == input.token_counts.end() ? 0 : it->second;
  }
  const std::size_t total = std::accumulate(weight.begin(), weight.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> clusters;
  if (total <= input.capacity || n <= 1) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    if (n) clusters.push_back(std::move(all));
  } else {
    std::vector<std::map<std::size_t, std::size_t>> adj(n);
    for (const auto& [f, t] : input.edges) {
      auto a = index.find(f), b = index.find(t);
      if (a == index.end() || b == index.end() || a->second == b->second) continue;
      ++adj[a->second][b->second];
      ++adj[b->second][a->second];
    }
    std::vector<bool> seen(n, false);
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      std::vector<std::size_t> comp, stack{s};
      seen[s] = true;
      std::size_t w = 0;
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        comp.push_back(v);
        w += weight[v];
        for (const auto& [u, _] : adj[v])
          if (!seen[u]) {
            seen[u] = true;
            stack.push_back(u);
          }
      }
      std::sort(comp.begin(), comp.end());
      if (w <= input.capacity) {
        clusters.push_back(std::move(comp));
      } else {
        for (auto& c : agglomerate(comp, weight, adj, input.capacity)) clusters.push_back(std::move(c));
      }
    }
    // First-fit decreasing packing of clusters into bins.
    std::vector<std::size_t> cw(clusters.size());
    for (std::size_t k = 0; k < clusters.size(); ++k)
      for (auto v : clusters[k]) cw[k] += weight[v];
    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (cw[a] != cw[b]) return cw[a] > cw[b];
      return clusters[a].front() < clusters[b].front();
    });
    std::vector<std::vector<std::size_t>> bins;
    std::vector<std::size_t> bin_w;
    for (auto k : order) {
      bool placed = false;
      if (cw[k] <= input.capacity) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
          if (bin_w[b] + cw[k] <= input.capacity) {
            bins[b].insert(bins[b].end(), clusters[k].begin(), clusters[k].end());
            bin_w[b] += cw[k];
            placed = true;
            break;
          }
        }
      }
      if (!placed) {
        bins.push_back(clusters[k]);
        bin_w.push_back(cw[k]);
      }
    }
    for (auto& b : bins) std::sort(b.begin(), b.end());
    std::sort(bins.begin(), bins.end());
    clusters = std::move(bins);
  }
  std::vector<SubmoduleSpec> out;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    SubmoduleSpec s;
    s.name = "module_" + std::to_string(k + 1);
    for (auto v : clusters[k]) s.component_ids.push_back(ids[v]);
    out.push_back(std::move(s));
  }
  return out;
}

void validate_partition(const PartitionInput& input, const std::vector<SubmoduleSpec>& groups) {
  if (groups.empty()) throw ValidationError("partition: no groups");
  std::vector<std::string> seen;
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.component_ids.empty()) throw ValidationError("partition: empty group '" + g.name + "'");
    if (g.name.empty()) throw ValidationError("partition: unnamed group");
    std::size_t w = 0;
    for (const auto& id : g.component_ids) {
      auto it = input.token_counts.find(id);
      if (it == input.token_counts.end()) throw ValidationError("partition: unknown component '" + id + "'");
      w += it->second;
    }
    if (w > input.capacity && g.component_ids.size() > 1)
      throw ValidationError("partition: group '" + g.name + "' exceeds capacity");
    total += w;
    seen.insert(seen.end(), g.component_ids.begin(), g.component_ids.end());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ValidationError("partition: component assigned twice");
  if (seen != input.component_ids) throw ValidationError("partition: groups do not cover the module");
  if (total > input.capacity && groups.size() < 2 && input.component_ids.size() > 1)
    throw ValidationError("partition: over-capacity module was not split");
}

namespace {

class Builder {
 public:
  Builder(const graph::DependencyGraph& g, const EntryPointSet& ep, const DecomposeOptions& o, Partitioner* p,
          DecomposeDiagnostics* d)
      : graph_(g), options_(o), primary_(p), diag_(d), entry_(ep.component_ids.begin(), ep.component_ids.end()) {}

  void fill(ModuleNode& node, const std::vector<std::string>& ids, std::size_t depth) {
    const std::size_t total = estimate_tokens(ids, graph_);
    const std::size_t child_depth = depth + 1;
    std::vector<SubmoduleSpec> groups;
    if (total <= options_.budget) {
      groups.push_back({"module_1", ids});
    } else {
      std::size_t cap = options_.budget;
      if (child_depth <= options_.max_depth) {
        std::size_t spread = (total + options_.max_children - 1) / std::max<std::size_t>(options_.max_children, 1);
        cap = std::max(cap, spread);
      }
      groups = split(node.id, ids, cap);
    }
    for (auto& g : groups) {
      ModuleNode child;
      child.name = g.name;
      child.id = child_id(node, g.name);
      const std::size_t w = estimate_tokens(g.component_ids, graph_);
      if (w <= options_.budget || g.component_ids.size() == 1 || child_depth > options_.max_depth) {
        child.component_ids = g.component_ids;
        std::sort(child.component_ids.begin(), child.component_ids.end());
        child.oversized = w > options_.budget;
        node.children.push_back(std::move(child));
      } else {
        node.children.push_back(std::move(child));
        fill(node.children.back(), g.component_ids, child_depth);
      }
    }
  }

 private:
  std::vector<SubmoduleSpec> split(const std::string& module_id, const std::vector<std::string>& ids,
                                   std::size_t cap) {
    PartitionInput in;
    in.module_id = module_id;
    in.component_ids = ids;
    in.capacity = cap;
    std::set<std::string> members(ids.begin(), ids.end());
    for (const auto& id : ids) {
      in.token_counts[id] = graph_.find(id)->token_count;
      if (entry_.count(id)) in.entry_points.push_back(id);
    }
    for (const auto& e : graph_.edges())
      if (members.count(e.from) && members.count(e.to)) in.edges.emplace_back(e.from, e.to);
    if (primary_) {
      try {
        auto groups = primary_->partition(in);
        validate_partition(in, groups);
        return groups;
      } catch (const Error&) {
        if (diag_) diag_->fallbacks.push_back(module_id);
      }
    }
    GreedyPartitioner greedy;
    return greedy.partition(in);
  }

  const graph::DependencyGraph& graph_;
  const DecomposeOptions& options_;
  Partitioner* primary_;
  DecomposeDiagnostics* diag_;
  std::set<std::string> entry_;
};

}  // namespace

ModuleTree decompose(const graph::DependencyGraph& graph, const EntryPointSet& entry_points,
                     const DecomposeOptions& options, Partitioner* primary, DecomposeDiagnostics* diagnostics) {
  if (options.budget == 0) throw ValidationError("decompose: budget must be positive");
  ModuleTree tree;
  std::vector<std::string> ids;
  for (const auto& [id, _] : graph.components()) ids.push_back(id);
  if (ids.empty()) return tree;
  Builder b(graph, entry_points, options, primary, diagnostics);
  b.fill(tree.root(), ids, 0);
  tree.validate(options.max_depth);
  return tree;
}

}  // namespace codewiki::decompose
