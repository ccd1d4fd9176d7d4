// SPDX-License-Identifier: Apache-2.0
#include "codewiki/eval/scoring.hpp"

#include <cmath>

#include "codewiki/core/error.hpp"

namespace codewiki::eval {
namespace {

double sample_sigma(const std::vector<int>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (int s : v) mean += s;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (int s : v) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

LeafScore score_leaf(const std::vector<int>& verdicts) {
  if (verdicts.empty()) throw ValidationError("score_leaf: no verdicts");
  double sum = 0.0;
  for (int s : verdicts) {
    if (s != 0 && s != 1) throw ValidationError("score_leaf: verdicts must be 0 or 1");
    sum += s;
  }
  LeafScore out;
  out.m = verdicts.size();
  out.mean = sum / static_cast<double>(out.m);
  out.sigma = sample_sigma(verdicts);
  out.low_confidence = out.m < 2;
  return out;
}

LeafScore score_leaf(const std::vector<JudgeVerdict>& verdicts) {
  if (verdicts.empty()) throw ValidationError("score_leaf: no verdicts");
  std::vector<int> all, counted;
  for (const auto& v : verdicts) {
    if (v.score != 0 && v.score != 1) throw ValidationError("score_leaf: verdicts must be 0 or 1");
    all.push_back(v.excluded ? 0 : v.score);
    if (!v.excluded) counted.push_back(v.score);
  }
  LeafScore out = score_leaf(all);
  out.sigma = sample_sigma(counted);
  out.low_confidence = counted.size() < 2;
  return out;
}

AggregateScore combine(const std::vector<std::pair<double, AggregateScore>>& weighted) {
  if (weighted.empty()) throw InvariantError("aggregate: node without children");
  double wsum = 0.0, score = 0.0, var = 0.0;
  for (const auto& [w, s] : weighted) {
    wsum += w;
    score += w * s.score;
    var += w * w * s.sigma * s.sigma;
  }
  if (!(wsum > 0.0)) throw InvariantError("aggregate: children weights sum to zero");
  return {score / wsum, std::sqrt(var) / wsum};
}

namespace {

AggregateScore fold(const RubricNode& n, const std::string& path, const std::map<std::string, LeafScore>& leaves,
                    std::map<std::string, AggregateScore>* out) {
  AggregateScore r;
  if (n.is_leaf()) {
    auto it = leaves.find(path);
    if (it == leaves.end()) throw ValidationError("aggregate: leaf " + path + " has no score");
    r = {it->second.mean, it->second.sigma};
  } else {
    std::vector<std::pair<double, AggregateScore>> parts;
    parts.reserve(n.children.size());
    for (std::size_t i = 0; i < n.children.size(); ++i)
      parts.emplace_back(n.children[i].weight, fold(n.children[i], path + "/" + std::to_string(i), leaves, out));
    r = combine(parts);
  }
  if (out) (*out)[path] = r;
  return r;
}

}  // namespace

AggregateScore aggregate(const RubricNode& root, const std::map<std::string, LeafScore>& leaf_scores,
                         std::map<std::string, AggregateScore>* per_node) {
  return fold(root, "root", leaf_scores, per_node);
}

bool covered(const LeafScore& s) { return s.mean > 0.5; }

}  // namespace codewiki::eval
