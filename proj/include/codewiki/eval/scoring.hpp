// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "codewiki/eval/rubric.hpp"

namespace codewiki::eval {

struct JudgeVerdict {
  std::string judge;
  int score = 0;  // 0 or 1
  std::string reasoning;
  bool excluded = false;  // format failure: counts as 0, kept out of sigma
};

struct LeafScore {
  double mean = 0.0;
  double sigma = 0.0;
  std::size_t m = 0;
  bool low_confidence = false;  // fewer than two verdicts behind sigma
};

/// Mean and sample standard deviation; sigma is 0 for a single verdict.
/// Throws ValidationError on an empty list or a non-binary score.
LeafScore score_leaf(const std::vector<int>& verdicts);
LeafScore score_leaf(const std::vector<JudgeVerdict>& verdicts);

struct AggregateScore {
  double score = 0.0;
  double sigma = 0.0;
};

/// S = sum(w*S)/sum(w), sigma = sqrt(sum(w^2*sigma^2))/sum(w).
/// Throws InvariantError when the weights sum to zero or the list is empty.
AggregateScore combine(const std::vector<std::pair<double, AggregateScore>>& weighted);

/// Bottom-up over `root`; leaf scores are keyed by rubric path. Every node's
/// result lands in `per_node` when given. Throws ValidationError when a leaf
/// has no score.
AggregateScore aggregate(const RubricNode& root, const std::map<std::string, LeafScore>& leaf_scores,
                         std::map<std::string, AggregateScore>* per_node = nullptr);

/// Majority rule: a leaf is covered when its mean exceeds one half.
bool covered(const LeafScore& s);

}  // namespace codewiki::eval
