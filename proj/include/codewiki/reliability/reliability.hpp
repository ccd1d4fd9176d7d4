// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "codewiki/agent/http_backend.hpp"
#include "codewiki/eval/rubric.hpp"

namespace codewiki::reliability {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
  virtual std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts);
};

/// Signed feature hashing of lowercase word unigrams and bigrams.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dims = 1024);
  std::vector<double> embed(const std::string& text) override;

 private:
  std::size_t dims_;
};

/// OpenAI-style /embeddings endpoint: {"model", "input": [...]}.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::shared_ptr<agent::HttpTransport> transport, std::string endpoint, std::string model,
                 std::string api_key_env, agent::RetryPolicy retry = {});
  std::vector<double> embed(const std::string& text) override;
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) override;

 private:
  std::shared_ptr<agent::HttpTransport> transport_;
  std::string endpoint_, model_, api_key_env_;
  agent::RetryPolicy retry_;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Leaf requirement texts in pre-order.
std::vector<std::string> requirement_corpus(const eval::RubricNode& rubric);

/// Best-match cosine of each text into the other corpus, summed over both
/// directions, divided by the total text count. Throws ValidationError on
/// an empty corpus.
double semantic_similarity(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);
double semantic_similarity(const eval::RubricNode& a, const eval::RubricNode& b, EmbeddingProvider& provider);

struct StructuralFeatures {
  std::size_t depth = 1;  // root only = 1
  std::size_t items = 1;  // every node
  std::map<double, std::size_t> weights;  // exact weight -> count over non-root nodes
  std::map<double, double> distribution() const;
};
StructuralFeatures structural_features(const eval::RubricNode& rubric);

struct StructuralSimilarity {
  double depth = 0, items = 0, weights = 0, overall = 0;
};
StructuralSimilarity structural_similarity(const StructuralFeatures& a, const StructuralFeatures& b);
StructuralSimilarity structural_similarity(const eval::RubricNode& a, const eval::RubricNode& b);
/// Sum of min(P_a(w), P_b(w)) over the union of weights.
double weight_overlap(const std::map<double, double>& pa, const std::map<double, double>& pb);

struct PairScore {
  std::size_t i = 0, j = 0;
  double semantic = 0;
  StructuralSimilarity structural;
};

struct ReliabilityResult {
  double semantic = 0;
  double structural = 0;
  std::vector<PairScore> pairs;  // i < j, n(n-1)/2 entries
  nlohmann::json to_json() const;
};

/// Means over every unordered pair. Throws ValidationError for fewer than two rubrics.
ReliabilityResult reliability_scores(const std::vector<eval::RubricNode>& rubrics, EmbeddingProvider& provider);

}  // namespace codewiki::reliability
