// SPDX-License-Identifier: Apache-2.0
#include "codewiki/reliability/reliability.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::reliability {

using nlohmann::json;

std::vector<std::vector<double>> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

HashingEmbedder::HashingEmbedder(std::size_t dims) : dims_(dims) {
  if (dims_ == 0) throw ValidationError("embedding dimension must be > 0");
}

std::vector<double> HashingEmbedder::embed(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  std::vector<std::string> features = words;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) features.push_back(words[i] + ' ' + words[i + 1]);
  if (features.empty() && !text.empty()) features.push_back(text);

  std::vector<double> v(dims_, 0.0);
  for (const auto& f : features) {
    std::uint64_t h = fnv1a64(f);
    double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dims_] += sign;
  }
  // Sign collisions could cancel to zero; keep non-empty text non-zero.
  if (!text.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
    v[fnv1a64(text) % dims_] = 1.0;
  return v;
}

RemoteEmbedder::RemoteEmbedder(std::shared_ptr<agent::HttpTransport> transport, std::string endpoint, std::string model,
                               std::string api_key_env, agent::RetryPolicy retry)
    : transport_(std::move(transport)),
      endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_env_(std::move(api_key_env)),
      retry_(std::move(retry)) {
  if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::vector<double> RemoteEmbedder::embed(const std::string& text) { return embed_batch({text}).front(); }

std::vector<std::vector<double>> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) {
  agent::ModelConfig key_cfg;
  key_cfg.api_key_env = api_key_env_;
  std::map<std::string, std::string> headers;
  if (auto k = agent::api_key(key_cfg); !k.empty()) headers["Authorization"] = "Bearer " + k;
  const std::string body = json{{"model", model_}, {"input", texts}}.dump();
  auto r = agent::with_retry(retry_, [&] {
    auto resp = transport_->post(endpoint_, headers, body);
    if (resp.status < 200 || resp.status >= 300) agent::raise_http_error(resp);
    return resp;
  });
  try {
    auto j = json::parse(r.body);
    std::vector<std::vector<double>> out(texts.size());
    for (const auto& d : j.at("data")) {
      std::size_t idx = d.value("index", std::size_t{0});
      if (idx >= out.size()) throw RemoteModelError("embedding index out of range");
      out[idx] = d.at("embedding").get<std::vector<double>>();
    }
    for (const auto& v : out)
      if (v.empty()) throw RemoteModelError("embedding response is missing entries");
    return out;
  } catch (const json::exception& e) {
    throw RemoteModelError(std::string("bad embedding response: ") + e.what());
  }
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvariantError("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> requirement_corpus(const eval::RubricNode& rubric) {
  std::vector<std::string> out;
  for (const auto& leaf : eval::rubric_leaves(rubric)) out.push_back(*leaf.node->requirement);
  return out;
}

namespace {

double best_match_sum(const std::vector<std::vector<double>>& from, const std::vector<std::vector<double>>& into) {
  double sum = 0.0;
  for (const auto& x : from) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : into) best = std::max(best, cosine(x, y));
    sum += best;
  }
  return sum;
}

double ratio_similarity(double a, double b) { return 1.0 - std::fabs(a - b) / std::max({a, b, 1.0}); }

}  // namespace

double semantic_similarity(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw ValidationError("semantic similarity needs non-empty requirement corpora");
  return (best_match_sum(a, b) + best_match_sum(b, a)) / static_cast<double>(a.size() + b.size());
}

double semantic_similarity(const eval::RubricNode& a, const eval::RubricNode& b, EmbeddingProvider& provider) {
  return semantic_similarity(provider.embed_batch(requirement_corpus(a)), provider.embed_batch(requirement_corpus(b)));
}

std::map<double, double> StructuralFeatures::distribution() const {
  std::size_t total = 0;
  for (const auto& [w, n] : weights) total += n;
  std::map<double, double> p;
  for (const auto& [w, n] : weights) p[w] = static_cast<double>(n) / static_cast<double>(total);
  return p;
}

StructuralFeatures structural_features(const eval::RubricNode& rubric) {
  StructuralFeatures f;
  f.depth = eval::rubric_depth(rubric);
  f.items = eval::rubric_size(rubric);
  std::function<void(const eval::RubricNode&)> walk = [&](const eval::RubricNode& n) {
    for (const auto& c : n.children) {
      ++f.weights[c.weight];
      walk(c);
    }
  };
  walk(rubric);
  if (f.weights.empty()) ++f.weights[rubric.weight];
  return f;
}

double weight_overlap(const std::map<double, double>& pa, const std::map<double, double>& pb) {
  double sum = 0.0;
  for (const auto& [w, p] : pa)
    if (auto it = pb.find(w); it != pb.end()) sum += std::min(p, it->second);
  return sum;
}

StructuralSimilarity structural_similarity(const StructuralFeatures& a, const StructuralFeatures& b) {
  StructuralSimilarity s;
  s.depth = ratio_similarity(static_cast<double>(a.depth), static_cast<double>(b.depth));
  s.items = ratio_similarity(static_cast<double>(a.items), static_cast<double>(b.items));
  s.weights = weight_overlap(a.distribution(), b.distribution());
  s.overall = (s.depth + s.items + s.weights) / 3.0;
  return s;
}

StructuralSimilarity structural_similarity(const eval::RubricNode& a, const eval::RubricNode& b) {
  return structural_similarity(structural_features(a), structural_features(b));
}

ReliabilityResult reliability_scores(const std::vector<eval::RubricNode>& rubrics, EmbeddingProvider& provider) {
  if (rubrics.size() < 2) throw ValidationError("reliability needs at least two rubrics");
  std::vector<std::vector<std::vector<double>>> vecs;
  std::vector<StructuralFeatures> feats;
  for (const auto& r : rubrics) {
    eval::validate_rubric(r);
    vecs.push_back(provider.embed_batch(requirement_corpus(r)));
    feats.push_back(structural_features(r));
  }
  ReliabilityResult out;
  double sem = 0, str = 0;
  for (std::size_t i = 0; i < rubrics.size(); ++i)
    for (std::size_t j = i + 1; j < rubrics.size(); ++j) {
      PairScore p{i, j, semantic_similarity(vecs[i], vecs[j]), structural_similarity(feats[i], feats[j])};
      sem += p.semantic;
      str += p.structural.overall;
      out.pairs.push_back(p);
    }
  out.semantic = sem / static_cast<double>(out.pairs.size());
  out.structural = str / static_cast<double>(out.pairs.size());
  return out;
}

json ReliabilityResult::to_json() const {
  json pairs_j = json::array();
  for (const auto& p : pairs)
    pairs_j.push_back({{"i", p.i},
                       {"j", p.j},
                       {"semantic", p.semantic},
                       {"structural", p.structural.overall},
                       {"depth", p.structural.depth},
                       {"items", p.structural.items},
                       {"weights", p.structural.weights}});
  return json{{"schema_version", 1}, {"semantic", semantic}, {"structural", structural}, {"pairs", std::move(pairs_j)}};
}

}  // namespace codewiki::reliability
