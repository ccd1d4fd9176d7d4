// SPDX-License-Identifier: Apache-2.0
#include "codewiki/eval/evaluate.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::eval {

using nlohmann::json;

std::vector<agent::AgentTool> doc_tools(const DocStructure& docs) {
  std::vector<agent::AgentTool> tools;
  tools.push_back({{"fetch_section", "Return the full text behind a documentation node id.",
                    json{{"type", "object"},
                         {"properties", {{"id", {{"type", "string"}}}}},
                         {"required", {"id"}}}},
                   [&docs](const json& args) -> agent::ToolResult {
                     if (!args.contains("id") || !args["id"].is_string()) throw ValidationError("id must be a string");
                     auto text = docs.fetch(args["id"].get<std::string>());
                     if (!text) throw ValidationError("no documentation node " + args["id"].get<std::string>());
                     return {*text};
                   }});
  tools.push_back({{"search_docs", "List node ids whose text contains every word of the query.",
                    json{{"type", "object"},
                         {"properties", {{"query", {{"type", "string"}}}}},
                         {"required", {"query"}}}},
                   [&docs](const json& args) -> agent::ToolResult {
                     if (!args.contains("query") || !args["query"].is_string())
                       throw ValidationError("query must be a string");
                     auto ids = docs.search(args["query"].get<std::string>());
                     return {ids.empty() ? std::string("no matches") : join(ids, ", ")};
                   }});
  return tools;
}

std::optional<json> extract_json_object(const std::string& text) {
  auto try_parse = [](const std::string& s) -> std::optional<json> {
    try {
      auto j = json::parse(s);
      if (j.is_object()) return j;
    } catch (const json::exception&) {
    }
    return std::nullopt;
  };
  if (auto j = try_parse(trim(text))) return j;
  auto fence = text.find("```");
  if (fence != std::string::npos) {
    auto body = text.find('\n', fence);
    auto close = body == std::string::npos ? std::string::npos : text.find("```", body);
    if (close != std::string::npos)
      if (auto j = try_parse(text.substr(body + 1, close - body - 1))) return j;
  }
  auto open = text.find('{');
  auto last = text.rfind('}');
  if (open != std::string::npos && last != std::string::npos && last > open)
    return try_parse(text.substr(open, last - open + 1));
  return std::nullopt;
}

std::optional<JudgeVerdict> parse_verdict(const std::string& text, const std::string& judge) {
  auto j = extract_json_object(text);
  if (!j || !j->contains("score")) return std::nullopt;
  const json& s = (*j)["score"];
  int score;
  if (s.is_boolean()) {
    score = s.get<bool>() ? 1 : 0;
  } else if (s.is_number_integer() && (s.get<long long>() == 0 || s.get<long long>() == 1)) {
    score = static_cast<int>(s.get<long long>());
  } else {
    return std::nullopt;
  }
  JudgeVerdict v;
  v.judge = judge;
  v.score = score;
  if (j->contains("reasoning") && (*j)["reasoning"].is_string()) v.reasoning = (*j)["reasoning"].get<std::string>();
  return v;
}

JudgeVerdict judge_leaf(const RubricNode& leaf, const std::string& leaf_path, const DocStructure& docs,
                        const agent::ModelConfig& judge, agent::ChatBackend& backend, std::size_t max_turns) {
  if (!leaf.is_leaf() || !leaf.requirement) throw InvariantError("judges assess leaf requirements only: " + leaf_path);
  std::string prompt =
      "You judge whether repository documentation satisfies one requirement.\n"
      "Search the documentation thoroughly with search_docs and fetch_section before deciding.\n"
      "Answer with only a JSON object: {\"score\": 1 if the requirement is covered adequately, else 0, "
      "\"reasoning\": \"one or two sentences\"}.\n\n"
      "Requirement: " +
      *leaf.requirement + "\n\nDocumentation structure (contents hidden, fetch by id):\n" + docs.to_json().dump(1) + "\n";
  agent::AgentOptions ao;
  ao.max_turns = max_turns;
  ao.role = "judge/" + judge.name;
  ao.module_id = leaf_path;
  ao.vars = {{"requirement", *leaf.requirement}, {"leaf_path", leaf_path}, {"leaf_name", leaf.name}};
  agent::AgentSession session(backend, judge, prompt, doc_tools(docs), ao);
  auto r = session.run();
  if (auto v = parse_verdict(r.text, judge.name)) return *v;
  session.add_user_message(
      "Your reply could not be read. Reply with only {\"score\": 0 or 1, \"reasoning\": \"...\"}.");
  r = session.run();
  if (auto v = parse_verdict(r.text, judge.name)) return *v;
  return {judge.name, 0, kJudgeFormatFailure, true};
}

EvaluationReport evaluate(const DocStructure& docs, const RubricNode& rubric,
                          const std::vector<agent::ModelConfig>& judges, agent::BackendProvider& backends,
                          const EvaluateOptions& options) {
  if (judges.empty()) throw ValidationError("evaluate: at least one judge is required");
  validate_rubric(rubric);
  for (const auto& j : judges) j.validate();

  EvaluationReport report;
  report.rubric = rubric;
  const auto leaves = rubric_leaves(rubric);
  const std::size_t tasks = leaves.size() * judges.size();
  std::vector<JudgeVerdict> verdicts(tasks);
  std::vector<agent::ChatBackend*> backend_of;
  for (const auto& j : judges) backend_of.push_back(&backends.backend_for(j));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t t; (t = next++) < tasks;) {
      const std::size_t li = t / judges.size(), ji = t % judges.size();
      try {
        verdicts[t] = judge_leaf(*leaves[li].node, leaves[li].path, docs, judges[ji], *backend_of[ji], options.max_turns);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(options.threads, tasks));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::map<std::string, LeafScore> scores;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    LeafReport lr;
    lr.path = leaves[li].path;
    lr.name = leaves[li].node->name;
    lr.requirement = *leaves[li].node->requirement;
    lr.weight = leaves[li].node->weight;
    lr.verdicts.assign(verdicts.begin() + static_cast<long>(li * judges.size()),
                       verdicts.begin() + static_cast<long>((li + 1) * judges.size()));
    lr.score = score_leaf(lr.verdicts);
    lr.covered = covered(lr.score);
    report.covered += lr.covered;
    scores[lr.path] = lr.score;
    report.leaves.push_back(std::move(lr));
  }
  report.total = leaves.size();
  report.overall = aggregate(rubric, scores, &report.nodes);
  return report;
}

EvaluationReport evaluate(const std::filesystem::path& docs_dir, const RubricNode& rubric,
                          const std::vector<agent::ModelConfig>& judges, agent::BackendProvider& backends,
                          const EvaluateOptions& options) {
  return evaluate(parse_official_docs(docs_dir), rubric, judges, backends, options);
}

json EvaluationReport::to_json() const {
  json nodes_j = json::object();
  std::map<std::string, std::string> names;
  std::function<void(const RubricNode&, const std::string&)> walk = [&](const RubricNode& n, const std::string& p) {
    names[p] = n.name;
    for (std::size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], p + "/" + std::to_string(i));
  };
  walk(rubric, "root");
  for (const auto& [path, s] : nodes) nodes_j[path] = {{"name", names[path]}, {"score", s.score}, {"sigma", s.sigma}};
  json leaves_j = json::array();
  for (const auto& l : leaves) {
    json vs = json::array();
    for (const auto& v : l.verdicts)
      vs.push_back({{"judge", v.judge}, {"score", v.score}, {"reasoning", v.reasoning}, {"excluded", v.excluded}});
    leaves_j.push_back({{"path", l.path},
                        {"name", l.name},
                        {"requirement", l.requirement},
                        {"weight", l.weight},
                        {"score", l.score.mean},
                        {"sigma", l.score.sigma},
                        {"m", l.score.m},
                        {"low_confidence", l.score.low_confidence},
                        {"covered", l.covered},
                        {"verdicts", std::move(vs)}});
  }
  return json{{"schema_version", 1},
              {"score", overall.score},
              {"sigma", overall.sigma},
              {"coverage", {{"covered", covered}, {"total", total}}},
              {"nodes", std::move(nodes_j)},
              {"leaves", std::move(leaves_j)},
              {"rubric", rubric_to_json(rubric)}};
}

}  // namespace codewiki::eval
