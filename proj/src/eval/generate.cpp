// SPDX-License-Identifier: Apache-2.0
#include "codewiki/eval/generate.hpp"

#include <map>

#include "codewiki/agent/agent_loop.hpp"
#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"
#include "codewiki/eval/evaluate.hpp"

namespace codewiki::eval {

using nlohmann::json;

namespace {

const char* kSchemaHint =
    "Reply with only a JSON object of the form {\"name\": str, \"weight\": number, \"children\": [...]}. "
    "Leaves have a \"requirement\" string and no children; internal nodes have children and no requirement. "
    "Weights are integers from 1 to 10 reflecting importance.";

std::optional<RubricNode> read_rubric(const std::string& text, std::string* error) {
  auto j = extract_json_object(text);
  if (!j) {
    *error = "no JSON object found";
    return std::nullopt;
  }
  try {
    return rubric_from_json(*j);
  } catch (const ValidationError& e) {
    *error = e.what();
    return std::nullopt;
  }
}

// Run, then one repair turn when the reply does not validate.
std::optional<RubricNode> ask(agent::ChatBackend& backend, const agent::ModelConfig& model, const std::string& prompt,
                              const std::string& role, const DocStructure& docs, std::size_t max_turns,
                              std::string* error) {
  agent::AgentOptions ao;
  ao.max_turns = max_turns;
  ao.role = role;
  ao.module_id = "docs";
  agent::AgentSession session(backend, model, prompt, doc_tools(docs), ao);
  auto r = session.run();
  if (auto rub = read_rubric(r.text, error)) return rub;
  session.add_user_message("The rubric is invalid: " + *error + ". " + kSchemaHint);
  r = session.run();
  return read_rubric(r.text, error);
}

std::string key(const std::string& name) { return to_lower(trim(name)); }

RubricNode merge_group(const std::vector<const RubricNode*>& group) {
  RubricNode out;
  out.name = group.front()->name;
  double w = 0.0;
  for (const auto* n : group) w += n->weight;
  out.weight = w / static_cast<double>(group.size());

  bool any_internal = false;
  for (const auto* n : group) any_internal = any_internal || !n->is_leaf();
  if (!any_internal) {
    out.requirement = group.front()->requirement;
    return out;
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RubricNode*>> by_name;
  for (const auto* n : group) {
    if (n->is_leaf()) {
      // A leaf merged into an internal node keeps its requirement as a child.
      auto k = key(n->name);
      if (!by_name.count(k)) order.push_back(k);
      by_name[k].push_back(n);
      continue;
    }
    for (const auto& c : n->children) {
      auto k = key(c.name);
      if (!by_name.count(k)) order.push_back(k);
      by_name[k].push_back(&c);
    }
  }
  for (const auto& k : order) out.children.push_back(merge_group(by_name[k]));
  return out;
}

}  // namespace

RubricNode merge_rubrics(const std::vector<RubricNode>& rubrics) {
  if (rubrics.empty()) throw ValidationError("merge_rubrics: nothing to merge");
  std::vector<const RubricNode*> group;
  for (const auto& r : rubrics) group.push_back(&r);
  RubricNode out = merge_group(group);
  validate_rubric(out);
  return out;
}

RubricGeneration generate_rubric(const DocStructure& docs, const std::vector<agent::ModelConfig>& generators,
                                 agent::BackendProvider& backends, const RubricGenerationOptions& options) {
  if (generators.empty()) throw ValidationError("generate_rubric: at least one generator is required");
  RubricGeneration out;
  const std::string prompt =
      std::string("You build an evaluation rubric for a repository's documentation.\n"
                  "Explore the official documentation below with fetch_section and search_docs, then produce a\n"
                  "hierarchical rubric: top-level items for major areas, nested items for sub-areas, and concrete,\n"
                  "checkable leaf requirements a reader should be able to verify in good documentation.\n") +
      kSchemaHint + "\n\nDocumentation structure (contents hidden, fetch by id):\n" + docs.to_json().dump(1) + "\n";
  for (const auto& g : generators) {
    g.validate();
    std::string error;
    auto r = ask(backends.backend_for(g), g, prompt, "rubric_generator/" + g.name, docs, options.max_turns, &error);
    if (r) {
      out.candidates.push_back(std::move(*r));
    } else {
      out.diagnostics.push_back("generator " + g.name + " dropped: " + error);
    }
  }
  if (out.candidates.empty()) {
    std::string msg = "every rubric generator failed schema validation";
    for (const auto& d : out.diagnostics) msg += "; " + d;
    throw RemoteModelError(msg);
  }
  if (out.candidates.size() == 1) {
    out.rubric = out.candidates.front();
    return out;
  }
  const agent::ModelConfig synth = options.synthesizer ? *options.synthesizer : generators.front();
  std::string sp = std::string("Merge the rubrics below, produced independently by different models, into one rubric\n"
                               "that keeps every distinct requirement once and resolves overlaps.\n") +
                   kSchemaHint + "\n";
  for (std::size_t i = 0; i < out.candidates.size(); ++i)
    sp += "\nRubric " + std::to_string(i + 1) + ":\n" + rubric_to_json(out.candidates[i]).dump(1) + "\n";
  std::string error;
  auto merged = ask(backends.backend_for(synth), synth, sp, "rubric_synthesizer", docs, options.max_turns, &error);
  if (merged) {
    out.rubric = std::move(*merged);
  } else {
    out.diagnostics.push_back("synthesis failed (" + error + "); used deterministic merge");
    out.rubric = merge_rubrics(out.candidates);
  }
  return out;
}

}  // namespace codewiki::eval
