// SPDX-License-Identifier: Apache-2.0
#include "codewiki/eval/rubric.hpp"

#include <cmath>
#include <functional>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::eval {

using nlohmann::json;

namespace {

void check(const RubricNode& n, const std::string& path) {
  if (trim(n.name).empty()) throw ValidationError("rubric " + path + ": empty name");
  if (!std::isfinite(n.weight) || n.weight <= 0.0) throw ValidationError("rubric " + path + ": weight must be > 0");
  if (n.is_leaf()) {
    if (!n.requirement || trim(*n.requirement).empty())
      throw ValidationError("rubric " + path + ": leaf '" + n.name + "' needs a requirement");
  } else if (n.requirement) {
    throw ValidationError("rubric " + path + ": internal node '" + n.name + "' must not carry a requirement");
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) check(n.children[i], path + "/" + std::to_string(i));
}

RubricNode parse(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError("rubric " + path + ": node must be an object");
  RubricNode n;
  if (!j.contains("name") || !j["name"].is_string()) throw ValidationError("rubric " + path + ": name must be a string");
  n.name = j["name"].get<std::string>();
  if (j.contains("weight")) {
    if (!j["weight"].is_number()) throw ValidationError("rubric " + path + ": weight must be a number");
    n.weight = j["weight"].get<double>();
  }
  if (j.contains("requirement") && !j["requirement"].is_null()) {
    if (!j["requirement"].is_string()) throw ValidationError("rubric " + path + ": requirement must be a string");
    n.requirement = j["requirement"].get<std::string>();
  }
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw ValidationError("rubric " + path + ": children must be an array");
    std::size_t i = 0;
    for (const auto& c : j["children"]) n.children.push_back(parse(c, path + "/" + std::to_string(i++)));
  }
  return n;
}

json dump(const RubricNode& n) {
  json j{{"name", n.name}, {"weight", n.weight}};
  if (n.requirement) j["requirement"] = *n.requirement;
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(dump(c));
  return j;
}

}  // namespace

void validate_rubric(const RubricNode& root) { check(root, "root"); }

RubricNode rubric_from_json(const json& j) {
  if (j.is_object() && j.contains("schema_version") && j["schema_version"] != 1)
    throw ValidationError("unsupported rubric schema_version");
  RubricNode n = parse(j, "root");
  validate_rubric(n);
  return n;
}

json rubric_to_json(const RubricNode& root) {
  json j = dump(root);
  j["schema_version"] = 1;
  return j;
}

RubricNode load_rubric(const std::string& path) {
  try {
    return rubric_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<RubricLeaf> rubric_leaves(const RubricNode& root) {
  std::vector<RubricLeaf> out;
  std::function<void(const RubricNode&, const std::string&)> walk = [&](const RubricNode& n, const std::string& p) {
    if (n.is_leaf()) {
      out.push_back({p, &n});
      return;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], p + "/" + std::to_string(i));
  };
  walk(root, "root");
  return out;
}

std::size_t rubric_depth(const RubricNode& root) {
  std::size_t d = 0;
  for (const auto& c : root.children) d = std::max(d, rubric_depth(c));
  return d + 1;
}

std::size_t rubric_size(const RubricNode& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += rubric_size(c);
  return n;
}

}  // namespace codewiki::eval
