// SPDX-License-Identifier: Apache-2.0
#include "codewiki/cli/config.hpp"

#include <cstdlib>
#include <set>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::cli {

using nlohmann::json;

namespace {

void known_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ValidationError("config: unknown key '" + where + "." + it.key() + "'");
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: bad value for '" + where + "." + key + "'");
  }
}

std::size_t parse_size(const std::string& name, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long n = std::stoll(v, &pos);
    if (pos != v.size() || n < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ValidationError("environment: " + name + " must be a non-negative integer");
  }
}

std::vector<agent::ModelConfig> models_from(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ValidationError("config: " + where + " must be an array");
  std::vector<agent::ModelConfig> out;
  std::size_t k = 0;
  for (const auto& m : arr) out.push_back(model_from_json(m, where + "_" + std::to_string(k++)));
  return out;
}

}  // namespace

AppConfig default_config() {
  AppConfig c;
  c.generator.name = "generator";
  return c;
}

json model_to_json(const agent::ModelConfig& m) {
  return json{{"name", m.name},
              {"provider", m.provider},
              {"endpoint", m.endpoint},
              {"model", m.model},
              {"temperature", m.temperature},
              {"max_output_tokens", m.max_output_tokens},
              {"context_window", m.context_window},
              {"api_key_env", m.api_key_env}};
}

agent::ModelConfig model_from_json(const json& j, const std::string& default_name) {
  known_keys(j, "model", {"name", "provider", "endpoint", "model", "temperature", "max_output_tokens", "context_window",
                          "api_key_env"});
  agent::ModelConfig m;
  m.name = default_name;
  const std::string w = "model " + default_name;
  if (j.contains("name")) m.name = get<std::string>(j, "name", w);
  if (j.contains("provider")) m.provider = get<std::string>(j, "provider", w);
  if (j.contains("endpoint")) m.endpoint = get<std::string>(j, "endpoint", w);
  if (j.contains("model")) m.model = get<std::string>(j, "model", w);
  if (j.contains("temperature")) m.temperature = get<double>(j, "temperature", w);
  if (j.contains("max_output_tokens")) m.max_output_tokens = get<std::size_t>(j, "max_output_tokens", w);
  if (j.contains("context_window")) m.context_window = get<std::size_t>(j, "context_window", w);
  if (j.contains("api_key_env")) m.api_key_env = get<std::string>(j, "api_key_env", w);
  return m;
}

void apply_file(AppConfig& c, const json& doc) {
  known_keys(doc, "config", {"schema_version", "scan", "decompose", "agent", "models", "embeddings", "paths", "seed", "threads"});
  if (doc.contains("schema_version") && doc["schema_version"] != 1) throw ValidationError("config: unsupported schema_version");
  if (doc.contains("scan")) {
    const auto& s = doc["scan"];
    known_keys(s, "scan", {"ignore", "languages"});
    if (s.contains("ignore")) c.ignore = get<std::vector<std::string>>(s, "ignore", "scan");
    if (s.contains("languages")) c.languages = get<std::vector<std::string>>(s, "languages", "scan");
  }
  if (doc.contains("decompose")) {
    const auto& d = doc["decompose"];
    known_keys(d, "decompose", {"budget", "max_depth", "max_children", "llm_partitioner"});
    if (d.contains("budget")) c.budget = get<std::size_t>(d, "budget", "decompose");
    if (d.contains("max_depth")) c.max_depth = get<std::size_t>(d, "max_depth", "decompose");
    if (d.contains("max_children")) c.max_children = get<std::size_t>(d, "max_children", "decompose");
    if (d.contains("llm_partitioner")) c.llm_partitioner = get<bool>(d, "llm_partitioner", "decompose");
  }
  if (doc.contains("agent")) {
    const auto& a = doc["agent"];
    known_keys(a, "agent", {"max_turns", "delegation_guard"});
    if (a.contains("max_turns")) c.max_turns = get<std::size_t>(a, "max_turns", "agent");
    if (a.contains("delegation_guard")) c.delegation_guard = get<double>(a, "delegation_guard", "agent");
  }
  if (doc.contains("models")) {
    const auto& m = doc["models"];
    known_keys(m, "models", {"generator", "judges", "rubric_generators", "synthesizer"});
    if (m.contains("generator")) c.generator = model_from_json(m["generator"], "generator");
    if (m.contains("judges")) c.judges = models_from(m["judges"], "judge");
    if (m.contains("rubric_generators")) c.rubric_generators = models_from(m["rubric_generators"], "rubric_generator");
    if (m.contains("synthesizer")) c.synthesizer = get<std::string>(m, "synthesizer", "models");
  }
  if (doc.contains("embeddings")) {
    const auto& e = doc["embeddings"];
    known_keys(e, "embeddings", {"provider", "dims", "endpoint", "model", "api_key_env"});
    if (e.contains("provider")) c.embeddings.provider = get<std::string>(e, "provider", "embeddings");
    if (e.contains("dims")) c.embeddings.dims = get<std::size_t>(e, "dims", "embeddings");
    if (e.contains("endpoint")) c.embeddings.endpoint = get<std::string>(e, "endpoint", "embeddings");
    if (e.contains("model")) c.embeddings.model = get<std::string>(e, "model", "embeddings");
    if (e.contains("api_key_env")) c.embeddings.api_key_env = get<std::string>(e, "api_key_env", "embeddings");
  }
  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    known_keys(p, "paths", {"out", "mock_scripts"});
    if (p.contains("out")) c.out = get<std::string>(p, "out", "paths");
    if (p.contains("mock_scripts")) c.mock_scripts = get<std::string>(p, "mock_scripts", "paths");
  }
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed", "config");
  if (doc.contains("threads")) c.threads = get<unsigned>(doc, "threads", "config");
}

void apply_file(AppConfig& c, const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + ": " + e.what());
  } catch (const IoError& e) {
    throw ValidationError(e.what());
  }
  apply_file(c, doc);
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

void apply_env(AppConfig& c, const EnvLookup& env) {
  auto str = [&](const char* name, std::string& field) {
    if (auto v = env(name)) field = *v;
  };
  auto size = [&](const char* name, std::size_t& field) {
    if (auto v = env(name)) field = parse_size(name, *v);
  };
  size("CODEWIKI_BUDGET", c.budget);
  size("CODEWIKI_MAX_DEPTH", c.max_depth);
  size("CODEWIKI_MAX_TURNS", c.max_turns);
  str("CODEWIKI_OUT", c.out);
  str("CODEWIKI_MOCK_SCRIPTS", c.mock_scripts);
  str("CODEWIKI_GENERATOR_PROVIDER", c.generator.provider);
  str("CODEWIKI_GENERATOR_ENDPOINT", c.generator.endpoint);
  str("CODEWIKI_GENERATOR_MODEL", c.generator.model);
  str("CODEWIKI_GENERATOR_API_KEY_ENV", c.generator.api_key_env);
  if (auto v = env("CODEWIKI_SEED")) c.seed = parse_size("CODEWIKI_SEED", *v);
  if (auto v = env("CODEWIKI_THREADS")) c.threads = static_cast<unsigned>(parse_size("CODEWIKI_THREADS", *v));
  if (auto v = env("CODEWIKI_IGNORE"))
    for (const auto& p : split(*v, ','))
      if (!trim(p).empty()) c.ignore.push_back(trim(p));
}

void validate_config(const AppConfig& c) {
  if (c.budget == 0) throw ValidationError("budget must be > 0");
  if (c.max_children < 2) throw ValidationError("max_children must be >= 2");
  if (c.max_turns == 0) throw ValidationError("max_turns must be >= 1");
  if (!(c.delegation_guard > 0.0 && c.delegation_guard <= 1.0)) throw ValidationError("delegation_guard must be in (0, 1]");
  if (c.embeddings.provider != "hashing" && c.embeddings.provider != "remote")
    throw ValidationError("embeddings.provider must be 'hashing' or 'remote'");
  std::set<std::string> names;
  for (const auto& j : c.judges)
    if (!names.insert(j.name).second) throw ValidationError("duplicate judge name '" + j.name + "'");
  names.clear();
  for (const auto& g : c.rubric_generators)
    if (!names.insert(g.name).second) throw ValidationError("duplicate rubric generator name '" + g.name + "'");
  if (!c.synthesizer.empty() && !names.count(c.synthesizer))
    throw ValidationError("synthesizer '" + c.synthesizer + "' is not a rubric generator");
}

}  // namespace codewiki::cli
