// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codewiki/agent/backends.hpp"
#include "codewiki/agent/mock_backend.hpp"
#include "codewiki/cli/config.hpp"
#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"
#include "codewiki/decompose/decompose.hpp"
#include "codewiki/decompose/llm_partitioner.hpp"
#include "codewiki/doc/pipeline.hpp"
#include "codewiki/eval/evaluate.hpp"
#include "codewiki/eval/generate.hpp"
#include "codewiki/graph/condense.hpp"
#include "codewiki/graph/extract.hpp"
#include "codewiki/graph/scanner.hpp"
#include "codewiki/graph/serialize.hpp"
#include "codewiki/reliability/reliability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace codewiki;

namespace {

enum Exit { kOk = 0, kValidation = 2, kRuntime = 3, kRemote = 4 };

struct Common {
  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> mock_scripts;
};

void emit(const std::string& text, const std::optional<std::string>& path) {
  if (path && *path != "-") {
    write_file(*path, text);
  } else {
    std::cout << text;
  }
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

cli::AppConfig layered(const Common& common) {
  cli::AppConfig c = cli::default_config();
  auto env = cli::process_env();
  std::optional<std::string> file = common.config_file;
  if (!file) file = env("CODEWIKI_CONFIG");
  if (file) {
    if (!fs::exists(*file)) throw ValidationError("config file not found: " + *file);
    cli::apply_file(c, *file);
  }
  cli::apply_env(c, env);
  if (common.seed) c.seed = *common.seed;
  if (common.threads) c.threads = *common.threads;
  if (common.mock_scripts) c.mock_scripts = *common.mock_scripts;
  return c;
}

void require_path(const std::string& p, const char* what) {
  if (!fs::exists(p)) throw ValidationError(std::string(what) + " not found: " + p);
}

graph::ScanOptions scan_options(const cli::AppConfig& c) {
  graph::ScanOptions s;
  s.ignore.insert(s.ignore.end(), c.ignore.begin(), c.ignore.end());
  if (!c.languages.empty()) {
    std::set<graph::Language> langs;
    for (const auto& name : c.languages) {
      auto l = graph::language_from_name(name);
      if (!l) throw ValidationError("unknown language '" + name + "'");
      langs.insert(*l);
    }
    s.include = langs;
  }
  return s;
}

graph::DependencyGraph load_graph(const std::string& path) {
  require_path(path, "graph file");
  try {
    return graph::import_graph(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

/// With --mock-scripts every model call is served by the mock.
struct Backends {
  std::optional<agent::MockBackend> mock;
  std::unique_ptr<agent::BackendProvider> provider;

  explicit Backends(const cli::AppConfig& c) {
    if (!c.mock_scripts.empty()) {
      mock = agent::MockBackend::from_directory(c.mock_scripts);
      provider = std::make_unique<agent::SingleBackend>(*mock);
    } else {
      provider = std::make_unique<agent::ProviderBackends>(std::shared_ptr<agent::HttpTransport>(agent::make_default_transport()));
    }
  }
  bool mocked() const { return mock.has_value(); }
};

agent::ModelConfig mock_model(const std::string& name) {
  agent::ModelConfig m;
  m.name = name;
  m.provider = "mock";
  return m;
}

agent::ModelConfig generator_model(const cli::AppConfig& c, const Backends& b) {
  agent::ModelConfig m = c.generator;
  if (b.mocked()) m.provider = "mock";
  m.validate();
  return m;
}

std::vector<agent::ModelConfig> pick_models(const std::vector<agent::ModelConfig>& configured,
                                            const std::string& names, bool mocked, const char* what) {
  if (names.empty()) {
    if (configured.empty()) throw ValidationError(std::string("no ") + what + " configured");
    std::vector<agent::ModelConfig> out = configured;
    for (auto& m : out) {
      if (mocked) m.provider = "mock";
      m.validate();
    }
    return out;
  }
  std::vector<agent::ModelConfig> out;
  for (const auto& raw : split(names, ',')) {
    std::string n = trim(raw);
    if (n.empty()) continue;
    auto it = std::find_if(configured.begin(), configured.end(), [&](const agent::ModelConfig& m) { return m.name == n; });
    if (it != configured.end()) {
      out.push_back(*it);
      if (mocked) out.back().provider = "mock";
    } else if (mocked) {
      out.push_back(mock_model(n));
    } else {
      throw ValidationError(std::string("unknown ") + what + " '" + n + "'");
    }
    out.back().validate();
  }
  if (out.empty()) throw ValidationError(std::string("no ") + what + " given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codewiki: repository documentation generator and documentation evaluator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "codewiki 0.1.0");
  Common common;
  app.add_option("--config", common.config_file, "JSON config file (also CODEWIKI_CONFIG)");
  app.add_option("--seed", common.seed, "Seed for randomized choices");
  app.add_option("--threads", common.threads, "Worker threads (0 = hardware concurrency)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Scan a repository and print its dependency graph JSON");
  std::string a_root;
  std::optional<std::string> a_out;
  std::vector<std::string> a_ignore;
  bool a_no_source = false;
  analyze->add_option("root", a_root, "Repository root")->required();
  analyze->add_option("--out,-o", a_out, "Write the graph here instead of stdout");
  analyze->add_option("--ignore", a_ignore, "Extra gitignore-style pattern (repeatable)");
  analyze->add_flag("--no-source", a_no_source, "Omit component source text");

  // decompose
  auto* decomp = app.add_subcommand("decompose", "Build the module tree from a graph JSON");
  std::string d_graph;
  std::optional<std::string> d_out;
  std::optional<std::size_t> d_budget, d_depth;
  bool d_llm = false;
  decomp->add_option("graph", d_graph, "Graph JSON from analyze")->required();
  decomp->add_option("--out,-o", d_out, "Write the tree here instead of stdout");
  decomp->add_option("--budget", d_budget, "Leaf token budget (default 32768)");
  decomp->add_option("--max-depth", d_depth, "Maximum module depth below the root (default 3)");
  decomp->add_flag("--llm-partitioner", d_llm, "Ask the generator model to group components");
  decomp->add_option("--mock-scripts", common.mock_scripts, "Serve every model call from scripted replies in DIR");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate documentation for a repository or graph JSON");
  std::string g_input;
  std::optional<std::string> g_out;
  std::optional<std::size_t> g_budget, g_depth, g_turns;
  bool g_resume = false, g_llm = false;
  gen->add_option("input", g_input, "Repository root or graph JSON")->required();
  gen->add_option("--out,-o", g_out, "Workspace directory")->required(false);
  gen->add_option("--budget", g_budget, "Leaf token budget (default 32768)");
  gen->add_option("--max-depth", g_depth, "Maximum module depth below the root (default 3)");
  gen->add_option("--max-turns", g_turns, "Turn limit per agent (default 40)");
  gen->add_flag("--resume", g_resume, "Continue an interrupted run in --out");
  gen->add_flag("--llm-partitioner", g_llm, "Ask the generator model to group components");
  gen->add_option("--mock-scripts", common.mock_scripts, "Serve every model call from scripted replies in DIR");

  // rubric
  auto* rub = app.add_subcommand("rubric", "Generate an evaluation rubric from official documentation");
  std::string r_docs, r_generators;
  std::optional<std::string> r_out;
  rub->add_option("docs", r_docs, "Directory of markdown documentation")->required();
  rub->add_option("--out,-o", r_out, "Write the rubric here instead of stdout");
  rub->add_option("--generators", r_generators, "Comma-separated rubric generator names");
  rub->add_option("--mock-scripts", common.mock_scripts, "Serve every model call from scripted replies in DIR");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score a documentation workspace against a rubric");
  std::string e_docs, e_rubric, e_judges;
  std::optional<std::string> e_report;
  ev->add_option("workspace", e_docs, "Documentation directory (e.g. generate --out)")->required();
  ev->add_option("--rubric", e_rubric, "Rubric JSON")->required();
  ev->add_option("--judges", e_judges, "Comma-separated judge names");
  ev->add_option("--report-out", e_report, "Write the report here instead of stdout");
  ev->add_option("--mock-scripts", common.mock_scripts, "Serve every model call from scripted replies in DIR");

  // reliability
  auto* rel = app.add_subcommand("reliability", "Semantic and structural consistency of rubrics");
  std::vector<std::string> l_rubrics;
  std::optional<std::string> l_out;
  rel->add_option("--rubrics", l_rubrics, "Two or more rubric JSON files")->required()->expected(2, -1);
  rel->add_option("--out,-o", l_out, "Write the result here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    cli::AppConfig cfg = layered(common);
    if (*analyze) {
      require_path(a_root, "repository root");
      cfg.ignore.insert(cfg.ignore.end(), a_ignore.begin(), a_ignore.end());
      cli::validate_config(cfg);
      auto scan = graph::scan_repository(a_root, scan_options(cfg));
      auto result = graph::analyze_units(scan.units, graph::default_tokenizer(), cfg.threads);
      for (const auto& w : scan.warnings) std::cerr << "warning: " << w.path << ": " << w.message << "\n";
      for (const auto& d : result.diagnostics) std::cerr << "warning: " << d.path << ": " << d.message << "\n";
      graph::ExportOptions eo;
      eo.include_source = !a_no_source;
      emit(graph::export_graph(result.graph, eo), a_out);
      return kOk;
    }
    if (*decomp) {
      if (d_budget) cfg.budget = *d_budget;
      if (d_depth) cfg.max_depth = *d_depth;
      if (d_llm) cfg.llm_partitioner = true;
      cli::validate_config(cfg);
      auto g = load_graph(d_graph);
      auto dag = graph::condense_cycles(g);
      auto entry = decompose::find_entry_points(dag);
      decompose::DecomposeOptions opt{cfg.budget, cfg.max_depth, cfg.max_children};
      std::unique_ptr<Backends> backends;
      std::unique_ptr<decompose::LlmPartitioner> llm;
      if (cfg.llm_partitioner) {
        backends = std::make_unique<Backends>(cfg);
        auto model = generator_model(cfg, *backends);
        llm = std::make_unique<decompose::LlmPartitioner>(backends->provider->backend_for(model), model);
      }
      decompose::DecomposeDiagnostics diag;
      auto tree = decompose::decompose(g, entry, opt, llm.get(), &diag);
      for (const auto& f : diag.fallbacks) std::cerr << "warning: " << f << ": partitioner rejected, used greedy split\n";
      emit(pretty(tree.to_json()), d_out);
      return kOk;
    }
    if (*gen) {
      if (g_out) cfg.out = *g_out;
      if (g_budget) cfg.budget = *g_budget;
      if (g_depth) cfg.max_depth = *g_depth;
      if (g_turns) cfg.max_turns = *g_turns;
      if (g_llm) cfg.llm_partitioner = true;
      cli::validate_config(cfg);
      if (cfg.out.empty()) throw ValidationError("generate needs --out");
      require_path(g_input, "input");
      Backends backends(cfg);
      auto model = generator_model(cfg, backends);
      auto& backend = backends.provider->backend_for(model);
      doc::PipelineOptions po;
      po.scan = scan_options(cfg);
      po.decompose = {cfg.budget, cfg.max_depth, cfg.max_children};
      po.engine.max_turns = cfg.max_turns;
      po.engine.delegation_guard = cfg.delegation_guard;
      po.resume = g_resume;
      po.llm_partitioner = cfg.llm_partitioner;
      po.threads = cfg.threads;
      doc::PipelineResult r;
      if (fs::is_regular_file(g_input)) {
        auto g = load_graph(g_input);
        r = doc::run_pipeline(g, cfg.out, backend, model, po, fs::path(g_input).stem().string());
      } else {
        r = doc::run_pipeline(fs::path(g_input), cfg.out, backend, model, po);
      }
      json events = json::array();
      for (const auto& e : r.events) events.push_back({{"module", e.module_id}, {"kind", e.kind}, {"detail", e.detail}});
      std::size_t leaves = r.tree.leaves().size();
      std::size_t nodes = r.tree.nodes().size();
      json summary{{"schema_version", 1},
                   {"out", cfg.out},
                   {"seed", cfg.seed},
                   {"documents", r.write_log.size()},
                   {"leaves", leaves},
                   {"parents", nodes - leaves - 1},
                   {"events", std::move(events)},
                   {"problems", r.problems}};
      std::cout << pretty(summary);
      if (!r.problems.empty()) {
        for (const auto& p : r.problems) std::cerr << "error: " << p << "\n";
        return kRuntime;
      }
      return kOk;
    }
    if (*rub) {
      cli::validate_config(cfg);
      require_path(r_docs, "documentation directory");
      Backends backends(cfg);
      auto gens = pick_models(cfg.rubric_generators, r_generators, backends.mocked(), "rubric generator");
      eval::RubricGenerationOptions ro;
      if (!cfg.synthesizer.empty())
        for (const auto& g : gens)
          if (g.name == cfg.synthesizer) ro.synthesizer = g;
      auto docs = eval::parse_official_docs(r_docs);
      auto out = eval::generate_rubric(docs, gens, *backends.provider, ro);
      for (const auto& d : out.diagnostics) std::cerr << "warning: " << d << "\n";
      emit(pretty(eval::rubric_to_json(out.rubric)), r_out);
      return kOk;
    }
    if (*ev) {
      cli::validate_config(cfg);
      require_path(e_rubric, "rubric");
      auto rubric = eval::load_rubric(e_rubric);
      require_path(e_docs, "workspace");
      Backends backends(cfg);
      auto judges = pick_models(cfg.judges, e_judges, backends.mocked(), "judge");
      eval::EvaluateOptions eo;
      eo.threads = cfg.threads == 0 ? 1 : cfg.threads;
      auto report = eval::evaluate(fs::path(e_docs), rubric, judges, *backends.provider, eo);
      emit(pretty(report.to_json()), e_report);
      return kOk;
    }
    if (*rel) {
      cli::validate_config(cfg);
      std::vector<eval::RubricNode> rubrics;
      for (const auto& f : l_rubrics) {
        require_path(f, "rubric");
        rubrics.push_back(eval::load_rubric(f));
      }
      std::unique_ptr<reliability::EmbeddingProvider> provider;
      if (cfg.embeddings.provider == "remote") {
        provider = std::make_unique<reliability::RemoteEmbedder>(
            std::shared_ptr<agent::HttpTransport>(agent::make_default_transport()), cfg.embeddings.endpoint,
            cfg.embeddings.model, cfg.embeddings.api_key_env);
      } else {
        provider = std::make_unique<reliability::HashingEmbedder>(cfg.embeddings.dims);
      }
      auto result = reliability::reliability_scores(rubrics, *provider);
      emit(pretty(result.to_json()), l_out);
      return kOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const RemoteModelError& e) {
    std::cerr << "error: remote model: " << e.what() << "\n";
    return kRemote;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kValidation;
}
