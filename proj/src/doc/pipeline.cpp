// SPDX-License-Identifier: Apache-2.0
#include "codewiki/doc/pipeline.hpp"

#include <fstream>

#include "codewiki/core/text.hpp"
#include "codewiki/decompose/llm_partitioner.hpp"
#include "codewiki/graph/condense.hpp"
#include "codewiki/graph/extract.hpp"
#include "codewiki/graph/serialize.hpp"

namespace codewiki::doc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json manifest_json(const std::string& state, const std::string& error, const DocEngine& engine,
                   const DocWorkspace& ws, const PipelineOptions& opt, const std::string& repo_name) {
  json log = json::array();
  for (const auto& e : ws.write_log()) log.push_back({{"seq", e.seq}, {"module", e.module_id}, {"path", e.path}});
  json events = json::array();
  for (const auto& e : engine.events()) events.push_back({{"module", e.module_id}, {"kind", e.kind}, {"detail", e.detail}});
  json m{{"schema_version", 1},
         {"state", state},
         {"repo_name", repo_name},
         {"options",
          {{"budget", opt.decompose.budget}, {"max_depth", opt.decompose.max_depth}, {"max_turns", opt.engine.max_turns}}},
         {"tree", engine.tree().to_json()},
         {"delegated", engine.delegated()},
         {"write_log", std::move(log)},
         {"events", std::move(events)}};
  if (!error.empty()) m["error"] = error;
  return m;
}

void prepare_output(const fs::path& out) {
  if (fs::exists(out) && !fs::is_directory(out)) throw ValidationError("output path is not a directory: " + out.string());
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!fs::exists(out / kMetaDir / "manifest.json"))
      throw ValidationError("output directory is not empty and holds no previous run: " + out.string());
    for (const auto& e : fs::directory_iterator(out)) fs::remove_all(e.path());
  }
  fs::create_directories(out / kMetaDir);
}

PipelineResult drive(const graph::DependencyGraph& graph, decompose::ModuleTree tree, const fs::path& out,
                     agent::ChatBackend& backend, const agent::ModelConfig& model, const PipelineOptions& options,
                     const std::string& repo_name, const json* resume) {
  EngineOptions eo = options.engine;
  eo.budget = options.decompose.budget;
  eo.max_depth = options.decompose.max_depth;
  eo.repo_name = repo_name;
  DocWorkspace ws(out);
  DocEngine engine(graph, std::move(tree), ws, backend, model, eo);
  if (resume) {
    std::vector<WriteLogEntry> log;
    for (const auto& e : resume->at("write_log"))
      log.push_back({e.at("seq").get<std::size_t>(), e.at("module").get<std::string>(), e.at("path").get<std::string>()});
    ws.restore_log(std::move(log));
    std::vector<EngineEvent> events;
    for (const auto& e : resume->at("events"))
      events.push_back({e.at("module").get<std::string>(), e.at("kind").get<std::string>(), e.at("detail").get<std::string>()});
    engine.restore(resume->at("delegated").get<std::set<std::string>>(), std::move(events));
  }
  const fs::path manifest = out / kMetaDir / "manifest.json";
  const fs::path transcripts = out / kMetaDir / "transcripts.jsonl";
  auto save = [&](const std::string& state, const std::string& error) {
    write_file(manifest, manifest_json(state, error, engine, ws, options, repo_name).dump(2) + "\n");
  };
  engine.on_commit = [&] { save("in_progress", ""); };
  engine.on_transcript = [&](const std::string& lines) {
    std::ofstream f(transcripts, std::ios::binary | std::ios::app);
    if (!f) throw IoError("cannot append to " + transcripts.string());
    f << lines;
  };
  save("in_progress", "");
  try {
    engine.run();
  } catch (const Error& e) {
    save("failed", e.what());
    throw;
  }
  save("complete", "");
  PipelineResult r;
  r.tree = engine.tree();
  r.write_log = ws.write_log();
  r.events = engine.events();
  r.problems = verify_workspace(engine.tree(), engine.registry(), ws);
  return r;
}

json load_manifest(const fs::path& out) {
  const fs::path p = out / kMetaDir / "manifest.json";
  if (!fs::exists(p)) throw ValidationError("nothing to resume: " + p.string() + " not found");
  try {
    json m = json::parse(read_file(p));
    if (m.value("schema_version", 0) != 1) throw ValidationError("unsupported manifest schema_version");
    return m;
  } catch (const json::exception& e) {
    throw ValidationError("bad manifest " + p.string() + ": " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const graph::DependencyGraph& graph, const fs::path& out, agent::ChatBackend& backend,
                            const agent::ModelConfig& model, const PipelineOptions& options,
                            const std::string& repo_name) {
  if (options.resume) {
    json m = load_manifest(out);
    auto tree = decompose::ModuleTree::from_json(m.at("tree"));
    return drive(graph, std::move(tree), out, backend, model, options, m.value("repo_name", repo_name), &m);
  }
  prepare_output(out);
  write_file(out / kMetaDir / "graph.json", graph::export_graph(graph));
  auto dag = graph::condense_cycles(graph);
  auto entry = decompose::find_entry_points(dag);
  std::unique_ptr<decompose::LlmPartitioner> llm;
  if (options.llm_partitioner) llm = std::make_unique<decompose::LlmPartitioner>(backend, model);
  auto tree = decompose::decompose(graph, entry, options.decompose, llm.get());
  return drive(graph, std::move(tree), out, backend, model, options, repo_name, nullptr);
}

PipelineResult run_pipeline(const fs::path& repo_root, const fs::path& out, agent::ChatBackend& backend,
                            const agent::ModelConfig& model, const PipelineOptions& options) {
  std::string name = fs::weakly_canonical(repo_root).filename().string();
  if (name.empty()) name = "repository";
  if (options.resume) {
    auto graph = graph::import_graph(read_file(out / kMetaDir / "graph.json"));
    return run_pipeline(graph, out, backend, model, options, name);
  }
  auto scan = graph::scan_repository(repo_root, options.scan);
  auto analysis = graph::analyze_units(scan.units, graph::default_tokenizer(), options.threads);
  return run_pipeline(analysis.graph, out, backend, model, options, name);
}

}  // namespace codewiki::doc
