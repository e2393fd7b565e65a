// facegraph command-line entry point.
//
// Exit codes: 0 success, 1 runtime/stage failure, 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "facegraph/curation_api.hpp"
#include "facegraph/evaluation.hpp"
#include "facegraph/graph.hpp"
#include "facegraph/io.hpp"
#include "facegraph/pipeline.hpp"
#include "facegraph/run_manifest.hpp"
#include "facegraph/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace facegraph;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("facegraph");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FACEGRAPH_LOG_LEVEL")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ignoring unknown FACEGRAPH_LOG_LEVEL '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

void require_readable(const fs::path& p) {
  if (!fs::exists(p)) throw IoError("cannot read '" + p.string() + "': no such file or directory");
}

fs::path manifest_path_for(const fs::path& out) {
  fs::path m = out;
  return m.replace_extension(".manifest.json");
}

// generate ------------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  require_readable(a.config);
  const SynthConfig cfg = load_synth_config(a.config);
  const SyntheticEvent ev = generate_synthetic_event(cfg);

  const fs::path out(a.out);
  save_dataset(ev.dataset, out);
  save_ground_truth(ev.truth, out / "truth.json");
  save_planted_graph(ev.planted, out / "planted_graph.json");

  std::size_t low_quality = ev.markers.low_quality_faces.size();
  std::cout << "event " << ev.dataset.event_id() << "\n"
            << "faces " << ev.dataset.faces().size() << "\n"
            << "images " << ev.dataset.images().size() << "\n"
            << "participants " << ev.truth.identities.size() << "\n"
            << "duplicate_images " << ev.markers.duplicate_of.size() << "\n"
            << "low_quality_faces " << low_quality << "\n"
            << "planted_edges " << ev.planted.edges.size() << "\n";
  return kOk;
}

// cluster -------------------------------------------------------------------

struct ClusterArgs {
  std::string dataset;
  std::string config;
  std::string out;
  bool ablation = false;
};

void write_manifest(const fs::path& file, const PipelineConfig& config, const std::string& hash,
                    const StageTimings& timings, std::vector<std::string> outputs) {
  RunManifest m;
  m.config = pipeline_config_to_json(config);
  m.dataset_hash = hash;
  m.seed = config.seed;
  m.timings_ms = timings;
  m.outputs = std::move(outputs);
  write_file(file, run_manifest_to_json(m));
}

int cmd_cluster(const ClusterArgs& a) {
  require_readable(a.dataset);
  require_readable(a.config);
  const PipelineConfig config = load_pipeline_config(a.config);
  const EventDataset dataset = load_dataset(a.dataset);
  const std::string hash = dataset_hash(a.dataset);
  const fs::path out(a.out);

  if (!a.ablation) {
    StageTimings timings;
    const Clustering c = run_pipeline(dataset, config, &timings);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_clustering(c, out);
    write_manifest(manifest_path_for(out), config, hash, timings, {out.string()});
    std::cout << "clusters " << c.clusters.size() << "\n"
              << "unassigned " << c.unassigned.size() << "\n"
              << "rejected " << c.rejected.size() << "\n";
    return kOk;
  }

  fs::create_directories(out);
  StageTimings all_timings;
  std::vector<std::string> outputs;
  for (const AblationRow& row : ablation_rows(config)) {
    PipelineConfig rc = config;
    rc.operations = row.operations;
    rc.ablation.clear();
    StageTimings timings;
    const Clustering c = run_pipeline(dataset, rc, &timings);
    const fs::path file = out / (row.label + ".json");
    save_clustering(c, file);
    outputs.push_back(file.string());
    for (const auto& [stage, ms] : timings) all_timings.emplace_back(row.label + "/" + stage, ms);
    std::cout << row.label << " clusters " << c.clusters.size() << "\n";
  }
  write_manifest(out / "manifest.json", config, hash, all_timings, outputs);
  return kOk;
}

// graph ---------------------------------------------------------------------

struct GraphArgs {
  std::string clustering;
  std::string dataset;
  std::string format = "json-nodelink";
  std::string out;
  std::size_t min_weight = 1;
};

int cmd_graph(const GraphArgs& a) {
  const GraphFormat format = parse_graph_format(a.format);
  require_readable(a.clustering);
  require_readable(a.dataset);
  const EventDataset dataset = load_dataset(a.dataset);
  const Clustering c = load_clustering(a.clustering);
  c.validate(dataset);
  const SocialGraph g = discover_graph(c, dataset).filtered(a.min_weight);
  write_file(a.out, export_graph(g, format));
  std::cout << "nodes " << g.nodes().size() << "\n"
            << "edges " << g.edges().size() << "\n";
  return kOk;
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string clustering;
  std::string truth;
  std::string dataset;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  require_readable(a.clustering);
  require_readable(a.truth);
  require_readable(a.dataset);
  const EventDataset dataset = load_dataset(a.dataset);
  const GroundTruth truth = load_ground_truth(a.truth);

  EvalReport report;
  const fs::path in(a.clustering);
  if (fs::is_directory(in)) {
    // Ablation batch: rows in manifest order; the last row is the overall one.
    const RunManifest m =
        run_manifest_from_json(read_file(in / "manifest.json"), (in / "manifest.json").string());
    for (const std::string& file : m.outputs) {
      const fs::path p(file);
      const Clustering c = load_clustering(p);
      c.validate(dataset);
      report.ablation.push_back(evaluate(c, truth, dataset, p.stem().string()));
    }
    if (report.ablation.empty()) throw ConfigError("ablation manifest lists no outputs");
    report.overall = report.ablation.back();
  } else {
    const Clustering c = load_clustering(in);
    c.validate(dataset);
    report.overall = evaluate(c, truth, dataset);
  }

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_file(out, report_to_json(report));
  fs::path csv = out;
  write_file(csv.replace_extension(".csv"), report_to_csv(report));

  for (const MetricRow& r : report.ablation.empty() ? std::vector<MetricRow>{report.overall}
                                                    : report.ablation) {
    std::cout << r.label << " precision " << r.precision << " recall " << r.recall << " f1 "
              << r.f1 << " rs " << r.rs << "\n";
  }
  return kOk;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
  std::string manifest;
  std::string dataset;
};

int cmd_verify(const VerifyArgs& a) {
  require_readable(a.manifest);
  require_readable(a.dataset);
  const RunManifest m = run_manifest_from_json(read_file(a.manifest), a.manifest);
  if (!verify_run_manifest(m, a.dataset)) {
    std::cerr << "dataset '" << a.dataset << "' no longer matches manifest hash "
              << m.dataset_hash << "\n";
    return kRuntimeFailure;
  }
  std::cout << "ok " << m.dataset_hash << "\n";
  return kOk;
}

// serve ---------------------------------------------------------------------

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string dataset;
  std::string clustering;
  std::string store;
  double potential_distance = 75.0;
};

int cmd_serve(const ServeArgs& a) {
  SessionOptions opts;
  opts.potential_distance = a.potential_distance;
  CurationApi api(opts);
  if (!a.store.empty() && fs::exists(fs::path(a.store) / "session.json")) {
    std::cout << "session " << api.add_session(CurationSession::reopen(a.store, opts)) << "\n";
  } else if (!a.dataset.empty() && !a.clustering.empty()) {
    std::optional<fs::path> store;
    if (!a.store.empty()) store = a.store;
    std::cout << "session "
              << api.add_session(CurationSession::open(a.dataset, a.clustering, opts, store))
              << "\n";
  }
  CurationHttpServer server(api);
  std::cout << "listening " << a.host << ":" << server.bind(a.host, a.port) << std::endl;
  server.listen();
  return kOk;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const MissingTruthError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Event face clustering, connection discovery and evaluation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic event");
  generate->add_option("--config", gen.config, "Synthetic generator config (JSON)")->required();
  generate->add_option("--out", gen.out, "Output directory")->required();

  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Run the clustering pipeline");
  cluster->add_option("--dataset", cl.dataset, "Dataset directory")->required();
  cluster->add_option("--config", cl.config, "Pipeline config (JSON)")->required();
  cluster->add_option("--out", cl.out, "Clustering file, or a directory with --ablation")
      ->required();
  cluster->add_flag("--ablation", cl.ablation, "Run every ablation row");

  GraphArgs gr;
  auto* graph = app.add_subcommand("graph", "Discover the participant connection graph");
  graph->add_option("--clustering", gr.clustering, "Clustering file")->required();
  graph->add_option("--dataset", gr.dataset, "Dataset directory")->required();
  graph->add_option("--format", gr.format, "json-nodelink or dot")->capture_default_str();
  graph->add_option("--out", gr.out, "Output file")->required();
  graph->add_option("--min-weight", gr.min_weight, "Drop edges seen on fewer images")
      ->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a clustering against ground truth");
  eval->add_option("--clustering", ev.clustering, "Clustering file or ablation directory")
      ->required();
  eval->add_option("--truth", ev.truth, "Ground truth file")->required();
  eval->add_option("--dataset", ev.dataset, "Dataset directory")->required();
  eval->add_option("--out", ev.out, "Report JSON path; CSV is written next to it")->required();

  VerifyArgs ve;
  auto* verify = app.add_subcommand("verify", "Check a run manifest against its dataset");
  verify->add_option("--manifest", ve.manifest, "Run manifest")->required();
  verify->add_option("--dataset", ve.dataset, "Dataset directory")->required();

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Serve the curation HTTP API");
  serve->add_option("--host", sv.host)->capture_default_str();
  serve->add_option("--port", sv.port)->capture_default_str();
  serve->add_option("--dataset", sv.dataset, "Open a session on this dataset");
  serve->add_option("--clustering", sv.clustering, "Machine clustering for that session");
  serve->add_option("--store", sv.store, "Session store directory (reopened if it exists)");
  serve->add_option("--potential-distance", sv.potential_distance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (*generate) return guarded([&] { return cmd_generate(gen); });
  if (*cluster) return guarded([&] { return cmd_cluster(cl); });
  if (*graph) return guarded([&] { return cmd_graph(gr); });
  if (*eval) return guarded([&] { return cmd_eval(ev); });
  if (*verify) return guarded([&] { return cmd_verify(ve); });
  if (*serve) return guarded([&] { return cmd_serve(sv); });
  return kUsageError;
}
