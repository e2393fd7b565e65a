#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "facegraph/clustering.hpp"
#include "facegraph/dataset.hpp"
#include "facegraph/evaluation.hpp"
#include "facegraph/graph.hpp"
#include "facegraph/io.hpp"
#include "support.hpp"

using namespace facegraph;
using facegraph::testing::TempDir;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(FACEGRAPH_SOURCE_DIR) / "data" / "configs";

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const TempDir& tmp) {
  const fs::path out = tmp / ".stdout";
  const fs::path err = tmp / ".stderr";
  const std::string cmd = std::string("\"") + FACEGRAPH_CLI + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Event with a small amount of noise; generated once per test.
fs::path generate(const TempDir& tmp, const std::string& config = "easy.json") {
  const fs::path ds = tmp / "ds";
  const Run r = cli("generate --config " + q(kConfigs / config) + " --out " + q(ds), tmp);
  REQUIRE(r.code == 0);
  return ds;
}

fs::path write_pipeline(const TempDir& tmp, const std::string& name, const json& patch) {
  json cfg = json::parse(read_file(kConfigs / "pipeline.json"));
  cfg.merge_patch(patch);
  const fs::path p = tmp / name;
  write_file(p, cfg.dump(2));
  return p;
}

Clustering truth_clustering(const GroundTruth& truth) {
  Clustering c;
  for (const auto& [pid, faces] : truth.identities) c.clusters[pid] = faces;
  return c;
}

double report_f1(const fs::path& report) {
  return json::parse(read_file(report)).at("f1").get<double>();
}

}  // namespace

TEST_SUITE("cli generate") {
  TEST_CASE("writes dataset, truth and planted graph") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    CHECK(fs::exists(ds / "truth.json"));
    CHECK(fs::exists(ds / "planted_graph.json"));
    const EventDataset d = load_dataset(ds);
    CHECK(d.images().size() == 300);
  }

  TEST_CASE("missing config exits 2 and names the path") {
    TempDir tmp;
    const Run r = cli("generate --config " + q(tmp / "absent.json") + " --out " + q(tmp / "x"),
                      tmp);
    CHECK(r.code == 2);
    CHECK(r.err.find("absent.json") != std::string::npos);
  }

  TEST_CASE("missing required flag exits 2") {
    TempDir tmp;
    CHECK(cli("generate --out " + q(tmp / "x"), tmp).code == 2);
    CHECK(cli("", tmp).code == 2);
  }

  TEST_CASE("reruns are byte identical") {
    TempDir tmp;
    const Run a = cli("generate --config " + q(kConfigs / "noisy.json") + " --out " + q(tmp / "a"),
                      tmp);
    const Run b = cli("generate --config " + q(kConfigs / "noisy.json") + " --out " + q(tmp / "b"),
                      tmp);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    for (const auto& entry : fs::directory_iterator(tmp / "a")) {
      const fs::path other = tmp / "b" / entry.path().filename();
      REQUIRE(fs::exists(other));
      CHECK(read_file(entry.path()) == read_file(other));
    }
  }
}

TEST_SUITE("cli cluster") {
  TEST_CASE("single run writes clustering and manifest") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    const Run r = cli("cluster --dataset " + q(ds) + " --config " +
                          q(kConfigs / "pipeline.json") + " --out " + q(tmp / "c.json"),
                      tmp);
    REQUIRE(r.code == 0);
    const Clustering c = load_clustering(tmp / "c.json");
    c.validate(load_dataset(ds));
    CHECK(fs::exists(tmp / "c.manifest.json"));
    const json m = json::parse(read_file(tmp / "c.manifest.json"));
    CHECK(m.contains("dataset_hash"));
    CHECK(m.contains("timings_ms"));
  }

  TEST_CASE("more votes than neighbours is a config error") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    const fs::path cfg =
        write_pipeline(tmp, "bad.json", {{"knn", {{"k", 5}, {"votes_required", 6}}}});
    const Run r = cli("cluster --dataset " + q(ds) + " --config " + q(cfg) + " --out " +
                          q(tmp / "c.json"),
                      tmp);
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(tmp / "c.json"));
  }

  TEST_CASE("ablation writes one clustering per row") {
    TempDir tmp;
    const fs::path ds = generate(tmp, "noisy.json");
    const Run r = cli("cluster --ablation --dataset " + q(ds) + " --config " +
                          q(kConfigs / "pipeline.json") + " --out " + q(tmp / "abl"),
                      tmp);
    REQUIRE(r.code == 0);
    const json m = json::parse(read_file(tmp / "abl" / "manifest.json"));
    REQUIRE(m["outputs"].size() == 12);
    for (const auto& o : m["outputs"]) CHECK(fs::exists(o.get<std::string>()));
    CHECK(fs::path(m["outputs"][0].get<std::string>()).stem() == "initial");
  }
}

TEST_SUITE("cli graph") {
  TEST_CASE("perfect clustering reproduces the planted edges") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    const GroundTruth truth = load_ground_truth(ds / "truth.json");
    save_clustering(truth_clustering(truth), tmp / "perfect.json");
    const Run r = cli("graph --clustering " + q(tmp / "perfect.json") + " --dataset " + q(ds) +
                          " --out " + q(tmp / "g.json"),
                      tmp);
    REQUIRE(r.code == 0);
    const SocialGraph g = parse_node_link(read_file(tmp / "g.json"));
    const PlantedGraph planted = load_planted_graph(ds / "planted_graph.json");
    CHECK(g.edges().size() == planted.edges.size());
    for (const auto& [key, evidence] : g.edges()) {
      REQUIRE(planted.edges.contains(key));
      CHECK(planted.edges.at(key) == evidence.size());
    }
  }

  TEST_CASE("an empty clustering gives an empty graph") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    Clustering empty;
    const EventDataset d = load_dataset(ds);
    for (const auto& f : d.faces()) empty.unassigned.insert(f.face_id);
    save_clustering(empty, tmp / "empty.json");
    const Run r = cli("graph --clustering " + q(tmp / "empty.json") + " --dataset " + q(ds) +
                          " --out " + q(tmp / "g.json"),
                      tmp);
    REQUIRE(r.code == 0);
    const SocialGraph g = parse_node_link(read_file(tmp / "g.json"));
    CHECK(g.nodes().empty());
    CHECK(g.edges().empty());
  }

  TEST_CASE("dot output") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    save_clustering(truth_clustering(load_ground_truth(ds / "truth.json")), tmp / "p.json");
    const Run r = cli("graph --format dot --clustering " + q(tmp / "p.json") + " --dataset " +
                          q(ds) + " --out " + q(tmp / "g.dot"),
                      tmp);
    REQUIRE(r.code == 0);
    CHECK(read_file(tmp / "g.dot").rfind("graph", 0) == 0);
  }

  TEST_CASE("unknown format exits 2") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    save_clustering(truth_clustering(load_ground_truth(ds / "truth.json")), tmp / "p.json");
    const Run r = cli("graph --format graphml --clustering " + q(tmp / "p.json") +
                          " --dataset " + q(ds) + " --out " + q(tmp / "g.x"),
                      tmp);
    CHECK(r.code == 2);
    CHECK(r.err.find("graphml") != std::string::npos);
  }
}

TEST_SUITE("cli eval") {
  TEST_CASE("perfect clustering scores one") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    save_clustering(truth_clustering(load_ground_truth(ds / "truth.json")), tmp / "p.json");
    const Run r = cli("eval --clustering " + q(tmp / "p.json") + " --truth " +
                          q(ds / "truth.json") + " --dataset " + q(ds) + " --out " +
                          q(tmp / "r.json"),
                      tmp);
    REQUIRE(r.code == 0);
    const json rep = json::parse(read_file(tmp / "r.json"));
    CHECK(rep["f1"] == doctest::Approx(1.0));
    CHECK(rep["rs"] == doctest::Approx(1.0));
    const auto rows = parse_report_csv(read_file(tmp / "r.csv"));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].f1 == doctest::Approx(1.0));
  }

  TEST_CASE("random initial clustering scores below the full pipeline") {
    TempDir tmp;
    const fs::path ds = generate(tmp, "noisy.json");
    const fs::path rnd = write_pipeline(
        tmp, "random.json",
        {{"initial", {{"algorithm", "random"}, {"k", 50}}},
         {"filter", {{"enabled", false}}},
         {"dedup", {{"enabled", false}}},
         {"time_group", {{"enabled", false}}},
         {"cooccurrence", {{"enabled", false}}},
         {"knn", {{"enabled", false}}},
         {"prune", {{"enabled", false}}}});
    for (const auto& [name, cfg] :
         std::vector<std::pair<std::string, fs::path>>{{"rnd", rnd},
                                                       {"full", kConfigs / "pipeline.json"}}) {
      REQUIRE(cli("cluster --dataset " + q(ds) + " --config " + q(cfg) + " --out " +
                      q(tmp / (name + ".json")),
                  tmp)
                  .code == 0);
      REQUIRE(cli("eval --clustering " + q(tmp / (name + ".json")) + " --truth " +
                      q(ds / "truth.json") + " --dataset " + q(ds) + " --out " +
                      q(tmp / (name + "_report.json")),
                  tmp)
                  .code == 0);
    }
    CHECK(report_f1(tmp / "rnd_report.json") < report_f1(tmp / "full_report.json"));
  }

  TEST_CASE("ablation directory evaluates every row") {
    TempDir tmp;
    const fs::path ds = generate(tmp, "noisy.json");
    REQUIRE(cli("cluster --ablation --dataset " + q(ds) + " --config " +
                    q(kConfigs / "pipeline.json") + " --out " + q(tmp / "abl"),
                tmp)
                .code == 0);
    const Run r = cli("eval --clustering " + q(tmp / "abl") + " --truth " +
                          q(ds / "truth.json") + " --dataset " + q(ds) + " --out " +
                          q(tmp / "r.json"),
                      tmp);
    REQUIRE(r.code == 0);
    const auto rows = parse_report_csv(read_file(tmp / "r.csv"));
    REQUIRE(rows.size() == 12);
    CHECK(rows.front().label == "initial");
    const json rep = json::parse(read_file(tmp / "r.json"));
    CHECK(rep["ablation"].size() == 12);
    CHECK(rep["f1"] == doctest::Approx(rows.back().f1));
  }

  TEST_CASE("faces missing from the truth exit 1") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    GroundTruth truth = load_ground_truth(ds / "truth.json");
    truth.identities.erase(truth.identities.begin());
    save_ground_truth(truth, tmp / "partial.json");
    save_clustering(truth_clustering(load_ground_truth(ds / "truth.json")), tmp / "p.json");
    const Run r = cli("eval --clustering " + q(tmp / "p.json") + " --truth " +
                          q(tmp / "partial.json") + " --dataset " + q(ds) + " --out " +
                          q(tmp / "r.json"),
                      tmp);
    CHECK(r.code == 1);
  }
}

TEST_SUITE("cli verify") {
  TEST_CASE("detects dataset drift") {
    TempDir tmp;
    const fs::path ds = generate(tmp);
    REQUIRE(cli("cluster --dataset " + q(ds) + " --config " + q(kConfigs / "pipeline.json") +
                    " --out " + q(tmp / "c.json"),
                tmp)
                .code == 0);
    const std::string verify =
        "verify --manifest " + q(tmp / "c.manifest.json") + " --dataset " + q(ds);
    CHECK(cli(verify, tmp).code == 0);

    json manifest = json::parse(read_file(ds / "manifest.json"));
    manifest["event_id"] = "tampered";
    write_file(ds / "manifest.json", manifest.dump(2));
    const Run r = cli(verify, tmp);
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
  }
}
