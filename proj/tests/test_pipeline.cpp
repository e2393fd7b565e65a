#include <doctest.h>

#include "facegraph/evaluation.hpp"
#include "facegraph/ops.hpp"
#include "facegraph/pipeline.hpp"
#include "facegraph/synth.hpp"
#include "support.hpp"

using namespace facegraph;
using facegraph::testing::Builder;
using facegraph::testing::TempDir;

TEST_SUITE("clustering type") {
  const EventDataset d = Builder()
                             .image("i1")
                             .image("i2")
                             .face("a", "i1", {0, 0})
                             .face("b", "i1", {1, 0})
                             .face("c", "i2", {2, 0})
                             .build();

  TEST_CASE("partition invariant") {
    Clustering c;
    c.clusters = {{"c1", {"a"}}};
    c.unassigned = {"b"};
    CHECK_THROWS_AS(c.validate(d), IntegrityError);  // c missing
    c.rejected = {"c"};
    CHECK_NOTHROW(c.validate(d));
    c.unassigned.insert("a");
    CHECK_THROWS_AS(c.validate(d), IntegrityError);  // overlap
    c.unassigned = {"b"};
    c.clusters["c2"] = {};
    CHECK_THROWS_AS(c.validate(d), IntegrityError);  // empty cluster
    c.clusters.erase("c2");
    c.clusters["c1"].insert("ghost");
    CHECK_THROWS_AS(c.validate(d), IntegrityError);
  }

  TEST_CASE("json round trip") {
    TempDir dir;
    Clustering c;
    c.clusters = {{"c1", {"a", "c"}}};
    c.unassigned = {"b"};
    c.provenance = {"cluster_initial:dbscan"};
    save_clustering(c, dir / "c.json");
    CHECK(load_clustering(dir / "c.json") == c);
    CHECK_THROWS_AS(clustering_from_json("{\"clusters\": 3}", "x"), ParseError);
  }

  TEST_CASE("fresh ids and violations") {
    Clustering c;
    c.clusters = {{"c1", {"a", "b"}}, {"c7", {"c"}}};
    CHECK(fresh_cluster_id(c, {}) == "c8");
    CHECK(fresh_cluster_id(c, {"c8", "c12"}) == "c13");
    CHECK(cannot_link_violations(c, d) == std::vector<std::string>{"c1"});
  }

  TEST_CASE("same_partition ignores ids") {
    Clustering a, b;
    a.clusters = {{"c1", {"a"}}, {"c2", {"b", "c"}}};
    b.clusters = {{"x", {"b", "c"}}, {"y", {"a"}}};
    CHECK(a.same_partition(b));
    b.clusters["y"].insert("z");
    CHECK(!a.same_partition(b));
  }
}

TEST_SUITE("pipeline config") {
  TEST_CASE("votes above k is a config error") {
    PipelineConfig c;
    c.knn_k = 5;
    c.knn_votes = 6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(
        pipeline_config_from_json_text(R"({"knn": {"enabled": true, "k": 5, "votes_required": 6}})", "p.json"),
        ConfigError);
  }

  TEST_CASE("thresholds out of range") {
    PipelineConfig c;
    c.quality_threshold = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PipelineConfig{};
    c.prune_threshold = 1.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PipelineConfig{};
    c.time_group_distance = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(pipeline_config_from_json_text(R"({"initial": {"algorithm": "spectral"}})", "p.json"),
                    ConfigError);
  }

  TEST_CASE("defaults") {
    const PipelineConfig c = pipeline_config_from_json_text("{}", "p.json");
    CHECK(c.initial.eps == 50.0);
    CHECK(c.initial.min_samples == 3);
    CHECK(c.knn_k == 5);
    CHECK(c.knn_votes == 4);
    CHECK(c.time_group_window == 10);
    CHECK(c.time_group_distance == 75.0);
    CHECK(c.duplicate_window == 3);
    CHECK(c.duplicate_distance == 25.0);
    CHECK(c.split_distance == 50.0);
    CHECK(c.operations == OperationFlags{});
  }

  TEST_CASE("canonical json round trip") {
    PipelineConfig c;
    c.seed = 42;
    c.initial.algorithm = InitialAlgorithm::kKMeans;
    c.initial.k = 17;
    c.operations.time = false;
    c.ablation = {{"only-filter", OperationFlags::from_names({"filter"})}};
    const std::string text = pipeline_config_to_json(c);
    const PipelineConfig back = pipeline_config_from_json_text(text, "p.json");
    CHECK(pipeline_config_to_json(back) == text);
    CHECK(back.operations == c.operations);
    CHECK(back.ablation.size() == 1);
  }

  TEST_CASE("ablation rows") {
    CHECK(individual_sweep().size() == 7);
    CHECK(cumulative_sweep().size() == 7);
    CHECK(cumulative_sweep().back().label == "filter+check+time+same+knn+neghigh");
    CHECK(cumulative_sweep().back().operations == OperationFlags{});
    PipelineConfig c;
    CHECK(ablation_rows(c).size() == 12);
    c.ablation = {{"a", OperationFlags::none()}, {"b", OperationFlags{}}};
    CHECK(ablation_rows(c).size() == 2);
    CHECK_THROWS_AS(OperationFlags::from_names({"bogus"}), ConfigError);
  }
}

TEST_SUITE("run_pipeline") {
  TEST_CASE("everything off equals the initial clustering") {
    SynthConfig sc;
    sc.separation = 4.0;
    sc.low_quality_prob = 0.1;
    const auto ev = generate_synthetic_event(sc);
    PipelineConfig pc;
    pc.operations = OperationFlags::none();
    FaceSet all;
    for (const auto& f : ev.dataset.faces()) all.insert(f.face_id);
    const Clustering direct = cluster_initial(ev.dataset, all, {}, pc.initial, pc.seed);
    const Clustering piped = run_pipeline(ev.dataset, pc);
    CHECK(piped.clusters == direct.clusters);
    CHECK(piped.unassigned == direct.unassigned);
    CHECK(piped.provenance == direct.provenance);
  }

  TEST_CASE("provenance lists the steps in order") {
    SynthConfig sc;
    sc.duplicate_rate = 0.1;
    const auto ev = generate_synthetic_event(sc);
    StageTimings t;
    const Clustering c = run_pipeline(ev.dataset, PipelineConfig{}, &t);
    CHECK(c.provenance == std::vector<std::string>{"filter_faces", "deduplicate_images",
                                                   "time_group_links", "cluster_initial:dbscan",
                                                   "apply_must_links", "enforce_cooccurrence",
                                                   "knn_assign", "prune_low_quality_clusters",
                                                   "propagate_duplicate_labels"});
    REQUIRE(!t.empty());
    for (const auto& [stage, ms] : t) CHECK(ms >= 0.0);
  }

  TEST_CASE("deterministic for a fixed seed across algorithms") {
    SynthConfig sc;
    sc.separation = 3.0;
    sc.duplicate_rate = 0.1;
    sc.low_quality_prob = 0.1;
    sc.burst_length = 3;
    const auto ev = generate_synthetic_event(sc);
    for (auto algo : {InitialAlgorithm::kDbscan, InitialAlgorithm::kKMeans, InitialAlgorithm::kRandom}) {
      PipelineConfig pc;
      pc.initial.algorithm = algo;
      pc.seed = 9;
      const Clustering a = run_pipeline(ev.dataset, pc);
      const Clustering b = run_pipeline(ev.dataset, pc);
      CHECK(a == b);
      CHECK(clustering_to_json(a) == clustering_to_json(b));
      CHECK(cannot_link_violations(a, ev.dataset).empty());
      a.validate(ev.dataset);
    }
  }

  TEST_CASE("well-separated event reaches F1 >= 0.95") {
    SynthConfig sc;
    sc.n_participants = 50;
    sc.separation = 10.0;
    const auto ev = generate_synthetic_event(sc);
    const Clustering c = run_pipeline(ev.dataset, PipelineConfig{});
    CHECK(precision_recall_f1(pair_confusion(c, ev.truth)).f1 >= 0.95);
  }

  TEST_CASE("noisy event: full pipeline is no worse than DBSCAN alone") {
    SynthConfig sc;
    sc.separation = 3.0;
    sc.low_quality_prob = 0.1;
    const auto ev = generate_synthetic_event(sc);
    PipelineConfig only;
    only.operations = OperationFlags::none();
    const double base = precision_recall_f1(pair_confusion(run_pipeline(ev.dataset, only), ev.truth)).f1;
    const double full =
        precision_recall_f1(pair_confusion(run_pipeline(ev.dataset, PipelineConfig{}), ev.truth)).f1;
    CHECK(full >= base);
  }

  TEST_CASE("stage failures carry the stage name") {
    const EventDataset d = Builder().image("i").face("a", "i", {0, 0}).face("b", "i", {1, 0}).build();
    PipelineConfig pc;
    pc.initial.algorithm = InitialAlgorithm::kKMeans;
    pc.initial.k = 10;
    try {
      run_pipeline(d, pc);
      FAIL("expected a stage error");
    } catch (const StageError& e) {
      CHECK(e.stage() == "cluster_initial");
    }
  }
}
