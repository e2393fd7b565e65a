#include "facegraph/pipeline.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "facegraph/ops.hpp"

namespace facegraph {

namespace {

class StageRunner {
 public:
  explicit StageRunner(StageTimings* timings) : timings_(timings) {}

  template <typename Fn>
  auto run(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(name, start);
      } else {
        auto result = fn();
        record(name, start);
        return result;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  }

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point start) {
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    spdlog::debug("stage {} took {:.2f} ms", name, ms);
    if (timings_) {
      timings_->emplace_back(name, ms);
    }
  }

  StageTimings* timings_;
};

}  // namespace

Clustering run_pipeline(const EventDataset& dataset, const PipelineConfig& config,
                        StageTimings* timings) {
  config.validate();
  StageRunner stage(timings);
  const OperationFlags& ops = config.operations;
  std::vector<std::string> pre_steps;

  FaceSet kept;
  FaceSet rejected;
  if (ops.filter) {
    auto r = stage.run("filter_faces",
                       [&] { return filter_faces(dataset, config.quality_threshold); });
    kept = std::move(r.kept);
    rejected = std::move(r.rejected);
    pre_steps.emplace_back("filter_faces");
  } else {
    for (const FaceRecord& f : dataset.faces()) kept.insert(f.face_id);
  }

  DuplicateMap duplicates;
  FaceSet participating = kept;
  if (ops.check) {
    duplicates = stage.run("deduplicate_images", [&] {
      return deduplicate_images(dataset, kept, config.duplicate_window, config.duplicate_distance);
    });
    for (const auto& f : faces_on_duplicates(dataset, duplicates)) {
      participating.erase(f);
    }
    pre_steps.emplace_back("deduplicate_images");
  }

  MustLinkSet links;
  if (ops.time) {
    links = stage.run("time_group_links", [&] {
      return time_group_links(dataset, participating, config.time_group_window,
                              config.time_group_distance);
    });
    pre_steps.emplace_back("time_group_links");
  }

  Clustering c = stage.run("cluster_initial", [&] {
    return cluster_initial(dataset, participating, rejected, config.initial, config.seed);
  });
  c.provenance.insert(c.provenance.begin(), pre_steps.begin(), pre_steps.end());

  if (ops.time) {
    c = stage.run("apply_must_links", [&] { return apply_must_links(std::move(c), links, dataset); });
  }
  if (ops.same) {
    c = stage.run("enforce_cooccurrence", [&] {
      return enforce_cooccurrence(std::move(c), dataset, config.split_distance);
    });
  }
  if (ops.knn) {
    c = stage.run("knn_assign",
                  [&] { return knn_assign(std::move(c), dataset, config.knn_k, config.knn_votes); });
  }
  if (ops.neghigh) {
    c = stage.run("prune_low_quality_clusters", [&] {
      return prune_low_quality_clusters(std::move(c), dataset, config.prune_threshold);
    });
  }
  if (ops.check) {
    c = stage.run("propagate_duplicate_labels", [&] {
      return propagate_duplicate_labels(std::move(c), duplicates, dataset);
    });
  }
  c.validate(dataset);
  spdlog::info("pipeline: {} clusters, {} unassigned, {} rejected", c.clusters.size(),
               c.unassigned.size(), c.rejected.size());
  return c;
}

}  // namespace facegraph
