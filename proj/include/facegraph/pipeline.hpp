#pragma once

#include <string>
#include <utility>
#include <vector>

#include "facegraph/clustering.hpp"
#include "facegraph/config.hpp"
#include "facegraph/dataset.hpp"

namespace facegraph {

/// Wall-clock milliseconds per executed stage, in execution order.
using StageTimings = std::vector<std::pair<std::string, double>>;

/// Raised when a stage fails; carries the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Runs the enabled operations in fixed order:
/// filter -> dedup -> time grouping -> initial clustering -> must-links ->
/// co-occurrence split -> kNN -> prune -> duplicate propagation.
Clustering run_pipeline(const EventDataset& dataset, const PipelineConfig& config,
                        StageTimings* timings = nullptr);

}  // namespace facegraph
