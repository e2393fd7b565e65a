#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "facegraph/dataset.hpp"

namespace facegraph {

enum class InitialAlgorithm { kDbscan, kKMeans, kRandom };

std::string to_string(InitialAlgorithm algorithm);
InitialAlgorithm parse_initial_algorithm(const std::string& name);

struct InitialParams {
  InitialAlgorithm algorithm = InitialAlgorithm::kDbscan;
  double eps = 50.0;
  std::size_t min_samples = 3;
  /// Cluster count for k-means and random.
  std::size_t k = 50;
};

/// Which optional operations run. Short names follow the ablation labels:
/// filter, check, time, same, knn, neghigh. `check` covers both duplicate
/// detection and the later label propagation.
struct OperationFlags {
  bool filter = true;
  bool check = true;
  bool time = true;
  bool same = true;
  bool knn = true;
  bool neghigh = true;

  static OperationFlags none() { return {false, false, false, false, false, false}; }
  static OperationFlags from_names(const std::vector<std::string>& names);
  std::vector<std::string> names() const;

  bool operator==(const OperationFlags&) const = default;
};

struct AblationRow {
  std::string label;
  OperationFlags operations;
};

struct PipelineConfig {
  double quality_threshold = 0.3;

  Timestamp time_group_window = 10;
  double time_group_distance = 75.0;

  Timestamp duplicate_window = 3;
  double duplicate_distance = 25.0;

  InitialParams initial;

  /// Average-linkage stop distance when splitting cannot-link violations.
  double split_distance = 50.0;

  std::size_t knn_k = 5;
  std::size_t knn_votes = 4;

  double prune_threshold = 0.6;

  OperationFlags operations;
  std::uint64_t seed = 0;

  /// Rows for batch ablation; empty means the default sweeps.
  std::vector<AblationRow> ablation;

  void validate() const;
};

PipelineConfig pipeline_config_from_json_text(const std::string& text, const std::string& source);
PipelineConfig load_pipeline_config(const std::filesystem::path& file);
/// Canonical JSON (all fields, defaults filled in).
std::string pipeline_config_to_json(const PipelineConfig& config);

/// Initial clustering alone, then one operation at a time.
std::vector<AblationRow> individual_sweep();
/// Initial clustering alone, then operations added one by one.
std::vector<AblationRow> cumulative_sweep();
/// Configured rows, or both default sweeps with duplicate rows removed.
std::vector<AblationRow> ablation_rows(const PipelineConfig& config);

}  // namespace facegraph
