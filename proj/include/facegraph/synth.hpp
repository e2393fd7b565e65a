#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "facegraph/dataset.hpp"

namespace facegraph {

/// Parameters of the synthetic event generator.
///
/// Each participant gets a centroid; a face is its centroid plus isotropic
/// Gaussian noise whose expected norm is `sigma` (per-coordinate standard
/// deviation sigma/sqrt(dimension)). Low-quality faces are pulled toward a
/// shared "blur" point by `quality_noise_coupling`, so blurry faces of
/// different people look alike.
struct SynthConfig {
  std::string event_id = "synthetic";
  std::size_t n_participants = 50;
  std::size_t n_images = 300;
  std::size_t dimension = 128;
  /// Minimum pairwise centroid distance, in units of sigma.
  double separation = 10.0;
  double sigma = 25.0;

  double low_quality_prob = 0.0;
  /// Fraction of the way a low-quality embedding moves toward the blur point.
  double quality_noise_coupling = 0.7;
  /// Participants whose every face is low quality.
  std::size_t blurry_participants = 0;

  /// Maximum images per burst; the actual length is uniform in [1, burst_length].
  std::size_t burst_length = 1;
  Timestamp burst_gap_seconds = 2;
  double duplicate_rate = 0.0;

  std::size_t n_communities = 5;
  double p_intra = 0.3;
  double p_inter = 0.02;
  std::size_t max_faces_per_image = 5;
  /// Skew of participant popularity; weight of rank r is 1/(r+1)^exponent.
  double popularity_exponent = 0.8;

  Timestamp start_time = 1'600'000'000;
  Timestamp scene_gap_min = 20;
  Timestamp scene_gap_max = 120;

  std::uint64_t seed = 7;

  void validate() const;
};

SynthConfig load_synth_config(const std::filesystem::path& file);
SynthConfig synth_config_from_json_text(const std::string& text, const std::string& source);

/// What the generator planted, for oracle checks.
struct SynthMarkers {
  std::set<std::string> low_quality_faces;
  std::set<std::string> blurry_participants;
  /// duplicate image -> the image it copies.
  std::map<std::string, std::string> duplicate_of;
  std::map<std::string, Embedding> centroids;
};

struct SyntheticEvent {
  EventDataset dataset;
  GroundTruth truth;
  PlantedGraph planted;
  SynthMarkers markers;
};

/// Deterministic for a fixed config (including seed).
/// Throws ConfigError when the requested separation cannot be realised.
SyntheticEvent generate_synthetic_event(const SynthConfig& config);

}  // namespace facegraph
