#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "facegraph/errors.hpp"

namespace facegraph {

using Embedding = std::vector<double>;

/// Seconds since epoch.
using Timestamp = std::int64_t;

struct FaceRecord {
  std::string face_id;
  std::string image_id;
  Embedding embedding;
  double quality_score = 1.0;
  std::optional<std::string> ground_truth_id;

  bool operator==(const FaceRecord&) const = default;
};

struct ImageRecord {
  std::string image_id;
  Timestamp capture_time = 0;
  std::vector<std::string> face_ids;
  /// Opaque reference (URL or path) resolved by the curation UI. Empty means
  /// "use image_id".
  std::string uri;

  bool operator==(const ImageRecord&) const = default;
};

double euclidean(std::span<const double> a, std::span<const double> b);

/// One event: images, the faces detected on them, and lookup indices.
///
/// Construction validates referential integrity, id uniqueness and
/// dimension uniformity; an EventDataset that exists is valid.
class EventDataset {
 public:
  EventDataset(std::string event_id, std::size_t dimension,
               std::vector<ImageRecord> images, std::vector<FaceRecord> faces);

  const std::string& event_id() const { return event_id_; }
  std::size_t dimension() const { return dimension_; }
  const std::vector<ImageRecord>& images() const { return images_; }
  const std::vector<FaceRecord>& faces() const { return faces_; }

  bool has_face(const std::string& face_id) const;
  bool has_image(const std::string& image_id) const;

  std::size_t face_index(const std::string& face_id) const;
  std::size_t image_index(const std::string& image_id) const;
  const FaceRecord& face(const std::string& face_id) const;
  const ImageRecord& image(const std::string& image_id) const;
  const ImageRecord& image_of(const std::string& face_id) const;
  /// Index into images() of the image a face (by index) lies on.
  std::size_t image_index_of(std::size_t face_index) const { return face_image_[face_index]; }

  double distance(std::size_t a, std::size_t b) const;
  double distance(const std::string& a, const std::string& b) const;

  bool operator==(const EventDataset& other) const;

 private:
  std::string event_id_;
  std::size_t dimension_;
  std::vector<ImageRecord> images_;
  std::vector<FaceRecord> faces_;
  std::unordered_map<std::string, std::size_t> face_lookup_;
  std::unordered_map<std::string, std::size_t> image_lookup_;
  std::vector<std::size_t> face_image_;
};

/// participant_id -> face ids.
struct GroundTruth {
  std::map<std::string, std::set<std::string>> identities;

  /// face_id -> participant_id.
  std::unordered_map<std::string, std::string> label_index() const;
  void validate(const EventDataset& dataset) const;
  /// Builds truth from the dataset's ground_truth_id fields.
  static GroundTruth from_dataset(const EventDataset& dataset);

  bool operator==(const GroundTruth&) const = default;
};

/// Participant co-appearance graph; key pairs are ordered (first < second).
struct PlantedGraph {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, std::size_t> edges;

  bool operator==(const PlantedGraph&) const = default;
};

/// Co-occurrence graph of ground-truth identities over a dataset.
PlantedGraph truth_cooccurrence_graph(const EventDataset& dataset, const GroundTruth& truth);

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kFacesFile = "faces.jsonl";

EventDataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const EventDataset& dataset, const std::filesystem::path& dir);

GroundTruth load_ground_truth(const std::filesystem::path& file);
void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& file);

PlantedGraph load_planted_graph(const std::filesystem::path& file);
void save_planted_graph(const PlantedGraph& graph, const std::filesystem::path& file);

}  // namespace facegraph
