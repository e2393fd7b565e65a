#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "facegraph/clustering.hpp"
#include "facegraph/config.hpp"
#include "facegraph/dataset.hpp"

namespace facegraph {

using FaceSet = std::set<std::string>;

struct FilterResult {
  FaceSet kept;
  FaceSet rejected;
};

/// Rejects faces whose quality_score is below `threshold`.
FilterResult filter_faces(const EventDataset& dataset, double threshold);

/// Unordered face pairs forced into one cluster; stored with first < second.
struct MustLinkSet {
  std::set<std::pair<std::string, std::string>> pairs;

  void add(const std::string& a, const std::string& b);
  bool contains(const std::string& a, const std::string& b) const;
  bool operator==(const MustLinkSet&) const = default;
};

/// Links kept faces on different images taken at most `window` seconds apart
/// whose embeddings are at most `distance` apart.
MustLinkSet time_group_links(const EventDataset& dataset, const FaceSet& kept, Timestamp window,
                             double distance);

/// duplicate image_id -> representative image_id. Representatives are never
/// themselves duplicates.
struct DuplicateMap {
  std::map<std::string, std::string> representative_of;

  bool empty() const { return representative_of.empty(); }
  bool operator==(const DuplicateMap&) const = default;
};

struct FacePairing {
  std::string left;
  std::string right;
  double distance;
};

/// Greedy minimum-distance one-to-one matching between two face lists.
/// Pairs are taken in ascending (distance, left id, right id) order.
std::vector<FacePairing> greedy_match(const EventDataset& dataset,
                                      const std::vector<std::string>& left,
                                      const std::vector<std::string>& right);

/// Two images are duplicates when taken within `window` seconds, they carry
/// the same number of kept faces, and the greedy matching of those faces has
/// every distance <= `distance`. Duplicate groups are closed transitively and
/// represented by their earliest image (ties: smallest image_id).
DuplicateMap deduplicate_images(const EventDataset& dataset, const FaceSet& kept, Timestamp window,
                                double distance);

/// Faces on duplicate images (which sit out clustering).
FaceSet faces_on_duplicates(const EventDataset& dataset, const DuplicateMap& duplicates);

/// Per-point labels, -1 for noise, in the order of `points`. Neighbourhoods
/// include the point itself when counting min_samples.
std::vector<int> dbscan_labels(const EventDataset& dataset, const std::vector<std::size_t>& points,
                               double eps, std::size_t min_samples);
/// k-means++ seeding then Lloyd iterations; empty clusters are dropped.
std::vector<int> kmeans_labels(const EventDataset& dataset, const std::vector<std::size_t>& points,
                               std::size_t k, std::uint64_t seed);
std::vector<int> random_labels(std::size_t n, std::size_t k, std::uint64_t seed);

/// Clusters the `participating` faces. Faces in `rejected` go to the rejected
/// pool; every other face is unassigned. Throws ConfigError when k exceeds
/// the number of participating faces, or when nothing participates.
Clustering cluster_initial(const EventDataset& dataset, const FaceSet& participating,
                           const FaceSet& rejected, const InitialParams& params,
                           std::uint64_t seed);

/// Merges clusters joined by must-links (transitively, in link order).
/// A merge or join that would put two same-image faces together is skipped.
Clustering apply_must_links(Clustering clustering, const MustLinkSet& links,
                            const EventDataset& dataset);

/// Splits every cluster holding two faces of one image by constrained
/// average-linkage agglomeration, stopping at `stop_distance`.
Clustering enforce_cooccurrence(Clustering clustering, const EventDataset& dataset,
                                double stop_distance = 50.0);

/// Majority-vote assignment of unassigned faces using the k nearest faces
/// that were assigned before the call.
Clustering knn_assign(Clustering clustering, const EventDataset& dataset, std::size_t k = 5,
                      std::size_t votes_required = 4);

/// Dissolves clusters whose best face scores below `threshold`.
Clustering prune_low_quality_clusters(Clustering clustering, const EventDataset& dataset,
                                      double threshold);

/// Gives each face on a duplicate image the label of its matched face on the
/// representative image.
Clustering propagate_duplicate_labels(Clustering clustering, const DuplicateMap& duplicates,
                                      const EventDataset& dataset);

}  // namespace facegraph
