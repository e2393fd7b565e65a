#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "facegraph/dataset.hpp"

namespace facegraph {

/// A partial partition of a dataset's faces.
///
/// Invariants (checked by validate): clusters, unassigned and rejected are
/// disjoint, together cover every face of the dataset, and no cluster is
/// empty.
struct Clustering {
  std::map<std::string, std::set<std::string>> clusters;
  std::set<std::string> unassigned;
  std::set<std::string> rejected;
  std::vector<std::string> provenance;

  /// Every face unassigned, nothing else.
  static Clustering all_unassigned(const EventDataset& dataset);

  /// face_id -> cluster_id for assigned faces.
  std::unordered_map<std::string, std::string> assignment() const;
  std::size_t assigned_count() const;

  void validate(const EventDataset& dataset) const;

  /// Same clusters (as face sets), unassigned and rejected pools; ignores
  /// cluster ids and provenance.
  bool same_partition(const Clustering& other) const;

  bool operator==(const Clustering&) const = default;
};

/// An id of the form c<N> not used by the clustering nor present in `taken`.
std::string fresh_cluster_id(const Clustering& clustering,
                             const std::set<std::string>& taken = {});

/// Ids of clusters holding two or more faces from a single image.
std::vector<std::string> cannot_link_violations(const Clustering& clustering,
                                                const EventDataset& dataset);

std::string clustering_to_json(const Clustering& clustering);
Clustering clustering_from_json(const std::string& text, const std::string& source);
Clustering load_clustering(const std::filesystem::path& file);
void save_clustering(const Clustering& clustering, const std::filesystem::path& file);

}  // namespace facegraph
