#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "facegraph/clustering.hpp"
#include "facegraph/dataset.hpp"

namespace facegraph {

/// Undirected co-occurrence graph over clusters. Each edge stores the images
/// that evidence it; weight(i, j) is the number of such images.
class SocialGraph {
 public:
  using Key = std::pair<std::string, std::string>;

  void add_node(const std::string& id);
  /// Adds `image_id` to the evidence of edge {a, b}; a != b.
  void add_evidence(const std::string& a, const std::string& b, const std::string& image_id);

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::map<Key, std::set<std::string>>& edges() const { return edges_; }

  bool connected(const std::string& a, const std::string& b) const;
  std::size_t weight(const std::string& a, const std::string& b) const;
  std::size_t degree(const std::string& node) const;
  std::size_t total_weight(const std::string& node) const;

  /// Same graph without edges lighter than `min_weight` (nodes kept).
  SocialGraph filtered(std::size_t min_weight) const;

  static Key key(const std::string& a, const std::string& b);

  bool operator==(const SocialGraph&) const = default;

 private:
  std::set<std::string> nodes_;
  std::map<Key, std::set<std::string>> edges_;
};

/// Nodes are the clusters; an edge joins two clusters whenever some image
/// carries an assigned face of each. Unassigned and rejected faces add nothing.
SocialGraph discover_graph(const Clustering& clustering, const EventDataset& dataset);

/// Highest degree first; ties by total edge weight (descending) then id.
std::vector<std::string> top_k_by_degree(const SocialGraph& graph, std::size_t k = 10);

enum class GraphFormat { kJsonNodeLink, kDot };

GraphFormat parse_graph_format(const std::string& name);
std::string export_graph(const SocialGraph& graph, GraphFormat format);
SocialGraph parse_node_link(const std::string& text, const std::string& source = "<graph>");

}  // namespace facegraph
