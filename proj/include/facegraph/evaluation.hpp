#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "facegraph/clustering.hpp"
#include "facegraph/dataset.hpp"

namespace facegraph {

/// Pair counts over all unordered pairs of evaluated faces.
struct PairConfusion {
  std::uint64_t true_positive = 0;
  std::uint64_t false_positive = 0;
  std::uint64_t false_negative = 0;
  std::uint64_t true_negative = 0;

  std::uint64_t total() const {
    return true_positive + false_positive + false_negative + true_negative;
  }
  bool operator==(const PairConfusion&) const = default;
};

struct PairMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const PairMetrics&) const = default;
};

/// Raised when evaluated faces have no ground-truth identity.
class MissingTruthError : public Error {
 public:
  explicit MissingTruthError(std::vector<std::string> faces);
  const std::vector<std::string>& faces() const { return faces_; }

 private:
  std::vector<std::string> faces_;
};

/// Faces under evaluation: every non-rejected face of the clustering.
/// Unassigned faces act as singleton clusters. Counts via a contingency table.
PairConfusion pair_confusion(const Clustering& clustering, const GroundTruth& truth);

/// p = TP/(TP+FP) (1 when nothing is predicted together),
/// r = TP/(TP+FN) (1 when nothing is truly together), f1 = harmonic mean.
PairMetrics precision_recall_f1(const PairConfusion& confusion);

/// Explicit enumeration of every unordered pair; the reference for
/// pair_confusion.
PairConfusion brute_force_pair_confusion(const Clustering& clustering, const GroundTruth& truth);
PairMetrics brute_force_pair_metrics(const Clustering& clustering, const GroundTruth& truth);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// 1 when J(truth_faces, cluster_faces) > threshold, else 0.
int jaccard_match(const std::set<std::string>& truth_faces,
                  const std::set<std::string>& cluster_faces, double threshold = 0.8);

/// The k participants with most ground-truth connections; ties by total
/// co-occurrence weight (descending) then participant id.
std::vector<std::string> top_participants(const PlantedGraph& truth_graph, std::size_t k = 10);

/// Fraction of the top-k participants matched one-to-one (greedy by
/// descending Jaccard) to a cluster with Jaccard above `threshold`.
double rs_score(const Clustering& clustering, const GroundTruth& truth, const EventDataset& dataset,
                std::size_t k = 10, double threshold = 0.8);

struct MetricRow {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double rs = 0.0;
  PairConfusion confusion;

  bool operator==(const MetricRow&) const = default;
};

struct EvalReport {
  MetricRow overall;
  std::vector<MetricRow> ablation;
};

MetricRow evaluate(const Clustering& clustering, const GroundTruth& truth,
                   const EventDataset& dataset, const std::string& label = "pipeline");

std::string report_to_json(const EvalReport& report);
/// One CSV row per ablation row, or just the overall row when there are none.
std::string report_to_csv(const EvalReport& report);
std::vector<MetricRow> parse_report_csv(const std::string& text);

}  // namespace facegraph
