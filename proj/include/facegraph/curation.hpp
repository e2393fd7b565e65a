#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "facegraph/clustering.hpp"
#include "facegraph/dataset.hpp"

namespace facegraph {

enum class ClusterStatus { kPending, kConfirmed, kRejected };

std::string to_string(ClusterStatus status);

enum class ActionKind { kConfirmCluster, kRejectCluster, kRejectFaces, kSplitFaces, kMergeClusters };

std::string to_string(ActionKind kind);
ActionKind parse_action_kind(const std::string& name);

/// Invalid action payload (e.g. a split that is not a proper subset).
class CurationError : public Error {
 public:
  using Error::Error;
};

/// One human edit. `targets` holds cluster ids: one for every kind except
/// merge_clusters, which takes [into, from]. `faces` is the payload of
/// reject_faces and split_faces. `seq` and `timestamp_ms` are stamped when the
/// action is committed.
struct CurationAction {
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  ActionKind kind = ActionKind::kConfirmCluster;
  std::vector<std::string> targets;
  std::vector<std::string> faces;

  bool operator==(const CurationAction&) const = default;
};

std::string action_to_json(const CurationAction& action);
CurationAction action_from_json(const std::string& text, const std::string& source = "<action>");

/// The folded state: working clustering plus per-cluster review status.
/// `retired` holds ids of clusters merged away or dissolved; fresh ids never
/// reuse them.
struct WorkingState {
  Clustering clustering;
  std::map<std::string, ClusterStatus> status;
  std::set<std::string> retired;

  bool operator==(const WorkingState&) const = default;
};

WorkingState initial_working_state(const Clustering& clustering);

/// Pure transition. Throws StaleError for missing targets, CannotLinkError
/// for merges/confirms that would join same-image faces, and CurationError
/// for malformed payloads; the input state is never modified.
WorkingState apply_action(const EventDataset& dataset, const WorkingState& state,
                          const CurationAction& action);

WorkingState replay_actions(const EventDataset& dataset, const Clustering& initial,
                            const std::vector<CurationAction>& log);

struct FaceView {
  std::string face_id;
  std::string image_id;
  double quality_score = 0.0;
  /// Distance to the cluster mean (potential faces) or to the selected face.
  double distance = 0.0;
};

struct ClusterView {
  std::string cluster_id;
  ClusterStatus status = ClusterStatus::kPending;
  /// Sorted by quality_score descending.
  std::vector<FaceView> members;
  /// Unassigned faces near the cluster mean, nearest first.
  std::vector<FaceView> potentials;
  std::uint64_t seq = 0;
};

struct ClusterSummary {
  std::string cluster_id;
  ClusterStatus status;
  std::size_t size;
};

struct SimilarCluster {
  std::string cluster_id;
  double distance;
  double similarity;
  /// Some face of the candidate shares an image with some face of the target.
  bool conflict;
};

struct FaceContext {
  std::string face_id;
  std::string image_id;
  Timestamp capture_time = 0;
  std::vector<std::string> siblings;
  std::string image_ref;
  std::optional<std::string> cluster_id;
  std::uint64_t seq = 0;
};

struct CuratedExport {
  Clustering clustering;
  GroundTruth truth;
  std::uint64_t seq = 0;
};

struct ActionResult {
  std::uint64_t seq = 0;
  CurationAction committed;
  std::size_t clusters = 0;
  std::size_t confirmed = 0;
  std::size_t unassigned = 0;
  std::size_t rejected = 0;
};

struct SessionOptions {
  /// Radius around a cluster mean for "potential" faces.
  double potential_distance = 75.0;
  /// Re-fold the whole log after every mutation and compare.
  bool verify_replay = false;
  /// Write a snapshot every this many actions (0 disables).
  std::size_t snapshot_every = 50;
  std::function<std::int64_t()> clock;
};

/// One review session over a dataset and a machine clustering.
///
/// Mutations are serialised and appended to the action log; readers take a
/// shared lock and always see a committed sequence number. With a store
/// directory the log is persisted (actions.jsonl plus periodic snapshot.json)
/// and reopening replays it. A session built from an in-memory dataset copies
/// it into the store.
class CurationSession {
 public:
  CurationSession(EventDataset dataset, Clustering initial, SessionOptions options = {},
                  std::optional<std::filesystem::path> store = std::nullopt,
                  std::filesystem::path dataset_dir = {});

  /// Loads and validates files; a clustering naming unknown faces is an
  /// IntegrityError.
  static std::unique_ptr<CurationSession> open(const std::filesystem::path& dataset_dir,
                                               const std::filesystem::path& clustering_file,
                                               SessionOptions options = {},
                                               std::optional<std::filesystem::path> store = {});
  /// Reopens a persisted session and replays its log.
  static std::unique_ptr<CurationSession> reopen(const std::filesystem::path& store,
                                                 SessionOptions options = {});

  std::uint64_t seq() const;
  WorkingState state() const;
  std::vector<CurationAction> log() const;
  const Clustering& initial() const { return initial_; }
  const EventDataset& dataset() const { return dataset_; }

  std::vector<ClusterSummary> list_clusters() const;
  ClusterView get_cluster(const std::string& cluster_id) const;
  std::vector<SimilarCluster> similar_clusters(const std::string& cluster_id,
                                               std::size_t top_m = 5) const;
  FaceContext face_context(const std::string& face_id) const;
  std::vector<FaceView> similar_faces(const std::string& face_id, double threshold) const;

  /// Commits an action. When `expected_seq` is given and differs from the
  /// current sequence number the action is refused with StaleError.
  ActionResult apply(CurationAction action, std::optional<std::uint64_t> expected_seq = {});

  CuratedExport export_curated() const;

 private:
  const std::set<std::string>& live_cluster(const std::string& cluster_id) const;
  Embedding mean_of(const std::set<std::string>& faces) const;
  void persist(const CurationAction& action);
  void write_snapshot() const;

  EventDataset dataset_;
  Clustering initial_;
  SessionOptions options_;
  std::optional<std::filesystem::path> store_;

  mutable std::shared_mutex mutex_;
  WorkingState state_;
  std::vector<CurationAction> log_;
};

}  // namespace facegraph
