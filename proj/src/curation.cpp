#include "facegraph/curation.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <mutex>

#include <spdlog/spdlog.h>

#include "json_util.hpp"

namespace facegraph {

std::string to_string(ClusterStatus status) {
  switch (status) {
    case ClusterStatus::kPending:
      return "pending";
    case ClusterStatus::kConfirmed:
      return "confirmed";
    case ClusterStatus::kRejected:
      return "rejected";
  }
  return "unknown";
}

namespace {

ClusterStatus parse_status(const std::string& s) {
  if (s == "pending") return ClusterStatus::kPending;
  if (s == "confirmed") return ClusterStatus::kConfirmed;
  if (s == "rejected") return ClusterStatus::kRejected;
  throw ParseError("<state>", 0, "unknown cluster status '" + s + "'");
}

}  // namespace

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kConfirmCluster:
      return "confirm_cluster";
    case ActionKind::kRejectCluster:
      return "reject_cluster";
    case ActionKind::kRejectFaces:
      return "reject_faces";
    case ActionKind::kSplitFaces:
      return "split_faces";
    case ActionKind::kMergeClusters:
      return "merge_clusters";
  }
  return "unknown";
}

ActionKind parse_action_kind(const std::string& name) {
  if (name == "confirm_cluster") return ActionKind::kConfirmCluster;
  if (name == "reject_cluster") return ActionKind::kRejectCluster;
  if (name == "reject_faces") return ActionKind::kRejectFaces;
  if (name == "split_faces") return ActionKind::kSplitFaces;
  if (name == "merge_clusters") return ActionKind::kMergeClusters;
  throw CurationError("unknown action kind '" + name + "'");
}

namespace {

json action_json(const CurationAction& a) {
  return {{"seq", a.seq},
          {"timestamp_ms", a.timestamp_ms},
          {"kind", to_string(a.kind)},
          {"targets", a.targets},
          {"faces", a.faces}};
}

CurationAction action_from(const json& doc, const std::string& source) {
  CurationAction a;
  a.seq = detail::field_or<std::uint64_t>(doc, "seq", 0, source);
  a.timestamp_ms = detail::field_or<std::int64_t>(doc, "timestamp_ms", 0, source);
  a.kind = parse_action_kind(detail::field<std::string>(doc, "kind", source));
  a.targets = detail::field<std::vector<std::string>>(doc, "targets", source);
  a.faces = detail::field_or(doc, "faces", std::vector<std::string>{}, source);
  return a;
}

}  // namespace

std::string action_to_json(const CurationAction& action) { return action_json(action).dump(); }

CurationAction action_from_json(const std::string& text, const std::string& source) {
  return action_from(detail::parse_text(text, source), source);
}

WorkingState initial_working_state(const Clustering& clustering) {
  WorkingState s;
  s.clustering = clustering;
  for (const auto& [cid, members] : clustering.clusters) {
    s.status[cid] = ClusterStatus::kPending;
  }
  return s;
}

namespace {

std::size_t expected_targets(ActionKind kind) {
  return kind == ActionKind::kMergeClusters ? 2 : 1;
}

std::set<std::string> reserved_ids(const WorkingState& s) {
  std::set<std::string> out = s.retired;
  for (const auto& [cid, st] : s.status) out.insert(cid);
  return out;
}

bool has_image_clash(const EventDataset& dataset, const std::set<std::string>& a,
                     const std::set<std::string>& b) {
  std::set<std::size_t> images;
  for (const auto& f : a) images.insert(dataset.image_index_of(dataset.face_index(f)));
  for (const auto& f : b) {
    if (images.contains(dataset.image_index_of(dataset.face_index(f)))) return true;
  }
  return false;
}

bool violates_cannot_link(const EventDataset& dataset, const std::set<std::string>& members) {
  std::set<std::size_t> images;
  for (const auto& f : members) {
    if (!images.insert(dataset.image_index_of(dataset.face_index(f))).second) return true;
  }
  return false;
}

}  // namespace

WorkingState apply_action(const EventDataset& dataset, const WorkingState& state,
                          const CurationAction& action) {
  if (action.targets.size() != expected_targets(action.kind)) {
    throw CurationError(to_string(action.kind) + " expects " +
                        std::to_string(expected_targets(action.kind)) + " target(s)");
  }
  for (const auto& t : action.targets) {
    if (!state.clustering.clusters.contains(t)) {
      throw StaleError("cluster '" + t + "' does not exist (stale target)");
    }
  }
  const std::string& cid = action.targets.front();
  const std::set<std::string>& members = state.clustering.clusters.at(cid);

  auto payload = [&]() {
    if (action.faces.empty()) {
      throw CurationError(to_string(action.kind) + " needs a non-empty face list");
    }
    std::set<std::string> faces(action.faces.begin(), action.faces.end());
    if (faces.size() != action.faces.size()) {
      throw CurationError(to_string(action.kind) + ": repeated face ids");
    }
    for (const auto& f : faces) {
      if (!members.contains(f)) {
        throw StaleError("face '" + f + "' is not in cluster '" + cid + "'");
      }
    }
    return faces;
  };

  WorkingState next = state;
  Clustering& c = next.clustering;
  switch (action.kind) {
    case ActionKind::kConfirmCluster:
      if (violates_cannot_link(dataset, members)) {
        throw CannotLinkError("cluster '" + cid + "' holds two faces from one image");
      }
      next.status[cid] = ClusterStatus::kConfirmed;
      break;
    case ActionKind::kRejectCluster:
      c.rejected.insert(members.begin(), members.end());
      c.clusters.erase(cid);
      next.status[cid] = ClusterStatus::kRejected;
      break;
    case ActionKind::kRejectFaces: {
      const auto faces = payload();
      auto& live = c.clusters.at(cid);
      for (const auto& f : faces) {
        live.erase(f);
        c.unassigned.insert(f);
      }
      if (live.empty()) {
        c.clusters.erase(cid);
        next.status.erase(cid);
        next.retired.insert(cid);
      }
      break;
    }
    case ActionKind::kSplitFaces: {
      const auto faces = payload();
      if (faces.size() >= members.size()) {
        throw CurationError("split_faces needs a proper subset of cluster '" + cid + "'");
      }
      const std::string fresh = fresh_cluster_id(c, reserved_ids(state));
      auto& live = c.clusters.at(cid);
      for (const auto& f : faces) live.erase(f);
      c.clusters[fresh] = faces;
      next.status[fresh] = ClusterStatus::kPending;
      break;
    }
    case ActionKind::kMergeClusters: {
      const std::string& from = action.targets[1];
      if (from == cid) {
        throw CurationError("merge_clusters needs two distinct clusters");
      }
      const auto& other = state.clustering.clusters.at(from);
      if (has_image_clash(dataset, members, other)) {
        throw CannotLinkError("clusters '" + cid + "' and '" + from +
                              "' have faces on the same image");
      }
      c.clusters.at(cid).insert(other.begin(), other.end());
      c.clusters.erase(from);
      next.status.erase(from);
      next.retired.insert(from);
      break;
    }
  }
  return next;
}

WorkingState replay_actions(const EventDataset& dataset, const Clustering& initial,
                            const std::vector<CurationAction>& log) {
  WorkingState s = initial_working_state(initial);
  for (const auto& a : log) {
    s = apply_action(dataset, s, a);
  }
  return s;
}

namespace {

constexpr const char* kSessionFile = "session.json";
constexpr const char* kInitialFile = "initial_clustering.json";
constexpr const char* kActionsFile = "actions.jsonl";
constexpr const char* kSnapshotFile = "snapshot.json";

std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json state_json(const WorkingState& s) {
  json status = json::object();
  for (const auto& [cid, st] : s.status) status[cid] = to_string(st);
  return {{"clustering", json::parse(clustering_to_json(s.clustering))},
          {"status", std::move(status)},
          {"retired", s.retired}};
}

WorkingState state_from(const json& doc, const std::string& source) {
  WorkingState s;
  s.clustering = clustering_from_json(detail::field<json>(doc, "clustering", source).dump(), source);
  const json status = detail::field<json>(doc, "status", source);
  for (const auto& [cid, st] : status.items()) {
    s.status[cid] = parse_status(st.get<std::string>());
  }
  s.retired = detail::field<std::set<std::string>>(doc, "retired", source);
  return s;
}

}  // namespace

CurationSession::CurationSession(EventDataset dataset, Clustering initial, SessionOptions options,
                                 std::optional<std::filesystem::path> store,
                                 std::filesystem::path dataset_dir)
    : dataset_(std::move(dataset)),
      initial_(std::move(initial)),
      options_(std::move(options)),
      store_(std::move(store)) {
  initial_.validate(dataset_);
  if (!options_.clock) options_.clock = system_clock_ms;
  state_ = initial_working_state(initial_);
  if (store_ && !std::filesystem::exists(*store_ / kSessionFile)) {
    std::filesystem::create_directories(*store_);
    if (dataset_dir.empty()) {
      // In-memory dataset: keep a copy so the session can be reopened.
      dataset_dir = *store_ / "dataset";
      save_dataset(dataset_, dataset_dir);
    }
    json meta = {{"dataset_dir", std::filesystem::absolute(dataset_dir).string()}};
    write_file(*store_ / kInitialFile, clustering_to_json(initial_));
    write_file(*store_ / kActionsFile, "");
    write_file(*store_ / kSessionFile, meta.dump(2) + "\n");
  }
}

std::unique_ptr<CurationSession> CurationSession::open(
    const std::filesystem::path& dataset_dir, const std::filesystem::path& clustering_file,
    SessionOptions options, std::optional<std::filesystem::path> store) {
  EventDataset dataset = load_dataset(dataset_dir);
  Clustering clustering = load_clustering(clustering_file);
  return std::make_unique<CurationSession>(std::move(dataset), std::move(clustering),
                                           std::move(options), std::move(store), dataset_dir);
}

std::unique_ptr<CurationSession> CurationSession::reopen(const std::filesystem::path& store,
                                                         SessionOptions options) {
  const json meta = detail::parse_document(store / kSessionFile);
  const auto dataset_dir =
      std::filesystem::path(detail::field<std::string>(meta, "dataset_dir", kSessionFile));
  auto session = std::make_unique<CurationSession>(
      load_dataset(dataset_dir), load_clustering(store / kInitialFile), std::move(options), store,
      dataset_dir);

  std::vector<CurationAction> log;
  {
    const std::string text = read_file(store / kActionsFile);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t end = text.find('\n', pos);
      const std::string line = text.substr(pos, end == std::string::npos ? end : end - pos);
      pos = end == std::string::npos ? text.size() : end + 1;
      ++line_no;
      if (line.empty()) continue;
      log.push_back(action_from(detail::parse_text(line, kActionsFile), kActionsFile));
    }
  }

  WorkingState state = initial_working_state(session->initial_);
  std::size_t start = 0;
  if (std::filesystem::exists(store / kSnapshotFile)) {
    const json snap = detail::parse_document(store / kSnapshotFile);
    const auto snap_seq = detail::field<std::uint64_t>(snap, "seq", kSnapshotFile);
    state = state_from(detail::field<json>(snap, "state", kSnapshotFile), kSnapshotFile);
    while (start < log.size() && log[start].seq <= snap_seq) ++start;
  }
  for (std::size_t i = start; i < log.size(); ++i) {
    state = apply_action(session->dataset_, state, log[i]);
  }
  if (!(state == replay_actions(session->dataset_, session->initial_, log))) {
    throw IntegrityError("session store '" + store.string() +
                         "': snapshot disagrees with action log replay");
  }
  session->state_ = std::move(state);
  session->log_ = std::move(log);
  return session;
}

std::uint64_t CurationSession::seq() const {
  std::shared_lock lock(mutex_);
  return log_.empty() ? 0 : log_.back().seq;
}

WorkingState CurationSession::state() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::vector<CurationAction> CurationSession::log() const {
  std::shared_lock lock(mutex_);
  return log_;
}

const std::set<std::string>& CurationSession::live_cluster(const std::string& cluster_id) const {
  auto it = state_.clustering.clusters.find(cluster_id);
  if (it != state_.clustering.clusters.end()) return it->second;
  auto st = state_.status.find(cluster_id);
  if (st != state_.status.end() && st->second == ClusterStatus::kRejected) {
    throw NotFoundError("cluster '" + cluster_id + "' was rejected");
  }
  throw NotFoundError("unknown cluster '" + cluster_id + "'");
}

Embedding CurationSession::mean_of(const std::set<std::string>& faces) const {
  Embedding mean(dataset_.dimension(), 0.0);
  for (const auto& f : faces) {
    const auto& e = dataset_.face(f).embedding;
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += e[k];
  }
  for (double& v : mean) v /= static_cast<double>(faces.size());
  return mean;
}

std::vector<ClusterSummary> CurationSession::list_clusters() const {
  std::shared_lock lock(mutex_);
  std::vector<ClusterSummary> out;
  for (const auto& [cid, members] : state_.clustering.clusters) {
    out.push_back({cid, state_.status.at(cid), members.size()});
  }
  return out;
}

ClusterView CurationSession::get_cluster(const std::string& cluster_id) const {
  std::shared_lock lock(mutex_);
  const auto& members = live_cluster(cluster_id);
  ClusterView view;
  view.cluster_id = cluster_id;
  view.status = state_.status.at(cluster_id);
  view.seq = log_.empty() ? 0 : log_.back().seq;
  for (const auto& f : members) {
    const FaceRecord& rec = dataset_.face(f);
    view.members.push_back({f, rec.image_id, rec.quality_score, 0.0});
  }
  std::stable_sort(view.members.begin(), view.members.end(),
                   [](const FaceView& a, const FaceView& b) {
                     return a.quality_score > b.quality_score;
                   });
  const Embedding mean = mean_of(members);
  for (const auto& f : state_.clustering.unassigned) {
    const FaceRecord& rec = dataset_.face(f);
    const double d = euclidean(rec.embedding, mean);
    if (d <= options_.potential_distance) {
      view.potentials.push_back({f, rec.image_id, rec.quality_score, d});
    }
  }
  std::stable_sort(view.potentials.begin(), view.potentials.end(),
                   [](const FaceView& a, const FaceView& b) { return a.distance < b.distance; });
  return view;
}

std::vector<SimilarCluster> CurationSession::similar_clusters(const std::string& cluster_id,
                                                              std::size_t top_m) const {
  std::shared_lock lock(mutex_);
  const auto& target = live_cluster(cluster_id);
  const Embedding mean = mean_of(target);
  std::vector<SimilarCluster> out;
  for (const auto& [cid, members] : state_.clustering.clusters) {
    if (cid == cluster_id) continue;
    const double d = euclidean(mean, mean_of(members));
    out.push_back({cid, d, 1.0 / (1.0 + d), has_image_clash(dataset_, target, members)});
  }
  std::stable_sort(out.begin(), out.end(), [](const SimilarCluster& a, const SimilarCluster& b) {
    return a.distance < b.distance;
  });
  if (out.size() > top_m) out.resize(top_m);
  return out;
}

FaceContext CurationSession::face_context(const std::string& face_id) const {
  std::shared_lock lock(mutex_);
  const FaceRecord& rec = dataset_.face(face_id);
  const ImageRecord& img = dataset_.image(rec.image_id);
  FaceContext ctx;
  ctx.face_id = face_id;
  ctx.image_id = img.image_id;
  ctx.capture_time = img.capture_time;
  ctx.image_ref = img.uri.empty() ? img.image_id : img.uri;
  for (const auto& f : img.face_ids) {
    if (f != face_id) ctx.siblings.push_back(f);
  }
  for (const auto& [cid, members] : state_.clustering.clusters) {
    if (members.contains(face_id)) {
      ctx.cluster_id = cid;
      break;
    }
  }
  ctx.seq = log_.empty() ? 0 : log_.back().seq;
  return ctx;
}

std::vector<FaceView> CurationSession::similar_faces(const std::string& face_id,
                                                     double threshold) const {
  std::shared_lock lock(mutex_);
  const FaceRecord& rec = dataset_.face(face_id);
  std::vector<FaceView> out;
  for (const auto& [cid, members] : state_.clustering.clusters) {
    if (!members.contains(face_id)) continue;
    for (const auto& f : members) {
      if (f == face_id) continue;
      const FaceRecord& other = dataset_.face(f);
      const double d = euclidean(rec.embedding, other.embedding);
      if (d <= threshold) {
        out.push_back({f, other.image_id, other.quality_score, d});
      }
    }
    break;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FaceView& a, const FaceView& b) { return a.distance < b.distance; });
  return out;
}

ActionResult CurationSession::apply(CurationAction action,
                                    std::optional<std::uint64_t> expected_seq) {
  std::unique_lock lock(mutex_);
  const std::uint64_t current = log_.empty() ? 0 : log_.back().seq;
  if (expected_seq && *expected_seq != current) {
    throw StaleError("stale sequence number " + std::to_string(*expected_seq) + ", current is " +
                     std::to_string(current));
  }
  WorkingState next = apply_action(dataset_, state_, action);
  action.seq = current + 1;
  action.timestamp_ms = options_.clock();

  persist(action);
  state_ = std::move(next);
  log_.push_back(action);

  if (options_.verify_replay && !(replay_actions(dataset_, initial_, log_) == state_)) {
    throw std::logic_error("curation log replay diverged at seq " + std::to_string(action.seq));
  }
  if (store_ && options_.snapshot_every > 0 && action.seq % options_.snapshot_every == 0) {
    write_snapshot();
  }

  ActionResult r;
  r.seq = action.seq;
  r.committed = action;
  r.clusters = state_.clustering.clusters.size();
  r.confirmed = static_cast<std::size_t>(
      std::count_if(state_.status.begin(), state_.status.end(),
                    [](const auto& kv) { return kv.second == ClusterStatus::kConfirmed; }));
  r.unassigned = state_.clustering.unassigned.size();
  r.rejected = state_.clustering.rejected.size();
  return r;
}

void CurationSession::persist(const CurationAction& action) {
  if (!store_) return;
  std::ofstream out(*store_ / kActionsFile, std::ios::app | std::ios::binary);
  out << action_json(action).dump() << '\n';
  out.flush();
  if (!out) {
    throw IoError("cannot append to action log in '" + store_->string() + "'");
  }
}

void CurationSession::write_snapshot() const {
  const json snap = {{"seq", log_.empty() ? 0 : log_.back().seq}, {"state", state_json(state_)}};
  const auto tmp = *store_ / (std::string(kSnapshotFile) + ".tmp");
  write_file(tmp, snap.dump() + "\n");
  std::filesystem::rename(tmp, *store_ / kSnapshotFile);
  spdlog::debug("curation snapshot written at seq {}", log_.empty() ? 0 : log_.back().seq);
}

CuratedExport CurationSession::export_curated() const {
  std::shared_lock lock(mutex_);
  CuratedExport out;
  out.seq = log_.empty() ? 0 : log_.back().seq;
  Clustering& c = out.clustering;
  c.rejected = state_.clustering.rejected;
  c.unassigned = state_.clustering.unassigned;
  std::size_t n = 0;
  for (const auto& [cid, members] : state_.clustering.clusters) {
    if (state_.status.at(cid) == ClusterStatus::kConfirmed) {
      c.clusters[cid] = members;
      std::string pid = std::to_string(++n);
      pid.insert(0, pid.size() < 4 ? 4 - pid.size() : 0, '0');
      out.truth.identities["person" + pid] = members;
    } else {
      c.unassigned.insert(members.begin(), members.end());
    }
  }
  if (c.clusters.empty()) {
    throw CurationError("nothing to export: no confirmed clusters");
  }
  c.provenance = state_.clustering.provenance;
  c.provenance.push_back("curation@" + std::to_string(out.seq));
  return out;
}

}  // namespace facegraph
