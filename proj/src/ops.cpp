#include "facegraph/ops.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include <spdlog/spdlog.h>

namespace facegraph {

namespace {

std::set<std::size_t> images_of(const EventDataset& dataset, const FaceSet& faces) {
  std::set<std::size_t> out;
  for (const auto& f : faces) {
    out.insert(dataset.image_index_of(dataset.face_index(f)));
  }
  return out;
}

bool intersects(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return false;
}

std::vector<std::size_t> to_indices(const EventDataset& dataset, const FaceSet& faces) {
  std::vector<std::size_t> out;
  out.reserve(faces.size());
  for (const auto& f : faces) {
    out.push_back(dataset.face_index(f));
  }
  return out;
}

}  // namespace

FilterResult filter_faces(const EventDataset& dataset, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("quality threshold must lie in [0,1]");
  }
  FilterResult r;
  for (const FaceRecord& f : dataset.faces()) {
    (f.quality_score < threshold ? r.rejected : r.kept).insert(f.face_id);
  }
  return r;
}

void MustLinkSet::add(const std::string& a, const std::string& b) {
  pairs.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

bool MustLinkSet::contains(const std::string& a, const std::string& b) const {
  return pairs.contains(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

MustLinkSet time_group_links(const EventDataset& dataset, const FaceSet& kept, Timestamp window,
                             double distance) {
  // Kept faces grouped per image, images ordered by capture time.
  std::map<std::size_t, std::vector<std::size_t>> per_image;
  for (const auto& f : kept) {
    const std::size_t fi = dataset.face_index(f);
    per_image[dataset.image_index_of(fi)].push_back(fi);
  }
  std::vector<std::size_t> order;
  for (const auto& [img, faces] : per_image) {
    order.push_back(img);
  }
  const auto& images = dataset.images();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(images[a].capture_time, images[a].image_id) <
           std::tie(images[b].capture_time, images[b].image_id);
  });

  MustLinkSet links;
  const auto& faces = dataset.faces();
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (images[order[j]].capture_time - images[order[i]].capture_time > window) {
        break;
      }
      for (std::size_t a : per_image[order[i]]) {
        for (std::size_t b : per_image[order[j]]) {
          if (dataset.distance(a, b) <= distance) {
            links.add(faces[a].face_id, faces[b].face_id);
          }
        }
      }
    }
  }
  return links;
}

std::vector<FacePairing> greedy_match(const EventDataset& dataset,
                                      const std::vector<std::string>& left,
                                      const std::vector<std::string>& right) {
  std::vector<FacePairing> candidates;
  candidates.reserve(left.size() * right.size());
  for (const auto& a : left) {
    for (const auto& b : right) {
      candidates.push_back({a, b, dataset.distance(a, b)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const FacePairing& x, const FacePairing& y) {
    return std::tie(x.distance, x.left, x.right) < std::tie(y.distance, y.left, y.right);
  });
  std::set<std::string> used_left;
  std::set<std::string> used_right;
  std::vector<FacePairing> out;
  const std::size_t target = std::min(left.size(), right.size());
  for (const auto& c : candidates) {
    if (out.size() == target) break;
    if (used_left.contains(c.left) || used_right.contains(c.right)) continue;
    used_left.insert(c.left);
    used_right.insert(c.right);
    out.push_back(c);
  }
  return out;
}

DuplicateMap deduplicate_images(const EventDataset& dataset, const FaceSet& kept, Timestamp window,
                                double distance) {
  const auto& images = dataset.images();
  std::vector<std::vector<std::string>> kept_on(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& f : images[i].face_ids) {
      if (kept.contains(f)) {
        kept_on[i].push_back(f);
      }
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!kept_on[i].empty()) {
      order.push_back(i);
    }
  }
  auto earlier = [&](std::size_t a, std::size_t b) {
    return std::tie(images[a].capture_time, images[a].image_id) <
           std::tie(images[b].capture_time, images[b].image_id);
  };
  std::sort(order.begin(), order.end(), earlier);

  std::vector<std::size_t> parent(images.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t u = order[i];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const std::size_t v = order[j];
      if (images[v].capture_time - images[u].capture_time > window) {
        break;
      }
      if (kept_on[u].size() != kept_on[v].size()) {
        continue;
      }
      const auto matching = greedy_match(dataset, kept_on[u], kept_on[v]);
      const bool all_close =
          matching.size() == kept_on[u].size() &&
          std::all_of(matching.begin(), matching.end(),
                      [&](const FacePairing& p) { return p.distance <= distance; });
      if (all_close) {
        const std::size_t ru = find(u);
        const std::size_t rv = find(v);
        if (ru != rv) {
          // Keep the earliest image as the root.
          if (earlier(ru, rv)) {
            parent[rv] = ru;
          } else {
            parent[ru] = rv;
          }
        }
      }
    }
  }

  DuplicateMap out;
  for (std::size_t i : order) {
    const std::size_t root = find(i);
    if (root != i) {
      out.representative_of[images[i].image_id] = images[root].image_id;
    }
  }
  return out;
}

FaceSet faces_on_duplicates(const EventDataset& dataset, const DuplicateMap& duplicates) {
  FaceSet out;
  for (const auto& [dup, rep] : duplicates.representative_of) {
    for (const auto& f : dataset.image(dup).face_ids) {
      out.insert(f);
    }
  }
  return out;
}

std::vector<int> dbscan_labels(const EventDataset& dataset, const std::vector<std::size_t>& points,
                               double eps, std::size_t min_samples) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbours[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dataset.distance(points[i], points[j]) <= eps) {
        neighbours[i].push_back(j);
        neighbours[j].push_back(i);
      }
    }
  }
  for (auto& nb : neighbours) {
    std::sort(nb.begin(), nb.end());
  }

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> labels(n, kUnvisited);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    if (neighbours[i].size() < min_samples) {
      labels[i] = kNoise;
      continue;
    }
    const int cluster = next++;
    labels[i] = cluster;
    std::deque<std::size_t> queue(neighbours[i].begin(), neighbours[i].end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (labels[q] == kNoise) {
        labels[q] = cluster;  // border point
      }
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      if (neighbours[q].size() >= min_samples) {
        queue.insert(queue.end(), neighbours[q].begin(), neighbours[q].end());
      }
    }
  }
  return labels;
}

std::vector<int> kmeans_labels(const EventDataset& dataset, const std::vector<std::size_t>& points,
                               std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.size();
  const std::size_t d = dataset.dimension();
  const auto& faces = dataset.faces();
  auto sq_dist = [&](const Embedding& a, const Embedding& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const double diff = a[t] - b[t];
      s += diff * diff;
    }
    return s;
  };

  std::mt19937_64 rng(seed);
  std::vector<Embedding> centers;
  std::vector<bool> chosen(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  while (centers.size() < k) {
    chosen[pick] = true;
    centers.push_back(faces[points[pick]].embedding);
    if (centers.size() == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(faces[points[i]].embedding, centers.back()));
      if (!chosen[i]) total += best[i];
    }
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        pick = i;
        r -= best[i];
        if (r <= 0.0) break;
      }
    } else {
      // Remaining points coincide with centers; take the next unchosen one.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> any(0, rest.size() - 1);
      pick = rest[any(rng)];
    }
  }

  std::vector<int> labels(n, -1);
  constexpr int kMaxIterations = 300;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double dc = sq_dist(faces[points[i]].embedding, centers[c]);
        if (dc < dmin) {
          dmin = dc;
          arg = static_cast<int>(c);
        }
      }
      if (labels[i] != arg) {
        labels[i] = arg;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Embedding> sums(centers.size(), Embedding(d, 0.0));
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = faces[points[i]].embedding;
      auto& s = sums[static_cast<std::size_t>(labels[i])];
      for (std::size_t t = 0; t < d; ++t) s[t] += e[t];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t t = 0; t < d; ++t) {
        centers[c][t] = sums[c][t] / static_cast<double>(counts[c]);
      }
    }
  }

  // Relabel densely so empty clusters disappear.
  std::map<int, int> dense;
  for (int& l : labels) {
    auto [it, inserted] = dense.emplace(l, static_cast<int>(dense.size()));
    l = it->second;
  }
  return labels;
}

std::vector<int> random_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dist(0, k - 1);
  std::vector<int> labels(n);
  for (int& l : labels) {
    l = static_cast<int>(dist(rng));
  }
  return labels;
}

Clustering cluster_initial(const EventDataset& dataset, const FaceSet& participating,
                           const FaceSet& rejected, const InitialParams& params,
                           std::uint64_t seed) {
  if (participating.empty()) {
    throw ConfigError("initial clustering: no participating faces");
  }
  const std::vector<std::size_t> points = to_indices(dataset, participating);
  std::vector<int> labels;
  switch (params.algorithm) {
    case InitialAlgorithm::kDbscan:
      labels = dbscan_labels(dataset, points, params.eps, params.min_samples);
      break;
    case InitialAlgorithm::kKMeans:
    case InitialAlgorithm::kRandom:
      if (params.k > points.size()) {
        throw ConfigError("initial clustering: k=" + std::to_string(params.k) + " exceeds " +
                          std::to_string(points.size()) + " faces");
      }
      labels = params.algorithm == InitialAlgorithm::kKMeans
                   ? kmeans_labels(dataset, points, params.k, seed)
                   : random_labels(points.size(), params.k, seed);
      break;
  }

  Clustering out;
  const auto& faces = dataset.faces();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string& id = faces[points[i]].face_id;
    if (labels[i] < 0) {
      out.unassigned.insert(id);
    } else {
      out.clusters["c" + std::to_string(labels[i])].insert(id);
    }
  }
  for (const FaceRecord& f : faces) {
    if (rejected.contains(f.face_id)) {
      out.rejected.insert(f.face_id);
    } else if (!participating.contains(f.face_id)) {
      out.unassigned.insert(f.face_id);
    }
  }
  out.provenance.push_back("cluster_initial:" + to_string(params.algorithm));
  return out;
}

Clustering apply_must_links(Clustering clustering, const MustLinkSet& links,
                            const EventDataset& dataset) {
  auto owner = clustering.assignment();
  std::map<std::string, std::set<std::size_t>> cluster_images;
  for (const auto& [cid, members] : clustering.clusters) {
    cluster_images[cid] = images_of(dataset, members);
  }
  auto image_of = [&](const std::string& f) {
    return dataset.image_index_of(dataset.face_index(f));
  };

  std::size_t skipped = 0;
  for (const auto& [a, b] : links.pairs) {
    if (clustering.rejected.contains(a) || clustering.rejected.contains(b)) {
      continue;
    }
    auto ia = owner.find(a);
    auto ib = owner.find(b);
    const bool has_a = ia != owner.end();
    const bool has_b = ib != owner.end();
    if (!has_a && !has_b) {
      if (image_of(a) == image_of(b)) {
        ++skipped;
        continue;
      }
      const std::string cid = fresh_cluster_id(clustering);
      clustering.clusters[cid] = {a, b};
      clustering.unassigned.erase(a);
      clustering.unassigned.erase(b);
      cluster_images[cid] = {image_of(a), image_of(b)};
      owner[a] = cid;
      owner[b] = cid;
    } else if (has_a != has_b) {
      const std::string& loose = has_a ? b : a;
      const std::string cid = has_a ? ia->second : ib->second;
      if (cluster_images[cid].contains(image_of(loose))) {
        spdlog::debug("must-link {}-{}: join skipped, cannot-link with cluster {}", a, b, cid);
        ++skipped;
        continue;
      }
      clustering.clusters[cid].insert(loose);
      clustering.unassigned.erase(loose);
      cluster_images[cid].insert(image_of(loose));
      owner[loose] = cid;
    } else {
      const std::string ca = ia->second;
      const std::string cb = ib->second;
      if (ca == cb) continue;
      if (intersects(cluster_images[ca], cluster_images[cb])) {
        spdlog::debug("must-link {}-{}: merge of {} and {} skipped, cannot-link", a, b, ca, cb);
        ++skipped;
        continue;
      }
      const std::string& keep = std::min(ca, cb);
      const std::string& drop = std::max(ca, cb);
      for (const auto& f : clustering.clusters[drop]) {
        owner[f] = keep;
        clustering.clusters[keep].insert(f);
      }
      cluster_images[keep].insert(cluster_images[drop].begin(), cluster_images[drop].end());
      clustering.clusters.erase(drop);
      cluster_images.erase(drop);
    }
  }
  if (skipped > 0) {
    spdlog::info("apply_must_links: {} of {} links skipped by cannot-link", skipped,
                 links.pairs.size());
  }
  clustering.provenance.push_back("apply_must_links");
  return clustering;
}

namespace {

/// Constrained average-linkage agglomeration of one cluster's members.
std::vector<FaceSet> split_cluster(const EventDataset& dataset, const FaceSet& members,
                                   double stop_distance) {
  const std::vector<std::size_t> idx = to_indices(dataset, members);
  const std::size_t m = idx.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> link(m, std::vector<double>(m, 0.0));
  std::vector<std::vector<char>> conflict(m, std::vector<char>(m, 0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      link[a][b] = link[b][a] = dataset.distance(idx[a], idx[b]);
      conflict[a][b] = conflict[b][a] =
          dataset.image_index_of(idx[a]) == dataset.image_index_of(idx[b]);
    }
  }
  std::vector<std::size_t> size(m, 1);
  std::vector<bool> active(m, true);
  std::vector<std::vector<std::size_t>> groups(m);
  for (std::size_t a = 0; a < m; ++a) groups[a] = {a};

  // Nearest legal partner of each active group.
  std::vector<std::size_t> nn(m, m);
  auto refresh = [&](std::size_t a) {
    nn[a] = m;
    double best = kInf;
    for (std::size_t c = 0; c < m; ++c) {
      if (c == a || !active[c] || conflict[a][c]) continue;
      if (link[a][c] < best) {
        best = link[a][c];
        nn[a] = c;
      }
    }
  };
  for (std::size_t a = 0; a < m; ++a) refresh(a);

  while (true) {
    std::size_t best_a = m;
    double best = kInf;
    for (std::size_t a = 0; a < m; ++a) {
      if (!active[a] || nn[a] == m) continue;
      if (link[a][nn[a]] < best) {
        best = link[a][nn[a]];
        best_a = a;
      }
    }
    if (best_a == m || best > stop_distance) break;
    const std::size_t a = std::min(best_a, nn[best_a]);
    const std::size_t b = std::max(best_a, nn[best_a]);

    const double na = static_cast<double>(size[a]);
    const double nb = static_cast<double>(size[b]);
    for (std::size_t c = 0; c < m; ++c) {
      if (!active[c] || c == a || c == b) continue;
      link[a][c] = link[c][a] = (na * link[a][c] + nb * link[b][c]) / (na + nb);
      conflict[a][c] = conflict[c][a] = conflict[a][c] || conflict[b][c];
    }
    size[a] += size[b];
    groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
    groups[b].clear();
    active[b] = false;

    refresh(a);
    for (std::size_t c = 0; c < m; ++c) {
      if (!active[c] || c == a) continue;
      if (nn[c] == a || nn[c] == b) {
        refresh(c);
      } else if (!conflict[c][a] && (nn[c] == m || link[c][a] < link[c][nn[c]])) {
        nn[c] = a;
      }
    }
  }

  const auto& faces = dataset.faces();
  std::vector<FaceSet> out;
  for (std::size_t a = 0; a < m; ++a) {
    if (!active[a]) continue;
    FaceSet s;
    for (std::size_t g : groups[a]) s.insert(faces[idx[g]].face_id);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const FaceSet& x, const FaceSet& y) { return *x.begin() < *y.begin(); });
  return out;
}

}  // namespace

Clustering enforce_cooccurrence(Clustering clustering, const EventDataset& dataset,
                                double stop_distance) {
  for (const std::string& cid : cannot_link_violations(clustering, dataset)) {
    const FaceSet members = std::move(clustering.clusters.at(cid));
    clustering.clusters.erase(cid);
    const auto parts = split_cluster(dataset, members, stop_distance);
    spdlog::debug("enforce_cooccurrence: cluster {} ({} faces) split into {}", cid, members.size(),
                  parts.size());
    for (const auto& part : parts) {
      // Reserve the old id so a fresh one never reuses it.
      clustering.clusters[fresh_cluster_id(clustering, {cid})] = part;
    }
  }
  clustering.provenance.push_back("enforce_cooccurrence");
  return clustering;
}

Clustering knn_assign(Clustering clustering, const EventDataset& dataset, std::size_t k,
                      std::size_t votes_required) {
  struct Voter {
    std::size_t face;
    const std::string* face_id;
    std::string cluster;
  };
  std::vector<Voter> voters;
  const auto& faces = dataset.faces();
  for (const auto& [cid, members] : clustering.clusters) {
    for (const auto& f : members) {
      const std::size_t fi = dataset.face_index(f);
      voters.push_back({fi, &faces[fi].face_id, cid});
    }
  }
  clustering.provenance.push_back("knn_assign");
  if (voters.size() < k || k == 0) {
    return clustering;
  }

  struct Candidate {
    std::string face_id;
    double nearest;
    std::vector<std::size_t> neighbours;  // indices into voters
  };
  std::vector<Candidate> candidates;
  for (const auto& f : clustering.unassigned) {
    const std::size_t fi = dataset.face_index(f);
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(voters.size());
    for (std::size_t v = 0; v < voters.size(); ++v) {
      dist.emplace_back(dataset.distance(fi, voters[v].face), v);
    }
    auto closer = [&](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return *voters[x.second].face_id < *voters[y.second].face_id;
    };
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end(),
                      closer);
    Candidate c{f, dist.front().first, {}};
    for (std::size_t i = 0; i < k; ++i) c.neighbours.push_back(dist[i].second);
    candidates.push_back(std::move(c));
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.nearest, x.face_id) < std::tie(y.nearest, y.face_id);
  });

  std::map<std::string, std::set<std::size_t>> cluster_images;
  for (const auto& [cid, members] : clustering.clusters) {
    cluster_images[cid] = images_of(dataset, members);
  }
  for (const Candidate& c : candidates) {
    std::map<std::string, std::size_t> tally;
    for (std::size_t v : c.neighbours) ++tally[voters[v].cluster];
    const std::string* winner = nullptr;
    std::size_t votes = 0;
    for (const auto& [cid, count] : tally) {
      if (count > votes) {
        votes = count;
        winner = &cid;
      }
    }
    if (votes < votes_required) continue;
    const std::size_t img = dataset.image_index_of(dataset.face_index(c.face_id));
    auto& occupied = cluster_images[*winner];
    if (occupied.contains(img)) continue;
    occupied.insert(img);
    clustering.clusters[*winner].insert(c.face_id);
    clustering.unassigned.erase(c.face_id);
  }
  return clustering;
}

Clustering prune_low_quality_clusters(Clustering clustering, const EventDataset& dataset,
                                      double threshold) {
  for (auto it = clustering.clusters.begin(); it != clustering.clusters.end();) {
    double best = 0.0;
    for (const auto& f : it->second) {
      best = std::max(best, dataset.face(f).quality_score);
    }
    if (best < threshold) {
      clustering.unassigned.insert(it->second.begin(), it->second.end());
      it = clustering.clusters.erase(it);
    } else {
      ++it;
    }
  }
  clustering.provenance.push_back("prune_low_quality_clusters");
  return clustering;
}

Clustering propagate_duplicate_labels(Clustering clustering, const DuplicateMap& duplicates,
                                      const EventDataset& dataset) {
  auto owner = clustering.assignment();
  for (const auto& [dup, rep] : duplicates.representative_of) {
    const ImageRecord& dup_image = dataset.image(dup);
    const ImageRecord& rep_image = dataset.image(rep);
    const std::size_t dup_index = dataset.image_index(dup);
    for (const FacePairing& p : greedy_match(dataset, dup_image.face_ids, rep_image.face_ids)) {
      if (!clustering.unassigned.contains(p.left)) continue;
      auto it = owner.find(p.right);
      if (it == owner.end()) continue;
      const std::string cid = it->second;
      auto& members = clustering.clusters.at(cid);
      const bool clash = std::any_of(members.begin(), members.end(), [&](const std::string& f) {
        return dataset.image_index_of(dataset.face_index(f)) == dup_index;
      });
      if (clash) continue;
      members.insert(p.left);
      clustering.unassigned.erase(p.left);
      owner[p.left] = cid;
    }
  }
  clustering.provenance.push_back("propagate_duplicate_labels");
  return clustering;
}

}  // namespace facegraph
