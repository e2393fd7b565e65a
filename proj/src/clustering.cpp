#include "facegraph/clustering.hpp"

#include <algorithm>
#include <charconv>

#include "json_util.hpp"

namespace facegraph {

Clustering Clustering::all_unassigned(const EventDataset& dataset) {
  Clustering c;
  for (const FaceRecord& f : dataset.faces()) {
    c.unassigned.insert(f.face_id);
  }
  return c;
}

std::unordered_map<std::string, std::string> Clustering::assignment() const {
  std::unordered_map<std::string, std::string> out;
  for (const auto& [cid, members] : clusters) {
    for (const auto& f : members) {
      out.emplace(f, cid);
    }
  }
  return out;
}

std::size_t Clustering::assigned_count() const {
  std::size_t n = 0;
  for (const auto& [cid, members] : clusters) {
    n += members.size();
  }
  return n;
}

void Clustering::validate(const EventDataset& dataset) const {
  std::unordered_map<std::string, std::string> owner;
  auto claim = [&](const std::string& face, const std::string& where) {
    if (!dataset.has_face(face)) {
      throw IntegrityError("clustering references unknown face '" + face + "' in " + where);
    }
    auto [it, inserted] = owner.emplace(face, where);
    if (!inserted) {
      throw IntegrityError("face '" + face + "' appears in both " + it->second + " and " + where);
    }
  };
  for (const auto& [cid, members] : clusters) {
    if (members.empty()) {
      throw IntegrityError("cluster '" + cid + "' is empty");
    }
    for (const auto& f : members) {
      claim(f, "cluster '" + cid + "'");
    }
  }
  for (const auto& f : unassigned) {
    claim(f, "unassigned");
  }
  for (const auto& f : rejected) {
    claim(f, "rejected");
  }
  if (owner.size() != dataset.faces().size()) {
    for (const FaceRecord& f : dataset.faces()) {
      if (!owner.contains(f.face_id)) {
        throw IntegrityError("face '" + f.face_id + "' missing from clustering");
      }
    }
  }
}

bool Clustering::same_partition(const Clustering& other) const {
  if (unassigned != other.unassigned || rejected != other.rejected ||
      clusters.size() != other.clusters.size()) {
    return false;
  }
  std::set<std::set<std::string>> mine;
  std::set<std::set<std::string>> theirs;
  for (const auto& [cid, members] : clusters) {
    mine.insert(members);
  }
  for (const auto& [cid, members] : other.clusters) {
    theirs.insert(members);
  }
  return mine == theirs;
}

std::string fresh_cluster_id(const Clustering& clustering, const std::set<std::string>& taken) {
  std::size_t next = 0;
  auto consider = [&](const std::string& id) {
    if (id.size() < 2 || id[0] != 'c') {
      return;
    }
    std::size_t value = 0;
    const char* first = id.data() + 1;
    const char* last = id.data() + id.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) {
      next = std::max(next, value + 1);
    }
  };
  for (const auto& [cid, members] : clustering.clusters) {
    consider(cid);
  }
  for (const auto& id : taken) {
    consider(id);
  }
  std::string id = "c" + std::to_string(next);
  while (clustering.clusters.contains(id) || taken.contains(id)) {
    id = "c" + std::to_string(++next);
  }
  return id;
}

std::vector<std::string> cannot_link_violations(const Clustering& clustering,
                                                const EventDataset& dataset) {
  std::vector<std::string> out;
  for (const auto& [cid, members] : clustering.clusters) {
    std::set<std::size_t> images;
    for (const auto& f : members) {
      if (!images.insert(dataset.image_index_of(dataset.face_index(f))).second) {
        out.push_back(cid);
        break;
      }
    }
  }
  return out;
}

std::string clustering_to_json(const Clustering& clustering) {
  json doc;
  json clusters = json::object();
  for (const auto& [cid, members] : clustering.clusters) {
    clusters[cid] = members;
  }
  doc["clusters"] = std::move(clusters);
  doc["unassigned"] = clustering.unassigned;
  doc["rejected"] = clustering.rejected;
  doc["provenance"] = clustering.provenance;
  return doc.dump(2) + "\n";
}

Clustering clustering_from_json(const std::string& text, const std::string& source) {
  const json doc = detail::parse_text(text, source);
  Clustering c;
  const json clusters = detail::field<json>(doc, "clusters", source);
  if (!clusters.is_object()) {
    throw ParseError(source, 0, "'clusters' must be an object");
  }
  for (const auto& [cid, members] : clusters.items()) {
    try {
      c.clusters[cid] = members.get<std::set<std::string>>();
    } catch (const json::exception& e) {
      throw ParseError(source, 0, "cluster '" + cid + "': " + e.what());
    }
  }
  c.unassigned = detail::field_or(doc, "unassigned", std::set<std::string>{}, source);
  c.rejected = detail::field_or(doc, "rejected", std::set<std::string>{}, source);
  c.provenance = detail::field_or(doc, "provenance", std::vector<std::string>{}, source);
  return c;
}

Clustering load_clustering(const std::filesystem::path& file) {
  return clustering_from_json(read_file(file), file.string());
}

void save_clustering(const Clustering& clustering, const std::filesystem::path& file) {
  write_file(file, clustering_to_json(clustering));
}

}  // namespace facegraph
