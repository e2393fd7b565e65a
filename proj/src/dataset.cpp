#include "facegraph/dataset.hpp"
#include "facegraph/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace facegraph {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

EventDataset::EventDataset(std::string event_id, std::size_t dimension,
                           std::vector<ImageRecord> images, std::vector<FaceRecord> faces)
    : event_id_(std::move(event_id)),
      dimension_(dimension),
      images_(std::move(images)),
      faces_(std::move(faces)) {
  if (dimension_ == 0) {
    throw IntegrityError("dataset dimension must be positive");
  }
  if (images_.empty() || faces_.empty()) {
    throw IntegrityError("dataset '" + event_id_ + "' has no faces");
  }
  face_lookup_.reserve(faces_.size());
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const FaceRecord& f = faces_[i];
    if (f.face_id.empty()) {
      throw IntegrityError("face with empty face_id");
    }
    if (!face_lookup_.emplace(f.face_id, i).second) {
      throw IntegrityError("duplicate face_id '" + f.face_id + "'");
    }
    if (f.embedding.size() != dimension_) {
      throw IntegrityError("dimension mismatch for face '" + f.face_id + "': expected " +
                           std::to_string(dimension_) + ", got " +
                           std::to_string(f.embedding.size()));
    }
    for (double v : f.embedding) {
      if (!std::isfinite(v)) {
        throw IntegrityError("non-finite embedding value for face '" + f.face_id + "'");
      }
    }
    if (!(f.quality_score >= 0.0 && f.quality_score <= 1.0)) {
      throw IntegrityError("quality_score out of [0,1] for face '" + f.face_id + "'");
    }
  }

  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (!image_lookup_.emplace(images_[i].image_id, i).second) {
      throw IntegrityError("duplicate image_id '" + images_[i].image_id + "'");
    }
  }

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  face_image_.assign(faces_.size(), kUnset);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const ImageRecord& img = images_[i];
    if (img.face_ids.empty()) {
      throw IntegrityError("image '" + img.image_id + "' lists no faces");
    }
    for (const std::string& fid : img.face_ids) {
      auto it = face_lookup_.find(fid);
      if (it == face_lookup_.end()) {
        throw IntegrityError("image '" + img.image_id + "' references unknown face '" + fid + "'");
      }
      if (face_image_[it->second] != kUnset) {
        throw IntegrityError("face '" + fid + "' listed on more than one image");
      }
      face_image_[it->second] = i;
    }
  }
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const FaceRecord& f = faces_[i];
    auto it = image_lookup_.find(f.image_id);
    if (it == image_lookup_.end()) {
      throw IntegrityError("face '" + f.face_id + "' references missing image '" + f.image_id +
                           "'");
    }
    if (face_image_[i] != it->second) {
      throw IntegrityError("face '" + f.face_id + "' is not listed by its image '" + f.image_id +
                           "'");
    }
  }
}

bool EventDataset::has_face(const std::string& face_id) const {
  return face_lookup_.contains(face_id);
}

bool EventDataset::has_image(const std::string& image_id) const {
  return image_lookup_.contains(image_id);
}

std::size_t EventDataset::face_index(const std::string& face_id) const {
  auto it = face_lookup_.find(face_id);
  if (it == face_lookup_.end()) {
    throw NotFoundError("unknown face '" + face_id + "'");
  }
  return it->second;
}

std::size_t EventDataset::image_index(const std::string& image_id) const {
  auto it = image_lookup_.find(image_id);
  if (it == image_lookup_.end()) {
    throw NotFoundError("unknown image '" + image_id + "'");
  }
  return it->second;
}

const FaceRecord& EventDataset::face(const std::string& face_id) const {
  return faces_[face_index(face_id)];
}

const ImageRecord& EventDataset::image(const std::string& image_id) const {
  return images_[image_index(image_id)];
}

const ImageRecord& EventDataset::image_of(const std::string& face_id) const {
  return images_[face_image_[face_index(face_id)]];
}

double EventDataset::distance(std::size_t a, std::size_t b) const {
  return euclidean(faces_[a].embedding, faces_[b].embedding);
}

double EventDataset::distance(const std::string& a, const std::string& b) const {
  return distance(face_index(a), face_index(b));
}

bool EventDataset::operator==(const EventDataset& other) const {
  return event_id_ == other.event_id_ && dimension_ == other.dimension_ &&
         images_ == other.images_ && faces_ == other.faces_;
}

std::unordered_map<std::string, std::string> GroundTruth::label_index() const {
  std::unordered_map<std::string, std::string> out;
  for (const auto& [pid, faces] : identities) {
    for (const auto& f : faces) {
      out.emplace(f, pid);
    }
  }
  return out;
}

void GroundTruth::validate(const EventDataset& dataset) const {
  std::unordered_map<std::string, std::string> seen;
  for (const auto& [pid, faces] : identities) {
    for (const auto& f : faces) {
      if (!dataset.has_face(f)) {
        throw IntegrityError("ground truth '" + pid + "' references unknown face '" + f + "'");
      }
      auto [it, inserted] = seen.emplace(f, pid);
      if (!inserted) {
        throw IntegrityError("face '" + f + "' assigned to both '" + it->second + "' and '" + pid +
                             "'");
      }
    }
  }
}

GroundTruth GroundTruth::from_dataset(const EventDataset& dataset) {
  GroundTruth truth;
  for (const FaceRecord& f : dataset.faces()) {
    if (f.ground_truth_id) {
      truth.identities[*f.ground_truth_id].insert(f.face_id);
    }
  }
  return truth;
}

PlantedGraph truth_cooccurrence_graph(const EventDataset& dataset, const GroundTruth& truth) {
  PlantedGraph graph;
  const auto labels = truth.label_index();
  for (const auto& [pid, faces] : truth.identities) {
    if (!faces.empty()) {
      graph.nodes.insert(pid);
    }
  }
  for (const ImageRecord& img : dataset.images()) {
    std::set<std::string> present;
    for (const auto& fid : img.face_ids) {
      if (auto it = labels.find(fid); it != labels.end()) {
        present.insert(it->second);
      }
    }
    for (auto a = present.begin(); a != present.end(); ++a) {
      for (auto b = std::next(a); b != present.end(); ++b) {
        ++graph.edges[{*a, *b}];
      }
    }
  }
  return graph;
}

EventDataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  const auto faces_path = dir / kFacesFile;
  const json manifest = detail::parse_document(manifest_path);
  const std::string mfile = manifest_path.string();

  auto event_id = detail::field<std::string>(manifest, "event_id", mfile, 0);
  auto dimension = detail::field<std::size_t>(manifest, "dimension", mfile, 0);
  const json images_json = detail::field<json>(manifest, "images", mfile, 0);
  if (!images_json.is_array()) {
    throw ParseError(mfile, 0, "'images' must be an array");
  }
  std::vector<ImageRecord> images;
  images.reserve(images_json.size());
  for (const json& j : images_json) {
    ImageRecord img;
    img.image_id = detail::field<std::string>(j, "image_id", mfile, 0);
    img.capture_time = detail::field<Timestamp>(j, "capture_time", mfile, 0);
    img.face_ids = detail::field<std::vector<std::string>>(j, "face_ids", mfile, 0);
    if (j.contains("uri")) {
      img.uri = detail::field<std::string>(j, "uri", mfile, 0);
    }
    images.push_back(std::move(img));
  }

  std::vector<FaceRecord> faces;
  const std::string ffile = faces_path.string();
  std::istringstream lines(read_file(faces_path));
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(lines, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(ffile, line_no, e.what());
    }
    FaceRecord f;
    f.face_id = detail::field<std::string>(j, "face_id", ffile, line_no);
    f.image_id = detail::field<std::string>(j, "image_id", ffile, line_no);
    f.quality_score = detail::field<double>(j, "quality_score", ffile, line_no);
    f.embedding = detail::field<Embedding>(j, "embedding", ffile, line_no);
    if (j.contains("ground_truth_id") && !j.at("ground_truth_id").is_null()) {
      f.ground_truth_id = detail::field<std::string>(j, "ground_truth_id", ffile, line_no);
    }
    faces.push_back(std::move(f));
  }
  return EventDataset(std::move(event_id), dimension, std::move(images), std::move(faces));
}

void save_dataset(const EventDataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  }
  json manifest;
  manifest["event_id"] = dataset.event_id();
  manifest["dimension"] = dataset.dimension();
  json images = json::array();
  for (const ImageRecord& img : dataset.images()) {
    json j;
    j["image_id"] = img.image_id;
    j["capture_time"] = img.capture_time;
    j["face_ids"] = img.face_ids;
    if (!img.uri.empty()) {
      j["uri"] = img.uri;
    }
    images.push_back(std::move(j));
  }
  manifest["images"] = std::move(images);
  write_file(dir / kManifestFile, manifest.dump(2) + "\n");

  // Doubles are printed in shortest round-trip form, so reload is bit-exact.
  std::string faces;
  for (const FaceRecord& f : dataset.faces()) {
    json j;
    j["face_id"] = f.face_id;
    j["image_id"] = f.image_id;
    j["quality_score"] = f.quality_score;
    j["embedding"] = f.embedding;
    if (f.ground_truth_id) {
      j["ground_truth_id"] = *f.ground_truth_id;
    }
    faces += j.dump();
    faces += '\n';
  }
  write_file(dir / kFacesFile, faces);
}

GroundTruth load_ground_truth(const std::filesystem::path& file) {
  const json doc = detail::parse_document(file);
  const json ids = detail::field<json>(doc, "identities", file.string(), 0);
  GroundTruth truth;
  for (const auto& [pid, faces] : ids.items()) {
    try {
      truth.identities[pid] = faces.get<std::set<std::string>>();
    } catch (const json::exception& e) {
      throw ParseError(file.string(), 0, "identity '" + pid + "': " + e.what());
    }
  }
  return truth;
}

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& file) {
  json ids = json::object();
  for (const auto& [pid, faces] : truth.identities) {
    ids[pid] = faces;
  }
  json doc;
  doc["identities"] = std::move(ids);
  write_file(file, doc.dump(2) + "\n");
}

PlantedGraph load_planted_graph(const std::filesystem::path& file) {
  const json doc = detail::parse_document(file);
  const std::string f = file.string();
  PlantedGraph graph;
  graph.nodes = detail::field<std::set<std::string>>(doc, "nodes", f, 0);
  for (const json& e : detail::field<json>(doc, "edges", f, 0)) {
    auto a = detail::field<std::string>(e, "source", f, 0);
    auto b = detail::field<std::string>(e, "target", f, 0);
    if (b < a) {
      std::swap(a, b);
    }
    graph.edges[{a, b}] = detail::field<std::size_t>(e, "weight", f, 0);
  }
  return graph;
}

void save_planted_graph(const PlantedGraph& graph, const std::filesystem::path& file) {
  json doc;
  doc["nodes"] = graph.nodes;
  json edges = json::array();
  for (const auto& [key, weight] : graph.edges) {
    edges.push_back({{"source", key.first}, {"target", key.second}, {"weight", weight}});
  }
  doc["edges"] = std::move(edges);
  write_file(file, doc.dump(2) + "\n");
}

}  // namespace facegraph
