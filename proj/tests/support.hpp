#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "facegraph/dataset.hpp"

namespace facegraph::testing {

/// Small hand-built datasets with controlled embeddings.
class Builder {
 public:
  explicit Builder(std::size_t dimension = 2) : dimension_(dimension) {}

  Builder& image(const std::string& id, Timestamp t = 0) {
    order_.push_back(id);
    images_[id] = ImageRecord{id, t, {}, ""};
    return *this;
  }

  Builder& face(const std::string& id, const std::string& image, Embedding e, double quality = 1.0,
                std::optional<std::string> truth = std::nullopt) {
    images_.at(image).face_ids.push_back(id);
    faces_.push_back(FaceRecord{id, image, std::move(e), quality, std::move(truth)});
    return *this;
  }

  EventDataset build(const std::string& event_id = "fixture") const {
    std::vector<ImageRecord> images;
    for (const auto& id : order_) images.push_back(images_.at(id));
    return EventDataset(event_id, dimension_, images, faces_);
  }

 private:
  std::size_t dimension_;
  std::vector<std::string> order_;
  std::map<std::string, ImageRecord> images_;
  std::vector<FaceRecord> faces_;
};

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("facegraph-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace facegraph::testing
