#include "facegraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json_util.hpp"

namespace facegraph {

void SynthConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigError("invalid synth config: " + what);
    }
  };
  auto probability = [&](double p, const char* name) {
    require(p >= 0.0 && p <= 1.0, std::string(name) + " must be in [0,1]");
  };
  require(n_participants > 0, "n_participants must be positive");
  require(n_images > 0, "n_images must be positive");
  require(dimension > 0, "dimension must be positive");
  require(sigma > 0.0, "sigma must be positive");
  require(separation >= 0.0, "separation must be non-negative");
  probability(low_quality_prob, "low_quality_prob");
  probability(quality_noise_coupling, "quality_noise_coupling");
  probability(duplicate_rate, "duplicate_rate");
  probability(p_intra, "p_intra");
  probability(p_inter, "p_inter");
  require(blurry_participants <= n_participants, "blurry_participants exceeds n_participants");
  require(burst_length > 0, "burst_length must be positive");
  require(burst_gap_seconds > 0, "burst_gap_seconds must be positive");
  require(n_communities > 0, "n_communities must be positive");
  require(max_faces_per_image > 0, "max_faces_per_image must be positive");
  require(popularity_exponent >= 0.0, "popularity_exponent must be non-negative");
  require(scene_gap_min > 0 && scene_gap_min <= scene_gap_max, "scene gap range is empty");
}

SynthConfig synth_config_from_json_text(const std::string& text, const std::string& source) {
  const json doc = detail::parse_text(text, source);
  if (!doc.is_object()) {
    throw ConfigError(source + ": synth config must be a JSON object");
  }
  SynthConfig c;
  try {
    c.event_id = detail::field_or(doc, "event_id", c.event_id, source);
    c.n_participants = detail::field_or(doc, "n_participants", c.n_participants, source);
    c.n_images = detail::field_or(doc, "n_images", c.n_images, source);
    c.dimension = detail::field_or(doc, "dimension", c.dimension, source);
    c.separation = detail::field_or(doc, "separation", c.separation, source);
    c.sigma = detail::field_or(doc, "sigma", c.sigma, source);
    c.low_quality_prob = detail::field_or(doc, "low_quality_prob", c.low_quality_prob, source);
    c.quality_noise_coupling =
        detail::field_or(doc, "quality_noise_coupling", c.quality_noise_coupling, source);
    c.blurry_participants =
        detail::field_or(doc, "blurry_participants", c.blurry_participants, source);
    c.burst_length = detail::field_or(doc, "burst_length", c.burst_length, source);
    c.burst_gap_seconds = detail::field_or(doc, "burst_gap_seconds", c.burst_gap_seconds, source);
    c.duplicate_rate = detail::field_or(doc, "duplicate_rate", c.duplicate_rate, source);
    c.n_communities = detail::field_or(doc, "n_communities", c.n_communities, source);
    c.p_intra = detail::field_or(doc, "p_intra", c.p_intra, source);
    c.p_inter = detail::field_or(doc, "p_inter", c.p_inter, source);
    c.max_faces_per_image =
        detail::field_or(doc, "max_faces_per_image", c.max_faces_per_image, source);
    c.popularity_exponent =
        detail::field_or(doc, "popularity_exponent", c.popularity_exponent, source);
    c.start_time = detail::field_or(doc, "start_time", c.start_time, source);
    c.scene_gap_min = detail::field_or(doc, "scene_gap_min", c.scene_gap_min, source);
    c.scene_gap_max = detail::field_or(doc, "scene_gap_max", c.scene_gap_max, source);
    c.seed = detail::field_or(doc, "seed", c.seed, source);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

SynthConfig load_synth_config(const std::filesystem::path& file) {
  return synth_config_from_json_text(read_file(file), file.string());
}

namespace {

std::string padded(const char* prefix, std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) {
    digits.insert(0, width - digits.size(), '0');
  }
  return prefix + digits;
}

std::size_t digits_for(std::size_t n) {
  return std::max<std::size_t>(3, std::to_string(n).size());
}

class Generator {
 public:
  explicit Generator(const SynthConfig& config) : cfg_(config), rng_(config.seed) {}

  SyntheticEvent run() {
    place_centroids();
    build_affinity();
    emit_images();

    EventDataset dataset(cfg_.event_id, cfg_.dimension, std::move(images_), std::move(faces_));
    GroundTruth truth = GroundTruth::from_dataset(dataset);
    PlantedGraph planted = truth_cooccurrence_graph(dataset, truth);
    return SyntheticEvent{std::move(dataset), std::move(truth), std::move(planted),
                          std::move(markers_)};
  }

 private:
  Embedding gaussian_vector(double norm_scale) {
    std::normal_distribution<double> normal(
        0.0, norm_scale / std::sqrt(static_cast<double>(cfg_.dimension)));
    Embedding v(cfg_.dimension);
    for (double& x : v) {
      x = normal(rng_);
    }
    return v;
  }

  void place_centroids() {
    const std::size_t n = cfg_.n_participants;
    const double min_dist = cfg_.separation * cfg_.sigma;
    const double spread = std::max(cfg_.separation, 2.0) * cfg_.sigma;
    constexpr int kMaxAttempts = 10000;

    const std::size_t width = digits_for(n);
    for (std::size_t i = 0; i < n; ++i) {
      participants_.push_back(padded("p", i, width));
    }
    for (std::size_t i = 0; i < n; ++i) {
      int attempt = 0;
      while (true) {
        Embedding c = gaussian_vector(spread);
        const bool ok = std::all_of(centroids_.begin(), centroids_.end(), [&](const Embedding& o) {
          return euclidean(c, o) >= min_dist;
        });
        if (ok) {
          centroids_.push_back(std::move(c));
          break;
        }
        if (++attempt >= kMaxAttempts) {
          throw ConfigError("infeasible synth config: cannot place " + std::to_string(n) +
                            " identities at separation " + std::to_string(cfg_.separation) +
                            " sigma in dimension " + std::to_string(cfg_.dimension) +
                            " (placed " + std::to_string(i) + ")");
        }
      }
    }
    blur_center_ = gaussian_vector(spread);
    for (std::size_t i = 0; i < n; ++i) {
      markers_.centroids[participants_[i]] = centroids_[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    blurry_.assign(n, false);
    for (std::size_t i = 0; i < cfg_.blurry_participants; ++i) {
      blurry_[order[i]] = true;
      markers_.blurry_participants.insert(participants_[order[i]]);
    }
  }

  void build_affinity() {
    const std::size_t n = cfg_.n_participants;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng_);
    std::vector<std::size_t> community(n);
    for (std::size_t r = 0; r < n; ++r) {
      community[perm[r]] = r % cfg_.n_communities;
    }

    std::shuffle(perm.begin(), perm.end(), rng_);
    popularity_.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      popularity_[perm[r]] = 1.0 / std::pow(static_cast<double>(r + 1), cfg_.popularity_exponent);
    }

    neighbours_.assign(n, {});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double p = community[a] == community[b] ? cfg_.p_intra : cfg_.p_inter;
        if (unit(rng_) < p) {
          neighbours_[a].push_back(b);
          neighbours_[b].push_back(a);
        }
      }
    }

    coverage_.resize(n);
    std::iota(coverage_.begin(), coverage_.end(), 0);
    std::shuffle(coverage_.begin(), coverage_.end(), rng_);
  }

  std::size_t pick_weighted(const std::vector<std::size_t>& candidates) {
    std::vector<double> weights;
    weights.reserve(candidates.size());
    for (std::size_t c : candidates) {
      weights.push_back(popularity_[c]);
    }
    std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
    return candidates[dist(rng_)];
  }

  std::vector<std::size_t> sample_scene() {
    std::size_t seed_participant;
    if (next_coverage_ < coverage_.size()) {
      seed_participant = coverage_[next_coverage_++];
    } else {
      std::vector<std::size_t> all(cfg_.n_participants);
      std::iota(all.begin(), all.end(), 0);
      seed_participant = pick_weighted(all);
    }
    const std::size_t limit = std::min(cfg_.max_faces_per_image, cfg_.n_participants);
    std::uniform_int_distribution<std::size_t> size_dist(1, limit);
    const std::size_t size = size_dist(rng_);

    std::vector<std::size_t> members{seed_participant};
    while (members.size() < size) {
      std::set<std::size_t> frontier;
      for (std::size_t m : members) {
        for (std::size_t nb : neighbours_[m]) {
          if (std::find(members.begin(), members.end(), nb) == members.end()) {
            frontier.insert(nb);
          }
        }
      }
      if (frontier.empty()) {
        break;
      }
      members.push_back(pick_weighted({frontier.begin(), frontier.end()}));
    }
    std::sort(members.begin(), members.end());
    return members;
  }

  std::string next_face_id() { return padded("f", face_counter_++, face_width_); }

  std::string next_image_id() { return padded("img", image_counter_++, image_width_); }

  void emit_image(const std::vector<std::size_t>& members, Timestamp t,
                  std::vector<std::size_t>& face_out) {
    ImageRecord img;
    img.image_id = next_image_id();
    img.capture_time = t;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    face_out.clear();
    for (std::size_t p : members) {
      FaceRecord f;
      f.face_id = next_face_id();
      f.image_id = img.image_id;
      f.ground_truth_id = participants_[p];
      const bool low = blurry_[p] || unit(rng_) < cfg_.low_quality_prob;
      Embedding base = centroids_[p];
      if (low) {
        f.quality_score = 0.02 + 0.18 * unit(rng_);
        for (std::size_t k = 0; k < base.size(); ++k) {
          base[k] += cfg_.quality_noise_coupling * (blur_center_[k] - base[k]);
        }
        markers_.low_quality_faces.insert(f.face_id);
      } else {
        // Skewed toward sharp faces; never below 0.3.
        f.quality_score = 0.3 + 0.7 * std::sqrt(unit(rng_));
      }
      const Embedding noise = gaussian_vector(cfg_.sigma);
      for (std::size_t k = 0; k < base.size(); ++k) {
        base[k] += noise[k];
      }
      f.embedding = std::move(base);
      img.face_ids.push_back(f.face_id);
      face_out.push_back(faces_.size());
      faces_.push_back(std::move(f));
    }
    images_.push_back(std::move(img));
  }

  void emit_duplicate(const std::vector<std::size_t>& source_faces, Timestamp t) {
    const ImageRecord& original = images_.back();
    const std::string original_id = original.image_id;
    ImageRecord img;
    img.image_id = next_image_id();
    img.capture_time = t;
    for (std::size_t src : source_faces) {
      FaceRecord f = faces_[src];
      f.face_id = next_face_id();
      f.image_id = img.image_id;
      const Embedding jitter = gaussian_vector(0.1 * cfg_.sigma);
      for (std::size_t k = 0; k < f.embedding.size(); ++k) {
        f.embedding[k] += jitter[k];
      }
      if (markers_.low_quality_faces.contains(faces_[src].face_id)) {
        markers_.low_quality_faces.insert(f.face_id);
      }
      img.face_ids.push_back(f.face_id);
      faces_.push_back(std::move(f));
    }
    markers_.duplicate_of[img.image_id] = original_id;
    images_.push_back(std::move(img));
  }

  void emit_images() {
    face_width_ = digits_for(cfg_.n_images * cfg_.max_faces_per_image);
    image_width_ = digits_for(cfg_.n_images);
    std::uniform_int_distribution<Timestamp> scene_gap(cfg_.scene_gap_min, cfg_.scene_gap_max);
    std::uniform_int_distribution<Timestamp> burst_gap(1, cfg_.burst_gap_seconds);
    std::uniform_int_distribution<std::size_t> burst_len(1, cfg_.burst_length);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Timestamp t = cfg_.start_time;
    std::vector<std::size_t> last_faces;
    while (images_.size() < cfg_.n_images) {
      const auto members = sample_scene();
      const std::size_t length = burst_len(rng_);
      t += scene_gap(rng_);
      for (std::size_t b = 0; b < length && images_.size() < cfg_.n_images; ++b) {
        if (b > 0) {
          t += burst_gap(rng_);
        }
        emit_image(members, t, last_faces);
        if (images_.size() < cfg_.n_images && unit(rng_) < cfg_.duplicate_rate) {
          t += 1;
          emit_duplicate(last_faces, t);
        }
      }
    }
  }

  const SynthConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::string> participants_;
  std::vector<Embedding> centroids_;
  Embedding blur_center_;
  std::vector<bool> blurry_;
  std::vector<double> popularity_;
  std::vector<std::vector<std::size_t>> neighbours_;
  std::vector<std::size_t> coverage_;
  std::size_t next_coverage_ = 0;

  std::vector<ImageRecord> images_;
  std::vector<FaceRecord> faces_;
  std::size_t face_counter_ = 0;
  std::size_t image_counter_ = 0;
  std::size_t face_width_ = 0;
  std::size_t image_width_ = 0;
  SynthMarkers markers_;
};

}  // namespace

SyntheticEvent generate_synthetic_event(const SynthConfig& config) {
  config.validate();
  return Generator(config).run();
}

}  // namespace facegraph
