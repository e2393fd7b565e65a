#include "facegraph/quality.hpp"

#include <cmath>
#include <random>

namespace facegraph {

namespace {

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(const QualityModel& m, std::span<const double> x) {
  double z = m.bias;
  for (std::size_t k = 0; k < x.size(); ++k) {
    z += m.weights[k] * (x[k] - m.mean[k]) / m.scale[k];
  }
  return z;
}

}  // namespace

QualityModel train_quality_classifier(std::span<const Embedding> embeddings,
                                      std::span<const int> labels,
                                      const QualityTrainOptions& options) {
  if (embeddings.size() != labels.size()) {
    throw ConfigError("quality training: embedding and label counts differ");
  }
  if (embeddings.empty()) {
    throw ConfigError("quality training: no examples");
  }
  const std::size_t d = embeddings.front().size();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].size() != d) {
      throw IntegrityError("quality training: dimension mismatch at example " + std::to_string(i));
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw ConfigError("quality training: labels must be 0 or 1");
    }
    positives += static_cast<std::size_t>(labels[i]);
  }
  if (positives == 0 || positives == labels.size()) {
    throw ConfigError("quality training: need at least one example of each class");
  }

  const double n = static_cast<double>(embeddings.size());
  QualityModel m;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (const auto& e : embeddings) {
    for (std::size_t k = 0; k < d; ++k) {
      m.mean[k] += e[k] / n;
    }
  }
  for (const auto& e : embeddings) {
    for (std::size_t k = 0; k < d; ++k) {
      const double dv = e[k] - m.mean[k];
      m.scale[k] += dv * dv / n;
    }
  }
  for (double& s : m.scale) {
    s = s > 0 ? std::sqrt(s) : 1.0;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  m.weights.resize(d);
  for (double& w : m.weights) {
    w = init(rng);
  }

  std::vector<double> grad(d);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      const double err = sigmoid(logit(m, embeddings[i])) - labels[i];
      for (std::size_t k = 0; k < d; ++k) {
        grad[k] += err * (embeddings[i][k] - m.mean[k]) / m.scale[k];
      }
      grad_bias += err;
    }
    for (std::size_t k = 0; k < d; ++k) {
      m.weights[k] -= options.learning_rate * (grad[k] / n + options.l2 * m.weights[k]);
    }
    m.bias -= options.learning_rate * grad_bias / n;
  }
  return m;
}

double score_quality(const QualityModel& model, std::span<const double> embedding) {
  if (embedding.size() != model.weights.size()) {
    throw IntegrityError("quality model dimension mismatch");
  }
  return sigmoid(logit(model, embedding));
}

EventDataset rescore_dataset(const EventDataset& dataset, const QualityModel& model) {
  std::vector<FaceRecord> faces = dataset.faces();
  for (FaceRecord& f : faces) {
    f.quality_score = score_quality(model, f.embedding);
  }
  return EventDataset(dataset.event_id(), dataset.dimension(), dataset.images(), std::move(faces));
}

}  // namespace facegraph
