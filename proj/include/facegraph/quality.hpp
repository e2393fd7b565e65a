#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "facegraph/dataset.hpp"

namespace facegraph {

/// Logistic recognizability model over standardized embeddings.
/// Label 1 means "recognizable / suitable for clustering".
struct QualityModel {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0.0;
};

struct QualityTrainOptions {
  std::size_t iterations = 500;
  double learning_rate = 0.5;
  double l2 = 1e-3;
  std::uint64_t seed = 0;
};

/// Full-batch gradient descent; deterministic for fixed options.
/// Throws ConfigError on single-class input, IntegrityError on mixed dimensions.
QualityModel train_quality_classifier(std::span<const Embedding> embeddings,
                                      std::span<const int> labels,
                                      const QualityTrainOptions& options = {});

/// Probability of label 1, in [0,1].
double score_quality(const QualityModel& model, std::span<const double> embedding);

/// Copy of the dataset with every quality_score replaced by the model's score.
EventDataset rescore_dataset(const EventDataset& dataset, const QualityModel& model);

}  // namespace facegraph
