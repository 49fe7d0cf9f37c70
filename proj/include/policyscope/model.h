// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Multi-label classifier head: one independent sigmoid per category over a
// shared linear map, trained with binary cross-entropy (hard or soft
// targets), thresholded per category.

#ifndef POLICYSCOPE_MODEL_H_
#define POLICYSCOPE_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/features.h"
#include "policyscope/label_matrix.h"
#include "policyscope/textfeat.h"

namespace policyscope::model {

inline constexpr double kProbabilityClamp = 1e-12;
inline constexpr int kModelFormatVersion = 1;

struct LinearHead {
  std::vector<std::string> category_ids;
  std::size_t dimension = 0;
  FeatureSource feature_source = FeatureSource::kTfidf;
  std::vector<double> weights;  // labels x dimension, row-major
  std::vector<double> biases;

  static LinearHead zeros(std::vector<std::string> category_ids, std::size_t dimension,
                          FeatureSource source);
  std::size_t labels() const { return category_ids.size(); }
  std::span<const double> weight_row(std::size_t label) const {
    return std::span<const double>(weights).subspan(label * dimension, dimension);
  }
  // Throws DataError on inconsistent shapes or non-finite parameters.
  void validate() const;

  friend bool operator==(const LinearHead&, const LinearHead&) = default;
};

struct TrainConfig {
  int epochs = 4;
  double initial_learning_rate = 0.5;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;

  // 0.5 for TF-IDF inputs, 2e-5 for encoder embeddings.
  static TrainConfig defaults_for(FeatureSource source);
};

struct ThresholdVector {
  std::vector<double> values;
  static ThresholdVector uniform(std::size_t labels, double value = 0.5);
  friend bool operator==(const ThresholdVector&, const ThresholdVector&) = default;
};

struct Prediction {
  std::vector<double> probabilities;
  std::vector<std::string> labels;  // {l : p_l > t_l}, category order
};

double sigmoid(double z);

// p_l = sigmoid(w_l . x + b_l). Throws DataError on dimension mismatch.
std::vector<double> forward(const LinearHead& head, const FeatureVector& x);

// Mean over labels of -[y ln p + (1-y) ln(1-p)], p clamped to
// [1e-12, 1 - 1e-12]. Throws DataError for length mismatch or targets
// outside [0,1].
double bce_loss(std::span<const double> p, std::span<const double> target);

struct Gradient {
  std::vector<double> weights;  // same layout as LinearHead::weights
  std::vector<double> biases;
};

// Gradient of the batch-mean bce_loss: dW_l = mean_i (p_il - y_il) x_i / L.
// Throws DataError on an empty batch.
Gradient gradient(const LinearHead& head, std::span<const FeatureVector> xs,
                  std::span<const std::vector<double>> targets);

// Batch-mean bce_loss.
double batch_loss(const LinearHead& head, std::span<const FeatureVector> xs,
                  std::span<const std::vector<double>> targets);

struct TrainResult {
  LinearHead head;
  std::vector<double> epoch_loss;  // full-data mean loss after each epoch
};

// Mini-batch SGD from zero weights, lr_step = lr0 * (1 - step / total),
// reshuffled each epoch from the seeded stream. Rows of `features` align
// with rows of `labels` (either mode).
TrainResult train(std::span<const FeatureVector> features, const LabelMatrix& labels,
                  const TrainConfig& config);

Prediction predict(const LinearHead& head, const FeatureVector& x,
                   const ThresholdVector& thresholds);

struct CalibrationConfig {
  double precision_target = 0.85;
  double grid_step = 0.01;
};

struct CategoryCalibration {
  std::string category_id;
  double threshold = 0.5;
  double precision = 0.0;
  double recall = 0.0;
  bool met_target = false;
  bool no_positives = false;
};

struct CalibrationResult {
  ThresholdVector thresholds;
  std::vector<CategoryCalibration> categories;
  std::vector<std::string> warnings;
};

// Grid t = k * step for k = 1..round(1/step) - 1. Per category: among
// thresholds reaching the precision target take max recall (then higher
// precision, then lower t); otherwise max precision (then higher recall,
// then lower t). Categories without validation positives keep 0.5.
CalibrationResult calibrate_thresholds(const LinearHead& head,
                                       std::span<const FeatureVector> validation,
                                       const LabelMatrix& validation_labels,
                                       const CalibrationConfig& config = {});

// Same selection from precomputed probabilities (rows x labels).
CalibrationResult calibrate_from_probabilities(const std::vector<std::vector<double>>& probabilities,
                                               const LabelMatrix& validation_labels,
                                               const CalibrationConfig& config = {});

std::vector<double> threshold_grid(double grid_step);

struct ModelBundle {
  LinearHead head;
  ThresholdVector thresholds;
  std::optional<textfeat::Vocabulary> vocabulary;  // tfidf heads only
  std::vector<double> epoch_loss;
};

// JSON model file (see README). Round-trips every field bit-exactly.
std::string save_model(const ModelBundle& bundle);
// Throws DataError for corrupt payloads and for a format version newer
// than kModelFormatVersion.
ModelBundle load_model(std::string_view bytes);

}  // namespace policyscope::model

#endif  // POLICYSCOPE_MODEL_H_
