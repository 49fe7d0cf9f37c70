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

#include "policyscope/model.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "policyscope/error.h"
#include "policyscope/format.h"
#include "policyscope/rng.h"

namespace policyscope::model {

LinearHead LinearHead::zeros(std::vector<std::string> category_ids, std::size_t dimension,
                             FeatureSource source) {
  LinearHead head;
  head.dimension = dimension;
  head.feature_source = source;
  head.weights.assign(category_ids.size() * dimension, 0.0);
  head.biases.assign(category_ids.size(), 0.0);
  head.category_ids = std::move(category_ids);
  return head;
}

void LinearHead::validate() const {
  if (weights.size() != labels() * dimension || biases.size() != labels()) {
    throw DataError("linear head shapes are inconsistent");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(weights.begin(), weights.end(), finite) ||
      !std::all_of(biases.begin(), biases.end(), finite)) {
    throw DataError("linear head has non-finite parameters");
  }
}

TrainConfig TrainConfig::defaults_for(FeatureSource source) {
  TrainConfig config;
  config.initial_learning_rate = source == FeatureSource::kTfidf ? 0.5 : 2e-5;
  return config;
}

ThresholdVector ThresholdVector::uniform(std::size_t labels, double value) {
  return ThresholdVector{std::vector<double>(labels, value)};
}

double sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  // keep p strictly inside (0,1) even when the logistic saturates
  return std::clamp(p, DBL_TRUE_MIN, 1.0 - DBL_EPSILON / 2);
}

namespace {

void check_dimension(const LinearHead& head, const FeatureVector& x) {
  if (x.dimension != head.dimension) {
    throw DataError("feature dimension " + std::to_string(x.dimension) +
                    " does not match head dimension " + std::to_string(head.dimension));
  }
}

}  // namespace

std::vector<double> forward(const LinearHead& head, const FeatureVector& x) {
  check_dimension(head, x);
  std::vector<double> p(head.labels());
  for (std::size_t l = 0; l < head.labels(); ++l) {
    p[l] = sigmoid(x.dot(head.weight_row(l)) + head.biases[l]);
  }
  return p;
}

double bce_loss(std::span<const double> p, std::span<const double> target) {
  if (p.size() != target.size()) throw DataError("bce_loss: length mismatch");
  if (p.empty()) throw DataError("bce_loss: no labels");
  double sum = 0.0;
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double y = target[l];
    if (!(y >= 0.0 && y <= 1.0)) {
      throw DataError("bce_loss: target " + format_double(y) + " outside [0,1]");
    }
    const double q = std::clamp(p[l], kProbabilityClamp, 1.0 - kProbabilityClamp);
    sum -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
  }
  return sum / static_cast<double>(p.size());
}

Gradient gradient(const LinearHead& head, std::span<const FeatureVector> xs,
                  std::span<const std::vector<double>> targets) {
  if (xs.empty()) throw DataError("gradient of an empty batch");
  if (xs.size() != targets.size()) throw DataError("gradient: features and targets differ in count");
  Gradient g{std::vector<double>(head.weights.size(), 0.0),
             std::vector<double>(head.biases.size(), 0.0)};
  const double scale =
      1.0 / (static_cast<double>(xs.size()) * static_cast<double>(head.labels()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (targets[i].size() != head.labels()) throw DataError("gradient: target length mismatch");
    const auto p = forward(head, xs[i]);
    for (std::size_t l = 0; l < head.labels(); ++l) {
      const double residual = (p[l] - targets[i][l]) * scale;
      xs[i].add_scaled(residual, std::span<double>(g.weights).subspan(l * head.dimension,
                                                                       head.dimension));
      g.biases[l] += residual;
    }
  }
  return g;
}

double batch_loss(const LinearHead& head, std::span<const FeatureVector> xs,
                  std::span<const std::vector<double>> targets) {
  if (xs.empty()) throw DataError("loss of an empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += bce_loss(forward(head, xs[i]), targets[i]);
  return sum / static_cast<double>(xs.size());
}

TrainResult train(std::span<const FeatureVector> features, const LabelMatrix& labels,
                  const TrainConfig& config) {
  if (config.epochs < 1) throw DataError("epochs must be >= 1");
  if (!(config.initial_learning_rate > 0.0)) throw DataError("learning rate must be > 0");
  if (config.batch_size < 1) throw DataError("batch_size must be >= 1");
  if (features.empty()) throw DataError("no training examples");
  if (features.size() != labels.rows()) {
    throw DataError("feature rows (" + std::to_string(features.size()) +
                    ") do not match label rows (" + std::to_string(labels.rows()) + ")");
  }
  if (labels.cols() == 0) throw DataError("no label columns to train");
  const std::size_t dimension = features.front().dimension;
  for (const auto& x : features) {
    if (x.dimension != dimension) throw DataError("training features differ in dimension");
  }

  std::vector<std::vector<double>> targets(labels.rows());
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    const auto row = labels.row(r);
    targets[r].assign(row.begin(), row.end());
  }

  TrainResult result;
  result.head = LinearHead::zeros(labels.category_ids, dimension, features.front().source);
  LinearHead& head = result.head;
  const std::size_t n = features.size();
  const std::size_t L = head.labels();
  const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const auto total_steps = static_cast<double>(steps_per_epoch * static_cast<std::size_t>(config.epochs));

  Xorshift64Star rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> residuals;
  std::size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t start = 0; start < n; start += config.batch_size, ++step) {
      const std::size_t end = std::min(n, start + config.batch_size);
      const double lr =
          config.initial_learning_rate * (1.0 - static_cast<double>(step) / total_steps);
      const double scale = lr / (static_cast<double>(end - start) * static_cast<double>(L));
      // residuals are taken at the batch-start parameters, then applied
      residuals.assign((end - start) * L, 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const auto p = forward(head, features[order[i]]);
        for (std::size_t l = 0; l < L; ++l) {
          residuals[(i - start) * L + l] = p[l] - targets[order[i]][l];
        }
      }
      for (std::size_t i = start; i < end; ++i) {
        for (std::size_t l = 0; l < L; ++l) {
          const double delta = -scale * residuals[(i - start) * L + l];
          features[order[i]].add_scaled(
              delta, std::span<double>(head.weights).subspan(l * dimension, dimension));
          head.biases[l] += delta;
        }
      }
    }
    const double loss = batch_loss(head, features, targets);
    if (!std::isfinite(loss)) {
      throw DataError("training diverged: non-finite loss after epoch " +
                      std::to_string(epoch + 1) + " (learning rate " +
                      format_double(config.initial_learning_rate) + ")");
    }
    result.epoch_loss.push_back(loss);
  }
  return result;
}

Prediction predict(const LinearHead& head, const FeatureVector& x,
                   const ThresholdVector& thresholds) {
  if (thresholds.values.size() != head.labels()) {
    throw DataError("threshold vector length does not match the head");
  }
  Prediction out;
  out.probabilities = forward(head, x);
  for (std::size_t l = 0; l < head.labels(); ++l) {
    if (out.probabilities[l] > thresholds.values[l]) out.labels.push_back(head.category_ids[l]);
  }
  return out;
}

std::vector<double> threshold_grid(double grid_step) {
  if (!(grid_step > 0.0 && grid_step < 1.0)) throw DataError("grid_step must lie in (0,1)");
  std::vector<double> grid;
  const double inverse = 1.0 / grid_step;
  const double k_max = std::round(inverse);
  if (std::abs(inverse - k_max) < 1e-9) {
    // exact fractions k / K, so 0.01 steps give 0.07 rather than 0.07000000000000001
    for (int k = 1; k < static_cast<int>(k_max); ++k) grid.push_back(k / k_max);
  } else {
    for (int k = 1; static_cast<double>(k) * grid_step < 1.0; ++k) {
      grid.push_back(static_cast<double>(k) * grid_step);
    }
  }
  return grid;
}

CalibrationResult calibrate_from_probabilities(const std::vector<std::vector<double>>& probabilities,
                                               const LabelMatrix& validation_labels,
                                               const CalibrationConfig& config) {
  if (validation_labels.rows() == 0) throw DataError("calibration needs validation data");
  if (probabilities.size() != validation_labels.rows()) {
    throw DataError("calibration: probability rows do not match validation rows");
  }
  const auto grid = threshold_grid(config.grid_step);
  CalibrationResult result;
  for (std::size_t l = 0; l < validation_labels.cols(); ++l) {
    CategoryCalibration cat;
    cat.category_id = validation_labels.category_ids[l];
    std::size_t positives = 0;
    for (std::size_t r = 0; r < validation_labels.rows(); ++r) {
      positives += validation_labels.positive(r, l) ? 1 : 0;
    }
    if (positives == 0) {
      cat.no_positives = true;
      result.warnings.push_back("category '" + cat.category_id +
                                "' has no validation positives; threshold left at 0.5");
      result.categories.push_back(cat);
      result.thresholds.values.push_back(0.5);
      continue;
    }
    bool have_hit = false;
    bool have_any = false;
    double best_t = 0.0, best_p = 0.0, best_r = 0.0;
    for (const double t : grid) {
      std::size_t tp = 0, fp = 0;
      for (std::size_t r = 0; r < validation_labels.rows(); ++r) {
        if (probabilities[r][l] > t) {
          (validation_labels.positive(r, l) ? tp : fp) += 1;
        }
      }
      const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
      const double recall = static_cast<double>(tp) / static_cast<double>(positives);
      const bool hit = precision >= config.precision_target;
      bool better = false;
      if (!have_any) {
        better = true;
      } else if (hit != have_hit) {
        better = hit;
      } else if (hit) {
        better = recall > best_r || (recall == best_r && precision > best_p);
      } else {
        better = precision > best_p || (precision == best_p && recall > best_r);
      }
      // grid ascends, so keeping the first of equal candidates picks the lower t
      if (better) {
        have_any = true;
        have_hit = hit;
        best_t = t;
        best_p = precision;
        best_r = recall;
      }
    }
    cat.threshold = best_t;
    cat.precision = best_p;
    cat.recall = best_r;
    cat.met_target = have_hit;
    result.thresholds.values.push_back(best_t);
    result.categories.push_back(cat);
  }
  return result;
}

CalibrationResult calibrate_thresholds(const LinearHead& head,
                                       std::span<const FeatureVector> validation,
                                       const LabelMatrix& validation_labels,
                                       const CalibrationConfig& config) {
  if (validation_labels.category_ids != head.category_ids) {
    throw DataError("validation categories do not match the head");
  }
  std::vector<std::vector<double>> probabilities;
  probabilities.reserve(validation.size());
  for (const auto& x : validation) probabilities.push_back(forward(head, x));
  return calibrate_from_probabilities(probabilities, validation_labels, config);
}

std::string save_model(const ModelBundle& bundle) {
  nlohmann::ordered_json out;
  out["version"] = kModelFormatVersion;
  out["category_ids"] = bundle.head.category_ids;
  out["feature_source"] = feature_source_name(bundle.head.feature_source);
  out["dimension"] = bundle.head.dimension;
  out["weights"] = bundle.head.weights;
  out["biases"] = bundle.head.biases;
  out["thresholds"] = bundle.thresholds.values;
  if (bundle.vocabulary) {
    nlohmann::ordered_json vocab;
    vocab["document_count"] = bundle.vocabulary->document_count;
    vocab["min_document_frequency"] = bundle.vocabulary->min_document_frequency;
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [term, index] : bundle.vocabulary->index) {
      terms.push_back({{"term", term}, {"index", index}, {"idf", bundle.vocabulary->idf[index]}});
    }
    vocab["terms"] = std::move(terms);
    out["vocabulary"] = std::move(vocab);
  }
  out["epoch_loss"] = bundle.epoch_loss;
  return out.dump() + "\n";
}

ModelBundle load_model(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  }
  ModelBundle bundle;
  try {
    const int version = doc.at("version").get<int>();
    if (version > kModelFormatVersion) {
      throw DataError("model format version " + std::to_string(version) +
                      " is newer than this build supports (" +
                      std::to_string(kModelFormatVersion) + ")");
    }
    if (version < 1) throw DataError("invalid model format version " + std::to_string(version));
    bundle.head.category_ids = doc.at("category_ids").get<std::vector<std::string>>();
    bundle.head.feature_source = parse_feature_source(doc.at("feature_source").get<std::string>());
    bundle.head.dimension = doc.at("dimension").get<std::size_t>();
    bundle.head.weights = doc.at("weights").get<std::vector<double>>();
    bundle.head.biases = doc.at("biases").get<std::vector<double>>();
    bundle.thresholds.values = doc.at("thresholds").get<std::vector<double>>();
    if (doc.contains("vocabulary")) {
      const auto& v = doc.at("vocabulary");
      textfeat::Vocabulary vocab;
      vocab.document_count = v.at("document_count").get<std::size_t>();
      vocab.min_document_frequency = v.at("min_document_frequency").get<std::size_t>();
      const auto& terms = v.at("terms");
      vocab.idf.assign(terms.size(), 0.0);
      for (const auto& entry : terms) {
        const auto index = entry.at("index").get<std::size_t>();
        if (index >= terms.size()) throw DataError("vocabulary index out of range");
        vocab.index.emplace(entry.at("term").get<std::string>(), index);
        vocab.idf[index] = entry.at("idf").get<double>();
      }
      if (vocab.index.size() != terms.size()) throw DataError("vocabulary repeats a term");
      bundle.vocabulary = std::move(vocab);
    }
    if (doc.contains("epoch_loss")) bundle.epoch_loss = doc.at("epoch_loss").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  }
  bundle.head.validate();
  if (bundle.thresholds.values.size() != bundle.head.labels()) {
    throw DataError("model thresholds do not match its categories");
  }
  for (const double t : bundle.thresholds.values) {
    if (!(t >= 0.0 && t <= 1.0)) throw DataError("model threshold outside [0,1]");
  }
  if (bundle.head.feature_source == FeatureSource::kTfidf &&
      (!bundle.vocabulary || bundle.vocabulary->size() != bundle.head.dimension)) {
    throw DataError("tfidf model lacks a vocabulary of its dimension");
  }
  return bundle;
}

}  // namespace policyscope::model
