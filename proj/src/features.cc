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

#include "policyscope/features.h"

#include <cmath>
#include <string>

#include "policyscope/error.h"

namespace policyscope {

std::string_view feature_source_name(FeatureSource source) {
  return source == FeatureSource::kTfidf ? "tfidf" : "embedding";
}

FeatureSource parse_feature_source(std::string_view name) {
  if (name == "tfidf") return FeatureSource::kTfidf;
  if (name == "embedding" || name == "embeddings") return FeatureSource::kEmbedding;
  throw UsageError("unknown feature source '" + std::string(name) + "'");
}

FeatureVector FeatureVector::make_dense(std::vector<double> values, FeatureSource source) {
  FeatureVector x;
  x.dimension = values.size();
  x.dense = true;
  x.values = std::move(values);
  x.source = source;
  return x;
}

FeatureVector FeatureVector::make_sparse(std::size_t dimension, std::vector<std::uint32_t> indices,
                                         std::vector<double> values, FeatureSource source) {
  FeatureVector x;
  x.dimension = dimension;
  x.indices = std::move(indices);
  x.values = std::move(values);
  x.source = source;
  return x;
}

double FeatureVector::dot(std::span<const double> weights) const {
  double sum = 0.0;
  if (dense) {
    for (std::size_t j = 0; j < values.size(); ++j) sum += values[j] * weights[j];
  } else {
    for (std::size_t k = 0; k < indices.size(); ++k) sum += values[k] * weights[indices[k]];
  }
  return sum;
}

void FeatureVector::add_scaled(double alpha, std::span<double> out) const {
  if (dense) {
    for (std::size_t j = 0; j < values.size(); ++j) out[j] += alpha * values[j];
  } else {
    for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] += alpha * values[k];
  }
}

double FeatureVector::norm() const {
  double sum = 0.0;
  for (const double v : values) sum += v * v;
  return std::sqrt(sum);
}

FeatureVector FeatureVector::scaled(double alpha) const {
  FeatureVector out = *this;
  for (double& v : out.values) v *= alpha;
  return out;
}

std::vector<double> FeatureVector::to_dense() const {
  if (dense) return values;
  std::vector<double> out(dimension, 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
  return out;
}

}  // namespace policyscope
