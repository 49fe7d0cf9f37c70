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

#ifndef POLICYSCOPE_FEATURES_H_
#define POLICYSCOPE_FEATURES_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace policyscope {

enum class FeatureSource { kTfidf, kEmbedding };

std::string_view feature_source_name(FeatureSource source);
// Throws UsageError.
FeatureSource parse_feature_source(std::string_view name);

// Sparse (TF-IDF) or dense (embedding) input vector x.
struct FeatureVector {
  std::size_t dimension = 0;
  bool dense = false;
  std::vector<std::uint32_t> indices;  // sparse only, strictly increasing
  std::vector<double> values;          // dense: `dimension` values
  FeatureSource source = FeatureSource::kTfidf;

  static FeatureVector make_dense(std::vector<double> values, FeatureSource source);
  static FeatureVector make_sparse(std::size_t dimension, std::vector<std::uint32_t> indices,
                                   std::vector<double> values, FeatureSource source);

  double dot(std::span<const double> weights) const;
  // out += alpha * x
  void add_scaled(double alpha, std::span<double> out) const;
  double norm() const;
  FeatureVector scaled(double alpha) const;
  std::vector<double> to_dense() const;
};

}  // namespace policyscope

#endif  // POLICYSCOPE_FEATURES_H_
