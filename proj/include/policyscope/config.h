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

// Pipeline configuration: a flat TOML-style file of [sections] and
// `key = value` lines, command-line overrides and the typed view.

#ifndef POLICYSCOPE_CONFIG_H_
#define POLICYSCOPE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace policyscope::config {

// "section.key" -> raw value text with quotes removed. Keys before any
// section header are top-level ("seed"). Throws UsageError naming the line
// for malformed input.
std::map<std::string, std::string> parse_kv(std::string_view text);

struct Paths {
  std::filesystem::path ads;
  std::filesystem::path daily_reports;
  std::filesystem::path annotations;
  std::filesystem::path embeddings;
  std::filesystem::path codebook;  // empty: bundled
  std::filesystem::path aliases;
  std::filesystem::path stopwords;  // empty: bundled French list
  std::filesystem::path gold;
  std::filesystem::path out = "out";
};

struct PipelineConfig {
  Paths paths;
  std::string language = "fr";

  std::string label_mode = "vm";  // vm | distrib
  std::uint64_t min_duration = 240;
  std::string subset = "vm9";  // codebook subset name, or "all"
  bool drop_other = true;
  std::size_t per_category = 100;
  std::size_t min_support = 90;
  double validation_fraction = 0.1;

  std::string feature_source = "embedding";  // embedding | tfidf
  std::size_t min_df = 2;

  int epochs = 4;
  double learning_rate = 0.0;  // 0: default for the feature source
  std::size_t batch_size = 8;
  bool use_augmented = false;

  double precision_target = 0.85;
  double grid_step = 0.01;

  double augment_fraction = 0.4;
  std::string source_language = "fr";
  std::string pivot_language = "en";
  std::string translator = "mock:identity";
  std::size_t max_in_flight = 4;
  std::size_t retries = 2;
  double translator_timeout = 30.0;

  double rho = 0.20;
  std::size_t complexity_threshold = 2;

  std::uint64_t seed = 0;

  // Relative paths in the file resolve against `base_dir`. Throws
  // UsageError for unknown keys or ill-typed values.
  static PipelineConfig from_kv(const std::map<std::string, std::string>& kv,
                                const std::filesystem::path& base_dir);
  // Canonical rendering of every field, readable by parse_kv.
  std::string render() const;
};

// Reads `path` (or starts from defaults when empty), applies "key=value"
// overrides in order and builds the typed config. Override paths resolve
// against the working directory.
PipelineConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides);

}  // namespace policyscope::config

#endif  // POLICYSCOPE_CONFIG_H_
