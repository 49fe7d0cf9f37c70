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

// Crowd annotation aggregation: vote filtering, assembly of three votes per
// ad, majority (VM) and soft (DISTRIB) label matrices, and the stratified
// test split.

#ifndef POLICYSCOPE_LABELING_H_
#define POLICYSCOPE_LABELING_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/error.h"
#include "policyscope/label_matrix.h"

namespace policyscope::labeling {

inline constexpr std::uint64_t kDefaultMinDurationSeconds = 240;
inline constexpr std::size_t kVotesPerAd = 3;

struct AnnotationVote {
  std::string worker_id;
  std::string ad_id;
  std::set<std::string> categories;
  std::uint64_t duration_seconds = 0;  // whole-survey duration
  std::int64_t submitted_at = 0;       // seconds since epoch, UTC
};

struct VoteAssembly {
  std::string ad_id;
  std::vector<AnnotationVote> votes;  // exactly kVotesPerAd, distinct workers
};

// CSV: ad_id,worker_id,categories,duration_seconds,submitted_at with
// '|'-separated category ids. Bad rows are collected.
ParseResult<AnnotationVote> parse_annotations(std::string_view bytes);

// Keeps votes with duration_seconds >= min_duration.
std::vector<AnnotationVote> filter_votes(const std::vector<AnnotationVote>& votes,
                                         std::uint64_t min_duration = kDefaultMinDurationSeconds);

// Per ad: one vote per worker (earliest wins), then the three earliest by
// (submitted_at, worker_id). Ads with fewer than three distinct workers
// are dropped. Output sorted by ad_id.
std::vector<VoteAssembly> assemble(const std::vector<AnnotationVote>& votes);

// entry = 1 iff at least two of the three votes include the category.
// Rows without any agreed category are dropped. Throws DataError when a
// vote names a category outside `category_ids`.
LabelMatrix vm_aggregate(const std::vector<VoteAssembly>& assemblies,
                         const std::vector<std::string>& category_ids);

// entry = 0.3 / 0.6 / 1.0 for one / two / three votes; no rows dropped.
LabelMatrix distrib_aggregate(const std::vector<VoteAssembly>& assemblies,
                              const std::vector<std::string>& category_ids);

// Soft level for a vote count in 0..3.
double soft_level(std::size_t votes);

// Fraction of rows with two or more labels. Throws DataError on soft input.
double multi_label_fraction(const LabelMatrix& matrix);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

struct SplitParams {
  std::size_t per_category = 100;
  std::size_t min_support = 90;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct SplitResult {
  DatasetSplit split;
  // Categories processed for the test draw, in processing order.
  std::vector<std::string> test_categories;
  std::vector<std::string> warnings;
};

// Test set: categories with support >= min_support, by descending support
// (ties in column order), each contributes up to per_category not yet
// selected ads drawn without replacement. The rest is shuffled and the
// first round(validation_fraction * rest) ads become validation. All three
// lists are reported in matrix row order.
SplitResult stratified_test_split(const LabelMatrix& matrix, const SplitParams& params);

std::string write_split(const SplitResult& result);
DatasetSplit read_split(std::string_view bytes);

}  // namespace policyscope::labeling

#endif  // POLICYSCOPE_LABELING_H_
