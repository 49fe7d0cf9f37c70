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

// Policy attention analytics over predicted labels: coverage, candidate
// attention and demographic or regional exposure with over/under flags.

#ifndef POLICYSCOPE_ATTENTION_H_
#define POLICYSCOPE_ATTENTION_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/codebook.h"
#include "policyscope/ingest.h"
#include "policyscope/label_matrix.h"

namespace policyscope::attention {

// ad_id -> predicted category ids (possibly empty).
using PredictionSet = std::map<std::string, std::set<std::string>>;

PredictionSet predictions_from_matrix(const LabelMatrix& matrix);
// CSV "ad_id,labels" with labels joined by '|'.
std::string write_predictions(const PredictionSet& preds);
// Throws SchemaError for a bad header, DataError naming the line otherwise.
PredictionSet read_predictions(std::string_view bytes);
// Throws ValidationError when a label does not resolve in the codebook.
void validate_predictions(const PredictionSet& preds, const codebook::Codebook& book);

struct CoverageStats {
  std::size_t universe = 0;
  std::size_t with_any = 0;
  std::size_t with_multiple = 0;
  double median_labels = 0.0;   // among ads with >= 1 label
  bool median_defined = false;  // false when no ad is labeled
};

// Ads of the universe missing from `preds` count as unlabeled.
CoverageStats coverage_stats(const PredictionSet& preds, const std::vector<std::string>& universe);

struct CandidateColumn {
  std::string candidate_id;
  std::size_t mentioning_ads = 0;  // mentioning ads with >= 1 label
  double normalizer = 0.0;         // sum of the column's cells
  std::vector<double> shares;      // per row category
};

struct CandidateAttentionTable {
  std::vector<std::string> category_ids;
  std::vector<CandidateColumn> candidates;
  std::vector<std::string> warnings;
};

// cell(c, k) sums impression midpoints over ads mentioning c and labeled k;
// a multi-label ad adds its full mass to each of its rows. Candidates
// without a labeled mentioning ad are omitted with a warning. Labels
// outside `category_order` raise DataError.
CandidateAttentionTable candidate_attention(const std::vector<ingest::AdRecord>& ads,
                                            const PredictionSet& preds,
                                            const std::vector<ingest::CandidateAliasSet>& aliases,
                                            const std::vector<std::string>& category_order);

enum class Axis { kGender, kAge, kRegion };

std::string_view axis_name(Axis axis);
// Throws UsageError.
Axis parse_axis(std::string_view name);
std::vector<std::string> axis_buckets(Axis axis);

// Unnormalized per-bucket share of one ad. The gender axis leaves out
// unknown-gender mass; the age axis keeps it.
std::vector<double> ad_bucket_shares(const ingest::AdRecord& ad, Axis axis);

struct ExposureTable {
  Axis axis = Axis::kGender;
  std::vector<std::string> buckets;
  std::vector<std::string> rows;            // category ids
  std::vector<std::vector<double>> shares;  // rows x buckets, each row sums to 1
  std::vector<double> totals;               // accumulated mass per row
  std::vector<std::string> warnings;
};

struct BaselineRow {
  Axis axis = Axis::kGender;
  std::vector<std::string> buckets;
  std::vector<double> shares;
  double total = 0.0;
};

// Rows follow `category_order`; rows without mass are omitted with a
// warning. Contributions are reduced in ad_id order.
ExposureTable demographic_exposure(const std::vector<ingest::AdRecord>& ads,
                                   const PredictionSet& preds, Axis axis,
                                   const std::vector<std::string>& category_order);

// Same computation for the pseudo-category "any" over ads with >= 1 label.
// Throws DataError when no labeled ad carries mass on the axis.
BaselineRow baseline(const std::vector<ingest::AdRecord>& ads, const PredictionSet& preds,
                     Axis axis);

enum class Flag { kNone, kOver, kUnder };

std::string_view flag_name(Flag flag);

inline constexpr double kDefaultRho = 0.20;

struct ExposureFlags {
  double rho = kDefaultRho;
  std::vector<std::string> rows;
  std::vector<std::string> buckets;
  std::vector<std::vector<Flag>> flags;
};

// over iff share > b and share >= (1 + rho) b; under iff share < b and
// share <= (1 - rho) b. Comparisons allow 1e-12 of rounding slack.
Flag classify(double share, double baseline_share, double rho);
// Throws DataError when the bucket lists differ.
ExposureFlags flag_exposure(const ExposureTable& table, const BaselineRow& base,
                            double rho = kDefaultRho);

std::string render_exposure_csv(const ExposureTable& table, const BaselineRow& base);
std::string render_exposure_markdown(const ExposureTable& table, const BaselineRow& base,
                                     const ExposureFlags& flags,
                                     const codebook::Codebook* book = nullptr);
std::string render_flags_csv(const ExposureTable& table, const BaselineRow& base,
                             const ExposureFlags& flags);
std::string render_candidate_csv(const CandidateAttentionTable& table);
std::string render_candidate_markdown(const CandidateAttentionTable& table,
                                      const codebook::Codebook* book = nullptr);
std::string render_coverage_json(const CoverageStats& stats);

}  // namespace policyscope::attention

#endif  // POLICYSCOPE_ATTENTION_H_
