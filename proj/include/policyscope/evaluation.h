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

// Multi-label classification metrics. Zero-denominator conventions:
// precision is 0 when nothing is predicted, recall is 0 when nothing is
// gold, F1 is 0 when P + R = 0. Samples averages score an ad whose gold
// and predicted sets are both empty as 1 (configurable).

#ifndef POLICYSCOPE_EVALUATION_H_
#define POLICYSCOPE_EVALUATION_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/label_matrix.h"

namespace policyscope::evaluation {

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassMetrics {
  std::string category_id;
  Scores scores;
  std::size_t support = 0;  // gold positives
};

struct ClassReport {
  std::vector<ClassMetrics> per_class;
  Scores micro_avg;
  Scores samples_avg;
  std::size_t total_support = 0;
};

struct SamplesOptions {
  bool empty_both_is_perfect = true;
};

// P, R, F1 from confusion counts under the conventions above.
Scores scores_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

// Both matrices must share ad and category order exactly; throws
// DataError otherwise. Entries > 0 count as positive.
std::vector<ClassMetrics> per_class_prf(const LabelMatrix& gold, const LabelMatrix& pred);
Scores micro_average(const LabelMatrix& gold, const LabelMatrix& pred);
Scores samples_average(const LabelMatrix& gold, const LabelMatrix& pred,
                       const SamplesOptions& options = {});
ClassReport classification_report(const LabelMatrix& gold, const LabelMatrix& pred,
                                  const SamplesOptions& options = {});

enum class ReportFormat { kCsv, kJson, kMarkdown };
ReportFormat parse_report_format(std::string_view name);

// csv: "category,precision,recall,f1,support" rows, then "micro avg" and
// "samples avg" rows, all at full precision. markdown: two decimals.
std::string render_report(const ClassReport& report, ReportFormat format);
// Reads the csv rendering back.
ClassReport read_report_csv(std::string_view bytes);

}  // namespace policyscope::evaluation

#endif  // POLICYSCOPE_EVALUATION_H_
