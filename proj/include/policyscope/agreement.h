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

// Annotator agreement: Cohen's kappa per category, complexity subgroups,
// gold-vs-crowd classification reports and label co-occurrence.

#ifndef POLICYSCOPE_AGREEMENT_H_
#define POLICYSCOPE_AGREEMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "policyscope/evaluation.h"
#include "policyscope/label_matrix.h"

namespace policyscope::agreement {

// `ref` is the first rater, `other` the second.
struct BinaryConfusion {
  std::size_t both_yes = 0;
  std::size_t ref_yes_only = 0;
  std::size_t other_yes_only = 0;
  std::size_t both_no = 0;

  std::size_t total() const { return both_yes + ref_yes_only + other_yes_only + both_no; }
};

BinaryConfusion confusion(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> other);

struct Kappa {
  double value = 0.0;
  // Both raters constant and identical (chance agreement 1); value is 1.
  bool degenerate = false;
};

// (p_o - p_e) / (1 - p_e). Throws DataError for empty or unequal inputs.
Kappa cohen_kappa(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
Kappa cohen_kappa(const BinaryConfusion& counts);

struct KappaCell {
  std::optional<double> kappa;  // nullopt: partition empty
  bool degenerate = false;
  std::size_t items = 0;
};

struct CategoryAgreement {
  std::string category_id;
  KappaCell all;
  std::optional<KappaCell> low_complexity;
  std::optional<KappaCell> high_complexity;
};

struct AgreementReport {
  std::vector<CategoryAgreement> categories;
  std::size_t items = 0;
  std::size_t low_items = 0;
  std::size_t high_items = 0;
  bool has_breakdown = false;
  std::size_t complexity_threshold = 0;
};

// Both matrices restricted to their common ads (reference row order) and
// common categories (reference column order).
struct AlignedPair {
  LabelMatrix reference;
  LabelMatrix other;
};
AlignedPair align(const LabelMatrix& reference, const LabelMatrix& other);

AgreementReport per_category_kappa(const LabelMatrix& reference, const LabelMatrix& other);

// Ads whose union of labels across both raters has at most
// `complexity_threshold` categories form the low-complexity partition.
AgreementReport subgroup_kappa(const LabelMatrix& reference, const LabelMatrix& other,
                               std::size_t complexity_threshold = 2);

// Gold is truth, crowd is prediction, over the aligned common ads.
evaluation::ClassReport gold_vs_crowd_report(const LabelMatrix& gold, const LabelMatrix& crowd);

struct CoOccurrenceMatrix {
  std::vector<std::string> category_ids;
  std::vector<std::size_t> counts;  // row-major, symmetric
  std::size_t at(std::size_t j, std::size_t k) const {
    return counts[j * category_ids.size() + k];
  }
};

CoOccurrenceMatrix cooccurrence(const LabelMatrix& matrix);

std::string render_agreement_csv(const AgreementReport& report);
// Aligned columns for terminals.
std::string render_agreement_text(const AgreementReport& report);
std::string render_cooccurrence_csv(const CoOccurrenceMatrix& matrix);

}  // namespace policyscope::agreement

#endif  // POLICYSCOPE_AGREEMENT_H_
