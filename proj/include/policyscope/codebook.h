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

#ifndef POLICYSCOPE_CODEBOOK_H_
#define POLICYSCOPE_CODEBOOK_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/label_matrix.h"

namespace policyscope::codebook {

inline constexpr std::string_view kOtherId = "other";

struct PolicyCategory {
  std::string id;
  std::string display_name;
  std::string description;
  std::optional<int> cap_major_code;
};

// Categories merged into one modeling label, e.g. economy =
// {macroeconomic_policy, foreign_trade, economic_regulations}.
struct CategoryGroup {
  std::string group_id;
  std::string display_name;
  std::vector<std::string> members;
};

// Immutable, validated category registry. Subset members may name either
// a registered category or a group id.
class Codebook {
 public:
  // Parses and validates the codebook JSON. Throws ValidationError for
  // duplicate ids, unresolved group or subset members, overlapping groups
  // or a missing "other" category.
  static Codebook load(std::string_view json_bytes);
  // The default registry shipped with the library.
  static const Codebook& bundled();

  const std::vector<PolicyCategory>& categories() const { return categories_; }
  const std::vector<CategoryGroup>& groups() const { return groups_; }
  const std::map<std::string, std::vector<std::string>>& subsets() const { return subsets_; }

  std::vector<std::string> category_ids() const;
  bool has_category(std::string_view id) const;
  bool has_group(std::string_view id) const;
  // Category or group id.
  bool resolves(std::string_view id) const;
  std::optional<std::string> group_of(std::string_view category_id) const;
  // Throws ValidationError for unknown subset names.
  const std::vector<std::string>& subset(std::string_view name) const;
  std::string display_name(std::string_view id) const;

 private:
  Codebook() = default;
  void validate() const;

  std::vector<PolicyCategory> categories_;
  std::vector<CategoryGroup> groups_;
  std::map<std::string, std::vector<std::string>> subsets_;
  std::map<std::string, std::string, std::less<>> group_by_member_;
};

// Replaces grouped categories by their group id. Throws ValidationError
// for labels that do not resolve.
std::set<std::string> apply_grouping(const std::set<std::string>& labels,
                                     const Codebook& codebook);

// Matrix form of apply_grouping: member columns merge into one group
// column placed at the first member's position. Binary columns merge by
// OR, soft columns by max.
LabelMatrix group_columns(const LabelMatrix& matrix, const Codebook& codebook);

// Restricts columns to the named subset, in subset order. Binary rows
// left without any label are dropped; soft rows survive only with some
// retained entry > 0. Subset ids missing from the matrix become all-zero
// columns.
LabelMatrix subset_filter(const LabelMatrix& matrix, const Codebook& codebook,
                          std::string_view subset_name);
LabelMatrix subset_filter(const LabelMatrix& matrix, const std::vector<std::string>& subset);

}  // namespace policyscope::codebook

#endif  // POLICYSCOPE_CODEBOOK_H_
