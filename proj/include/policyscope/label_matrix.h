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

#ifndef POLICYSCOPE_LABEL_MATRIX_H_
#define POLICYSCOPE_LABEL_MATRIX_H_

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace policyscope {

enum class LabelMode { kBinary, kSoft };

std::string_view label_mode_name(LabelMode mode);

// Ads x categories. Binary entries are 0/1; soft entries are the
// annotator-share levels 0, 0.3, 0.6 and 1. The type does not require
// non-empty rows: prediction matrices legitimately contain them.
struct LabelMatrix {
  std::vector<std::string> ad_ids;
  std::vector<std::string> category_ids;
  std::vector<double> entries;  // row-major, ad_ids.size() x category_ids.size()
  LabelMode mode = LabelMode::kBinary;

  LabelMatrix() = default;
  LabelMatrix(std::vector<std::string> ads, std::vector<std::string> categories,
              LabelMode label_mode);

  std::size_t rows() const { return ad_ids.size(); }
  std::size_t cols() const { return category_ids.size(); }
  double at(std::size_t row, std::size_t col) const { return entries[row * cols() + col]; }
  double& at(std::size_t row, std::size_t col) { return entries[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(entries).subspan(r * cols(), cols());
  }
  bool positive(std::size_t row, std::size_t col) const { return at(row, col) > 0.0; }

  std::set<std::string> label_set(std::size_t row) const;
  std::size_t row_label_count(std::size_t row) const;
  std::size_t column_support(std::size_t col) const;

  // -1 when absent.
  std::ptrdiff_t row_index(std::string_view ad_id) const;
  std::ptrdiff_t column_index(std::string_view category_id) const;

  // Appends a row; values must have cols() entries.
  void append_row(std::string ad_id, std::span<const double> values);
  // Rows in the given order; throws DataError for unknown ids.
  LabelMatrix select_rows(std::span<const std::string> ids) const;

  // Throws DataError when an entry is outside its mode's value set, when
  // ids repeat, or when shapes disagree.
  void validate() const;

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;
};

// True when `value` is one of the soft levels 0, 0.3, 0.6, 1.
bool is_soft_level(double value);

// CSV: header "ad_id,<category>..." then one row per ad. Binary values are
// written as 0/1, soft values in shortest round-trip form.
std::string write_label_matrix(const LabelMatrix& matrix);
// Mode is soft when any entry is fractional or `soft` is forced.
LabelMatrix read_label_matrix(std::string_view bytes, bool force_soft = false);

}  // namespace policyscope

#endif  // POLICYSCOPE_LABEL_MATRIX_H_
