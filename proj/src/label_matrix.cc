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

#include "policyscope/label_matrix.h"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "policyscope/csv.h"
#include "policyscope/error.h"
#include "policyscope/format.h"

namespace policyscope {

std::string_view label_mode_name(LabelMode mode) {
  return mode == LabelMode::kBinary ? "binary" : "soft";
}

LabelMatrix::LabelMatrix(std::vector<std::string> ads, std::vector<std::string> categories,
                         LabelMode label_mode)
    : ad_ids(std::move(ads)),
      category_ids(std::move(categories)),
      entries(ad_ids.size() * category_ids.size(), 0.0),
      mode(label_mode) {}

std::set<std::string> LabelMatrix::label_set(std::size_t r) const {
  std::set<std::string> labels;
  for (std::size_t c = 0; c < cols(); ++c) {
    if (positive(r, c)) labels.insert(category_ids[c]);
  }
  return labels;
}

std::size_t LabelMatrix::row_label_count(std::size_t r) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols(); ++c) n += positive(r, c) ? 1 : 0;
  return n;
}

std::size_t LabelMatrix::column_support(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows(); ++r) n += positive(r, c) ? 1 : 0;
  return n;
}

std::ptrdiff_t LabelMatrix::row_index(std::string_view ad_id) const {
  for (std::size_t r = 0; r < rows(); ++r) {
    if (ad_ids[r] == ad_id) return static_cast<std::ptrdiff_t>(r);
  }
  return -1;
}

std::ptrdiff_t LabelMatrix::column_index(std::string_view category_id) const {
  for (std::size_t c = 0; c < cols(); ++c) {
    if (category_ids[c] == category_id) return static_cast<std::ptrdiff_t>(c);
  }
  return -1;
}

void LabelMatrix::append_row(std::string ad_id, std::span<const double> values) {
  if (values.size() != cols()) {
    throw DataError("row for '" + ad_id + "' has " + std::to_string(values.size()) +
                    " values, expected " + std::to_string(cols()));
  }
  ad_ids.push_back(std::move(ad_id));
  entries.insert(entries.end(), values.begin(), values.end());
}

LabelMatrix LabelMatrix::select_rows(std::span<const std::string> ids) const {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t r = 0; r < rows(); ++r) index.emplace(ad_ids[r], r);
  LabelMatrix out({}, category_ids, mode);
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw DataError("ad '" + id + "' not in label matrix");
    out.append_row(id, row(it->second));
  }
  return out;
}

bool is_soft_level(double value) {
  return value == 0.0 || value == 0.3 || value == 0.6 || value == 1.0;
}

void LabelMatrix::validate() const {
  if (entries.size() != rows() * cols()) throw DataError("label matrix shape mismatch");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ad_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate ad id '" + id + "' in label matrix");
  }
  seen.clear();
  for (const auto& id : category_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate category '" + id + "' in label matrix");
  }
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      const double v = at(r, c);
      const bool ok = mode == LabelMode::kBinary ? (v == 0.0 || v == 1.0) : is_soft_level(v);
      if (!ok) {
        throw DataError("entry (" + ad_ids[r] + ", " + category_ids[c] + ") = " +
                        format_double(v) + " invalid for " +
                        std::string(label_mode_name(mode)) + " mode");
      }
    }
  }
}

std::string write_label_matrix(const LabelMatrix& matrix) {
  std::vector<std::string> header{"ad_id"};
  header.insert(header.end(), matrix.category_ids.begin(), matrix.category_ids.end());
  std::string out = csv::join_row(header);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    std::vector<std::string> fields{matrix.ad_ids[r]};
    for (const double v : matrix.row(r)) fields.push_back(format_double(v));
    out += csv::join_row(fields);
  }
  return out;
}

LabelMatrix read_label_matrix(std::string_view bytes, bool force_soft) {
  const auto records = csv::parse(bytes);
  if (records.empty()) throw SchemaError("label matrix file is empty");
  const auto& header = records.front().fields;
  if (header.empty() || trim(header[0]) != "ad_id") {
    throw SchemaError("label matrix header must start with 'ad_id'");
  }
  LabelMatrix matrix({}, std::vector<std::string>(header.begin() + 1, header.end()),
                     LabelMode::kBinary);
  bool fractional = false;
  std::vector<double> values(matrix.cols());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    if (fields.size() != header.size()) {
      throw DataError("label matrix line " + std::to_string(records[r].line) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      values[c] = parse_double(fields[c + 1]);
      if (values[c] != 0.0 && values[c] != 1.0) fractional = true;
    }
    matrix.append_row(fields[0], values);
  }
  matrix.mode = (fractional || force_soft) ? LabelMode::kSoft : LabelMode::kBinary;
  matrix.validate();
  return matrix;
}

}  // namespace policyscope
