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

#include "policyscope/agreement.h"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "policyscope/csv.h"
#include "policyscope/error.h"
#include "policyscope/format.h"

namespace policyscope::agreement {

BinaryConfusion confusion(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> other) {
  if (ref.size() != other.size()) {
    throw DataError("kappa inputs differ in length (" + std::to_string(ref.size()) + " vs " +
                    std::to_string(other.size()) + ")");
  }
  BinaryConfusion c;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const bool a = ref[i] != 0;
    const bool b = other[i] != 0;
    if (a && b) {
      ++c.both_yes;
    } else if (a) {
      ++c.ref_yes_only;
    } else if (b) {
      ++c.other_yes_only;
    } else {
      ++c.both_no;
    }
  }
  return c;
}

Kappa cohen_kappa(const BinaryConfusion& counts) {
  const std::size_t n = counts.total();
  if (n == 0) throw DataError("kappa of empty vectors");
  const auto total = static_cast<double>(n);
  const double p_o = static_cast<double>(counts.both_yes + counts.both_no) / total;
  const double a_yes = static_cast<double>(counts.both_yes + counts.ref_yes_only) / total;
  const double b_yes = static_cast<double>(counts.both_yes + counts.other_yes_only) / total;
  const double p_e = a_yes * b_yes + (1.0 - a_yes) * (1.0 - b_yes);
  // p_e == 1 only when both raters are constant on the same value, which
  // forces p_o == 1.
  const bool both_constant = (counts.ref_yes_only + counts.other_yes_only == 0) &&
                             (counts.both_yes == n || counts.both_no == n);
  if (both_constant) return Kappa{1.0, true};
  return Kappa{(p_o - p_e) / (1.0 - p_e), false};
}

Kappa cohen_kappa(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const auto counts = confusion(a, b);
  if (a.empty()) throw DataError("kappa of empty vectors");
  return cohen_kappa(counts);
}

AlignedPair align(const LabelMatrix& reference, const LabelMatrix& other) {
  std::vector<std::string> ads;
  for (const auto& id : reference.ad_ids) {
    if (other.row_index(id) >= 0) ads.push_back(id);
  }
  std::vector<std::string> categories;
  for (const auto& id : reference.category_ids) {
    if (other.column_index(id) >= 0) categories.push_back(id);
  }
  if (ads.empty()) throw DataError("matrices share no ads");
  if (categories.empty()) throw DataError("matrices share no categories");
  auto project = [&](const LabelMatrix& m) {
    LabelMatrix out(ads, categories, LabelMode::kBinary);
    for (std::size_t r = 0; r < ads.size(); ++r) {
      const auto src_r = static_cast<std::size_t>(m.row_index(ads[r]));
      for (std::size_t c = 0; c < categories.size(); ++c) {
        const auto src_c = static_cast<std::size_t>(m.column_index(categories[c]));
        out.at(r, c) = m.positive(src_r, src_c) ? 1.0 : 0.0;
      }
    }
    return out;
  };
  return AlignedPair{project(reference), project(other)};
}

namespace {

std::vector<std::uint8_t> column_bits(const LabelMatrix& m, std::size_t c,
                                      const std::vector<std::size_t>& rows) {
  std::vector<std::uint8_t> bits;
  bits.reserve(rows.size());
  for (const std::size_t r : rows) bits.push_back(m.positive(r, c) ? 1 : 0);
  return bits;
}

KappaCell kappa_over(const AlignedPair& pair, std::size_t c, const std::vector<std::size_t>& rows) {
  KappaCell cell;
  cell.items = rows.size();
  if (rows.empty()) return cell;
  const auto k = cohen_kappa(column_bits(pair.reference, c, rows), column_bits(pair.other, c, rows));
  cell.kappa = k.value;
  cell.degenerate = k.degenerate;
  return cell;
}

}  // namespace

AgreementReport per_category_kappa(const LabelMatrix& reference, const LabelMatrix& other) {
  const auto pair = align(reference, other);
  std::vector<std::size_t> all(pair.reference.rows());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  AgreementReport report;
  report.items = all.size();
  for (std::size_t c = 0; c < pair.reference.cols(); ++c) {
    report.categories.push_back(
        CategoryAgreement{pair.reference.category_ids[c], kappa_over(pair, c, all), {}, {}});
  }
  return report;
}

AgreementReport subgroup_kappa(const LabelMatrix& reference, const LabelMatrix& other,
                               std::size_t complexity_threshold) {
  const auto pair = align(reference, other);
  std::vector<std::size_t> all, low, high;
  for (std::size_t r = 0; r < pair.reference.rows(); ++r) {
    std::size_t labels = 0;
    for (std::size_t c = 0; c < pair.reference.cols(); ++c) {
      labels += (pair.reference.positive(r, c) || pair.other.positive(r, c)) ? 1 : 0;
    }
    all.push_back(r);
    (labels <= complexity_threshold ? low : high).push_back(r);
  }
  AgreementReport report;
  report.items = all.size();
  report.low_items = low.size();
  report.high_items = high.size();
  report.has_breakdown = true;
  report.complexity_threshold = complexity_threshold;
  for (std::size_t c = 0; c < pair.reference.cols(); ++c) {
    report.categories.push_back(CategoryAgreement{pair.reference.category_ids[c],
                                                  kappa_over(pair, c, all),
                                                  kappa_over(pair, c, low),
                                                  kappa_over(pair, c, high)});
  }
  return report;
}

evaluation::ClassReport gold_vs_crowd_report(const LabelMatrix& gold, const LabelMatrix& crowd) {
  const auto pair = align(gold, crowd);
  return evaluation::classification_report(pair.reference, pair.other);
}

CoOccurrenceMatrix cooccurrence(const LabelMatrix& matrix) {
  if (matrix.mode != LabelMode::kBinary) throw DataError("cooccurrence requires a binary matrix");
  const std::size_t k = matrix.cols();
  CoOccurrenceMatrix out{matrix.category_ids, std::vector<std::size_t>(k * k, 0)};
  std::vector<std::size_t> on;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    on.clear();
    for (std::size_t c = 0; c < k; ++c) {
      if (matrix.positive(r, c)) on.push_back(c);
    }
    for (const std::size_t a : on) {
      for (const std::size_t b : on) ++out.counts[a * k + b];
    }
  }
  return out;
}

namespace {

std::string cell_text(const KappaCell& cell) {
  if (!cell.kappa) return "undefined-empty";
  return format_double(*cell.kappa);
}

}  // namespace

std::string render_agreement_csv(const AgreementReport& report) {
  std::vector<std::string> header{"category", "kappa", "degenerate", "items"};
  if (report.has_breakdown) {
    header.insert(header.end(), {"kappa_low", "items_low", "kappa_high", "items_high"});
  }
  std::string out = csv::join_row(header);
  for (const auto& cat : report.categories) {
    std::vector<std::string> row{cat.category_id, cell_text(cat.all),
                                 cat.all.degenerate ? "1" : "0", std::to_string(cat.all.items)};
    if (report.has_breakdown) {
      row.push_back(cell_text(*cat.low_complexity));
      row.push_back(std::to_string(cat.low_complexity->items));
      row.push_back(cell_text(*cat.high_complexity));
      row.push_back(std::to_string(cat.high_complexity->items));
    }
    out += csv::join_row(row);
  }
  return out;
}

std::string render_agreement_text(const AgreementReport& report) {
  std::size_t width = 8;
  for (const auto& cat : report.categories) width = std::max(width, cat.category_id.size());
  auto fmt = [](const KappaCell& cell) {
    if (!cell.kappa) return std::string("--");
    return format_fixed(*cell.kappa, 2) + (cell.degenerate ? "*" : "");
  };
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "category" << std::right
      << std::setw(10) << "all";
  if (report.has_breakdown) {
    out << std::setw(10) << ("<=" + std::to_string(report.complexity_threshold))
        << std::setw(10) << (">" + std::to_string(report.complexity_threshold));
  }
  out << "\n";
  for (const auto& cat : report.categories) {
    out << std::left << std::setw(static_cast<int>(width)) << cat.category_id << std::right
        << std::setw(10) << fmt(cat.all);
    if (report.has_breakdown) {
      out << std::setw(10) << fmt(*cat.low_complexity) << std::setw(10)
          << fmt(*cat.high_complexity);
    }
    out << "\n";
  }
  out << std::left << std::setw(static_cast<int>(width)) << "items" << std::right
      << std::setw(10) << report.items;
  if (report.has_breakdown) {
    out << std::setw(10) << report.low_items << std::setw(10) << report.high_items;
  }
  out << "\n* both raters constant; kappa reported as 1\n";
  return out.str();
}

std::string render_cooccurrence_csv(const CoOccurrenceMatrix& matrix) {
  std::vector<std::string> header{"category"};
  header.insert(header.end(), matrix.category_ids.begin(), matrix.category_ids.end());
  std::string out = csv::join_row(header);
  for (std::size_t j = 0; j < matrix.category_ids.size(); ++j) {
    std::vector<std::string> row{matrix.category_ids[j]};
    for (std::size_t k = 0; k < matrix.category_ids.size(); ++k) {
      row.push_back(std::to_string(matrix.at(j, k)));
    }
    out += csv::join_row(row);
  }
  return out;
}

}  // namespace policyscope::agreement
