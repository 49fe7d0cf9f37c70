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

#include "policyscope/attention.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "policyscope/csv.h"
#include "policyscope/error.h"
#include "policyscope/format.h"

namespace policyscope::attention {

PredictionSet predictions_from_matrix(const LabelMatrix& matrix) {
  PredictionSet out;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto labels = matrix.label_set(r);
    out[matrix.ad_ids[r]] = std::set<std::string>(labels.begin(), labels.end());
  }
  return out;
}

std::string write_predictions(const PredictionSet& preds) {
  std::string out = csv::join_row({"ad_id", "labels"});
  for (const auto& [ad_id, labels] : preds) {
    std::string joined;
    for (const auto& label : labels) {
      if (!joined.empty()) joined += '|';
      joined += label;
    }
    out += csv::join_row({ad_id, joined});
  }
  return out;
}

PredictionSet read_predictions(std::string_view bytes) {
  const auto records = csv::parse(bytes);
  if (records.empty()) throw SchemaError("prediction file is empty");
  const csv::Header header(records.front());
  header.require({"ad_id", "labels"});
  const auto id_col = header.at("ad_id");
  const auto labels_col = header.at("labels");
  PredictionSet out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.fields.size() != header.names().size()) {
      throw DataError("line " + std::to_string(rec.line) + ": expected " +
                      std::to_string(header.names().size()) + " fields");
    }
    const auto& id = rec.fields[id_col];
    if (id.empty()) throw DataError("line " + std::to_string(rec.line) + ": empty ad_id");
    std::set<std::string> labels;
    std::string_view rest = rec.fields[labels_col];
    while (!rest.empty()) {
      const auto bar = rest.find('|');
      const auto piece = trim(rest.substr(0, bar));
      if (piece.empty()) throw DataError("line " + std::to_string(rec.line) + ": empty label");
      labels.emplace(piece);
      if (bar == std::string_view::npos) break;
      rest.remove_prefix(bar + 1);
    }
    if (!out.emplace(id, std::move(labels)).second) {
      throw DataError("line " + std::to_string(rec.line) + ": duplicate ad_id '" + id + "'");
    }
  }
  return out;
}

void validate_predictions(const PredictionSet& preds, const codebook::Codebook& book) {
  for (const auto& [ad_id, labels] : preds) {
    for (const auto& label : labels) {
      if (!book.resolves(label)) {
        throw ValidationError("ad '" + ad_id + "' has unknown category '" + label + "'");
      }
    }
  }
}

CoverageStats coverage_stats(const PredictionSet& preds, const std::vector<std::string>& universe) {
  CoverageStats stats;
  stats.universe = universe.size();
  std::vector<std::size_t> counts;
  for (const auto& id : universe) {
    const auto it = preds.find(id);
    const std::size_t n = it == preds.end() ? 0 : it->second.size();
    if (n >= 1) {
      ++stats.with_any;
      counts.push_back(n);
    }
    if (n >= 2) ++stats.with_multiple;
  }
  if (!counts.empty()) {
    std::sort(counts.begin(), counts.end());
    const std::size_t mid = counts.size() / 2;
    stats.median_labels = counts.size() % 2 == 1
                              ? static_cast<double>(counts[mid])
                              : (static_cast<double>(counts[mid - 1]) + static_cast<double>(counts[mid])) / 2.0;
    stats.median_defined = true;
  }
  return stats;
}

namespace {

std::map<std::string, std::size_t> row_positions(const std::vector<std::string>& order) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!pos.emplace(order[i], i).second) {
      throw DataError("category order repeats '" + order[i] + "'");
    }
  }
  return pos;
}

// Ads in ad_id order, the deterministic reduction order.
std::vector<const ingest::AdRecord*> sorted_ads(const std::vector<ingest::AdRecord>& ads) {
  std::vector<const ingest::AdRecord*> out;
  out.reserve(ads.size());
  for (const auto& ad : ads) out.push_back(&ad);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return a->ad_id < b->ad_id; });
  return out;
}

const std::set<std::string>* labels_of(const PredictionSet& preds, const std::string& ad_id) {
  const auto it = preds.find(ad_id);
  if (it == preds.end() || it->second.empty()) return nullptr;
  return &it->second;
}

std::size_t position_of(const std::map<std::string, std::size_t>& pos, const std::string& label,
                        const std::string& ad_id) {
  const auto it = pos.find(label);
  if (it == pos.end()) {
    throw DataError("ad '" + ad_id + "' is labeled '" + label +
                    "', which is not among the analyzed categories");
  }
  return it->second;
}

std::size_t count_open_ended(const std::vector<const ingest::AdRecord*>& ads,
                             const PredictionSet& preds) {
  std::size_t n = 0;
  for (const auto* ad : ads) {
    if (labels_of(preds, ad->ad_id) && ad->impressions.open_ended()) ++n;
  }
  return n;
}

std::string open_ended_warning(std::size_t n) {
  return std::to_string(n) +
         " labeled ad(s) have open-ended impressions; their lower bound is used";
}

}  // namespace

CandidateAttentionTable candidate_attention(const std::vector<ingest::AdRecord>& ads,
                                            const PredictionSet& preds,
                                            const std::vector<ingest::CandidateAliasSet>& aliases,
                                            const std::vector<std::string>& category_order) {
  const auto pos = row_positions(category_order);
  const auto ordered = sorted_ads(ads);
  CandidateAttentionTable table;
  table.category_ids = category_order;
  for (const auto& candidate : aliases) {
    CandidateColumn column;
    column.candidate_id = candidate.candidate_id;
    std::vector<double> cells(category_order.size(), 0.0);
    for (const auto* ad : ordered) {
      const auto* labels = labels_of(preds, ad->ad_id);
      if (!labels || !ingest::match_candidate(*ad, candidate)) continue;
      const double mass = ingest::midpoint(ad->impressions).value;
      for (const auto& label : *labels) cells[position_of(pos, label, ad->ad_id)] += mass;
      ++column.mentioning_ads;
    }
    for (const double c : cells) column.normalizer += c;
    if (column.mentioning_ads == 0 || column.normalizer <= 0.0) {
      table.warnings.push_back("candidate '" + candidate.candidate_id +
                               "' has no labeled mentioning ads with impressions; column omitted");
      continue;
    }
    column.shares.resize(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) column.shares[k] = cells[k] / column.normalizer;
    table.candidates.push_back(std::move(column));
  }
  if (const auto n = count_open_ended(ordered, preds); n > 0) {
    table.warnings.push_back(open_ended_warning(n));
  }
  return table;
}

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::kGender: return "gender";
    case Axis::kAge: return "age";
    case Axis::kRegion: return "region";
  }
  return "gender";
}

Axis parse_axis(std::string_view name) {
  if (name == "gender") return Axis::kGender;
  if (name == "age") return Axis::kAge;
  if (name == "region") return Axis::kRegion;
  throw UsageError("unknown axis '" + std::string(name) + "' (expected gender, age or region)");
}

std::vector<std::string> axis_buckets(Axis axis) {
  switch (axis) {
    case Axis::kGender:
      return {std::string(ingest::gender_name(ingest::Gender::kFemale)),
              std::string(ingest::gender_name(ingest::Gender::kMale))};
    case Axis::kAge: return {ingest::kAgeBuckets.begin(), ingest::kAgeBuckets.end()};
    case Axis::kRegion: return {ingest::kRegions.begin(), ingest::kRegions.end()};
  }
  return {};
}

std::vector<double> ad_bucket_shares(const ingest::AdRecord& ad, Axis axis) {
  std::vector<double> out(axis_buckets(axis).size(), 0.0);
  switch (axis) {
    case Axis::kGender:
      for (const auto& cell : ad.demographics) {
        if (cell.gender == ingest::Gender::kFemale) out[0] += cell.share;
        if (cell.gender == ingest::Gender::kMale) out[1] += cell.share;
      }
      break;
    case Axis::kAge:
      for (const auto& cell : ad.demographics) out[cell.age_bucket] += cell.share;
      break;
    case Axis::kRegion:
      for (const auto& cell : ad.regions) out[cell.region] += cell.share;
      break;
  }
  return out;
}

namespace {

double row_sum(const std::vector<double>& row) {
  double sum = 0.0;
  for (const double v : row) sum += v;
  return sum;
}

std::vector<double> normalized(const std::vector<double>& row, double sum) {
  std::vector<double> out(row.size());
  for (std::size_t b = 0; b < row.size(); ++b) out[b] = row[b] / sum;
  return out;
}

}  // namespace

ExposureTable demographic_exposure(const std::vector<ingest::AdRecord>& ads,
                                   const PredictionSet& preds, Axis axis,
                                   const std::vector<std::string>& category_order) {
  const auto pos = row_positions(category_order);
  const auto ordered = sorted_ads(ads);
  ExposureTable table;
  table.axis = axis;
  table.buckets = axis_buckets(axis);
  std::vector<std::vector<double>> cells(category_order.size(),
                                         std::vector<double>(table.buckets.size(), 0.0));
  for (const auto* ad : ordered) {
    const auto* labels = labels_of(preds, ad->ad_id);
    if (!labels) continue;
    const double mass = ingest::midpoint(ad->impressions).value;
    const auto shares = ad_bucket_shares(*ad, axis);
    for (const auto& label : *labels) {
      auto& row = cells[position_of(pos, label, ad->ad_id)];
      for (std::size_t b = 0; b < row.size(); ++b) row[b] += mass * shares[b];
    }
  }
  for (std::size_t k = 0; k < category_order.size(); ++k) {
    const double sum = row_sum(cells[k]);
    if (sum <= 0.0) {
      table.warnings.push_back("category '" + category_order[k] + "' has no " +
                               std::string(axis_name(axis)) + " mass; row omitted");
      continue;
    }
    table.rows.push_back(category_order[k]);
    table.shares.push_back(normalized(cells[k], sum));
    table.totals.push_back(sum);
  }
  if (const auto n = count_open_ended(ordered, preds); n > 0) {
    table.warnings.push_back(open_ended_warning(n));
  }
  return table;
}

BaselineRow baseline(const std::vector<ingest::AdRecord>& ads, const PredictionSet& preds,
                     Axis axis) {
  BaselineRow base;
  base.axis = axis;
  base.buckets = axis_buckets(axis);
  std::vector<double> cells(base.buckets.size(), 0.0);
  std::size_t labeled = 0;
  for (const auto* ad : sorted_ads(ads)) {
    if (!labels_of(preds, ad->ad_id)) continue;
    ++labeled;
    const double mass = ingest::midpoint(ad->impressions).value;
    const auto shares = ad_bucket_shares(*ad, axis);
    for (std::size_t b = 0; b < cells.size(); ++b) cells[b] += mass * shares[b];
  }
  if (labeled == 0) throw DataError("baseline: no ad has a predicted label");
  base.total = row_sum(cells);
  if (base.total <= 0.0) {
    throw DataError("baseline: labeled ads carry no " + std::string(axis_name(axis)) + " mass");
  }
  base.shares = normalized(cells, base.total);
  return base;
}

std::string_view flag_name(Flag flag) {
  switch (flag) {
    case Flag::kNone: return "none";
    case Flag::kOver: return "over";
    case Flag::kUnder: return "under";
  }
  return "none";
}

Flag classify(double share, double baseline_share, double rho) {
  constexpr double kSlack = 1e-12;
  if (share > baseline_share && share >= (1.0 + rho) * baseline_share - kSlack) return Flag::kOver;
  if (share < baseline_share && share <= (1.0 - rho) * baseline_share + kSlack) return Flag::kUnder;
  return Flag::kNone;
}

ExposureFlags flag_exposure(const ExposureTable& table, const BaselineRow& base, double rho) {
  if (table.buckets != base.buckets) throw DataError("exposure table and baseline buckets differ");
  ExposureFlags out;
  out.rho = rho;
  out.rows = table.rows;
  out.buckets = table.buckets;
  for (const auto& row : table.shares) {
    std::vector<Flag> flags(row.size());
    for (std::size_t b = 0; b < row.size(); ++b) flags[b] = classify(row[b], base.shares[b], rho);
    out.flags.push_back(std::move(flags));
  }
  return out;
}

namespace {

std::string label_for(const std::string& id, const codebook::Codebook* book) {
  return book && book->resolves(id) ? book->display_name(id) : id;
}

std::string percent(double share) { return format_fixed(100.0 * share, 2); }

std::string markdown_separator(std::size_t columns) {
  std::string out = "|---";
  for (std::size_t i = 0; i < columns; ++i) out += "|---:";
  return out + "|\n";
}

}  // namespace

std::string render_exposure_csv(const ExposureTable& table, const BaselineRow& base) {
  std::vector<std::string> header{"category"};
  header.insert(header.end(), table.buckets.begin(), table.buckets.end());
  header.push_back("total_impressions");
  std::string out = csv::join_row(header);
  const auto emit = [&](const std::string& name, const std::vector<double>& shares, double total) {
    std::vector<std::string> fields{name};
    for (const double s : shares) fields.push_back(format_double(s));
    fields.push_back(format_double(total));
    out += csv::join_row(fields);
  };
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    emit(table.rows[k], table.shares[k], table.totals[k]);
  }
  emit("baseline", base.shares, base.total);
  return out;
}

std::string render_exposure_markdown(const ExposureTable& table, const BaselineRow& base,
                                     const ExposureFlags& flags, const codebook::Codebook* book) {
  std::ostringstream out;
  out << "<!-- shares in percent of row impressions; + over-exposed, - under-exposed (rho="
      << format_double(flags.rho) << ") -->\n";
  out << "| Category |";
  for (const auto& b : table.buckets) out << ' ' << b << " |";
  out << '\n' << markdown_separator(table.buckets.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    out << "| " << label_for(table.rows[k], book) << " |";
    for (std::size_t b = 0; b < table.buckets.size(); ++b) {
      out << ' ' << percent(table.shares[k][b]);
      if (k < flags.flags.size()) {
        if (flags.flags[k][b] == Flag::kOver) out << " +";
        if (flags.flags[k][b] == Flag::kUnder) out << " -";
      }
      out << " |";
    }
    out << '\n';
  }
  out << "| All labeled ads |";
  for (const double s : base.shares) out << ' ' << percent(s) << " |";
  out << '\n';
  return out.str();
}

std::string render_flags_csv(const ExposureTable& table, const BaselineRow& base,
                             const ExposureFlags& flags) {
  std::string out = csv::join_row({"category", "bucket", "share", "baseline", "flag"});
  for (std::size_t k = 0; k < flags.rows.size(); ++k) {
    for (std::size_t b = 0; b < flags.buckets.size(); ++b) {
      out += csv::join_row({flags.rows[k], flags.buckets[b], format_double(table.shares[k][b]),
                            format_double(base.shares[b]),
                            std::string(flag_name(flags.flags[k][b]))});
    }
  }
  return out;
}

std::string render_candidate_csv(const CandidateAttentionTable& table) {
  std::vector<std::string> header{"category"};
  for (const auto& c : table.candidates) header.push_back(c.candidate_id);
  std::string out = csv::join_row(header);
  for (std::size_t k = 0; k < table.category_ids.size(); ++k) {
    std::vector<std::string> fields{table.category_ids[k]};
    for (const auto& c : table.candidates) fields.push_back(format_double(c.shares[k]));
    out += csv::join_row(fields);
  }
  std::vector<std::string> ads{"labeled_mentioning_ads"};
  for (const auto& c : table.candidates) ads.push_back(std::to_string(c.mentioning_ads));
  out += csv::join_row(ads);
  return out;
}

std::string render_candidate_markdown(const CandidateAttentionTable& table,
                                      const codebook::Codebook* book) {
  std::ostringstream out;
  out << "<!-- shares in percent of each candidate's labeled impressions -->\n";
  out << "| Category |";
  for (const auto& c : table.candidates) out << ' ' << c.candidate_id << " |";
  out << '\n' << markdown_separator(table.candidates.size());
  for (std::size_t k = 0; k < table.category_ids.size(); ++k) {
    out << "| " << label_for(table.category_ids[k], book) << " |";
    for (const auto& c : table.candidates) out << ' ' << percent(c.shares[k]) << " |";
    out << '\n';
  }
  return out.str();
}

std::string render_coverage_json(const CoverageStats& stats) {
  nlohmann::ordered_json out;
  out["universe"] = stats.universe;
  out["with_any"] = stats.with_any;
  out["with_multiple"] = stats.with_multiple;
  if (stats.median_defined) {
    out["median_labels"] = stats.median_labels;
  } else {
    out["median_labels"] = nullptr;
  }
  out["median_defined"] = stats.median_defined;
  return out.dump(2) + "\n";
}

}  // namespace policyscope::attention
