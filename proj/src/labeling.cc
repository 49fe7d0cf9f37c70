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

#include "policyscope/labeling.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "policyscope/csv.h"
#include "policyscope/format.h"
#include "policyscope/rng.h"

namespace policyscope::labeling {

namespace {

bool earlier(const AnnotationVote& a, const AnnotationVote& b) {
  if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
  return a.worker_id < b.worker_id;
}

// Vote counts per category column for one assembly.
std::vector<std::size_t> count_votes(const VoteAssembly& assembly,
                                     const std::vector<std::string>& category_ids,
                                     const std::unordered_map<std::string, std::size_t>& column) {
  std::vector<std::size_t> counts(category_ids.size(), 0);
  for (const auto& vote : assembly.votes) {
    for (const auto& category : vote.categories) {
      const auto it = column.find(category);
      if (it == column.end()) {
        throw DataError("ad '" + assembly.ad_id + "': vote by '" + vote.worker_id +
                        "' names unknown category '" + category + "'");
      }
      ++counts[it->second];
    }
  }
  return counts;
}

std::unordered_map<std::string, std::size_t> column_map(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
  return out;
}

}  // namespace

ParseResult<AnnotationVote> parse_annotations(std::string_view bytes) {
  const auto records = csv::parse(bytes);
  if (records.empty()) throw SchemaError("annotation file has no header row");
  const csv::Header header(records.front());
  header.require({"ad_id", "worker_id", "categories", "duration_seconds", "submitted_at"});
  const std::size_t ad = header.at("ad_id");
  const std::size_t worker = header.at("worker_id");
  const std::size_t cats = header.at("categories");
  const std::size_t duration = header.at("duration_seconds");
  const std::size_t submitted = header.at("submitted_at");

  ParseResult<AnnotationVote> result;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    try {
      if (fields.size() != header.names().size()) {
        throw DataError("expected " + std::to_string(header.names().size()) + " fields, found " +
                        std::to_string(fields.size()));
      }
      AnnotationVote vote;
      vote.ad_id = std::string(trim(fields[ad]));
      vote.worker_id = std::string(trim(fields[worker]));
      if (vote.ad_id.empty()) throw DataError("empty ad_id");
      if (vote.worker_id.empty()) throw DataError("empty worker_id");
      std::string_view list = fields[cats];
      while (!list.empty()) {
        const auto bar = list.find('|');
        const auto item = trim(list.substr(0, bar));
        if (!item.empty()) vote.categories.emplace(item);
        if (bar == std::string_view::npos) break;
        list.remove_prefix(bar + 1);
      }
      if (vote.categories.empty()) throw DataError("vote has no categories");
      vote.duration_seconds = parse_uint(fields[duration]);
      vote.submitted_at = parse_timestamp(fields[submitted]);
      result.rows.push_back(std::move(vote));
    } catch (const DataError& e) {
      result.errors.push_back(RowError{records[r].line, e.what()});
    }
  }
  return result;
}

std::vector<AnnotationVote> filter_votes(const std::vector<AnnotationVote>& votes,
                                         std::uint64_t min_duration) {
  std::vector<AnnotationVote> kept;
  std::copy_if(votes.begin(), votes.end(), std::back_inserter(kept),
               [&](const AnnotationVote& v) { return v.duration_seconds >= min_duration; });
  return kept;
}

std::vector<VoteAssembly> assemble(const std::vector<AnnotationVote>& votes) {
  std::map<std::string, std::vector<AnnotationVote>> by_ad;
  for (const auto& vote : votes) by_ad[vote.ad_id].push_back(vote);

  std::vector<VoteAssembly> out;
  for (auto& [ad_id, ad_votes] : by_ad) {
    std::stable_sort(ad_votes.begin(), ad_votes.end(), earlier);
    std::unordered_set<std::string> workers;
    VoteAssembly assembly{ad_id, {}};
    for (const auto& vote : ad_votes) {
      if (!workers.insert(vote.worker_id).second) continue;
      assembly.votes.push_back(vote);
      if (assembly.votes.size() == kVotesPerAd) break;
    }
    if (assembly.votes.size() == kVotesPerAd) out.push_back(std::move(assembly));
  }
  return out;
}

namespace {

std::vector<const VoteAssembly*> by_ad(const std::vector<VoteAssembly>& assemblies) {
  std::vector<const VoteAssembly*> out;
  for (const auto& a : assemblies) out.push_back(&a);
  std::stable_sort(out.begin(), out.end(),
                   [](const VoteAssembly* a, const VoteAssembly* b) { return a->ad_id < b->ad_id; });
  return out;
}

}  // namespace

double soft_level(std::size_t votes) {
  switch (votes) {
    case 0:
      return 0.0;
    case 1:
      return 0.3;
    case 2:
      return 0.6;
    default:
      return 1.0;
  }
}

LabelMatrix vm_aggregate(const std::vector<VoteAssembly>& assemblies,
                         const std::vector<std::string>& category_ids) {
  const auto column = column_map(category_ids);
  LabelMatrix out({}, category_ids, LabelMode::kBinary);
  std::vector<double> row(category_ids.size());
  for (const auto* p : by_ad(assemblies)) {
    const auto& assembly = *p;
    const auto counts = count_votes(assembly, category_ids, column);
    bool agreed = false;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      row[c] = counts[c] >= 2 ? 1.0 : 0.0;
      agreed = agreed || counts[c] >= 2;
    }
    if (agreed) out.append_row(assembly.ad_id, row);
  }
  return out;
}

LabelMatrix distrib_aggregate(const std::vector<VoteAssembly>& assemblies,
                              const std::vector<std::string>& category_ids) {
  const auto column = column_map(category_ids);
  LabelMatrix out({}, category_ids, LabelMode::kSoft);
  std::vector<double> row(category_ids.size());
  for (const auto* p : by_ad(assemblies)) {
    const auto& assembly = *p;
    const auto counts = count_votes(assembly, category_ids, column);
    for (std::size_t c = 0; c < counts.size(); ++c) row[c] = soft_level(counts[c]);
    out.append_row(assembly.ad_id, row);
  }
  return out;
}

double multi_label_fraction(const LabelMatrix& matrix) {
  if (matrix.mode != LabelMode::kBinary) {
    throw DataError("multi_label_fraction requires a binary matrix");
  }
  if (matrix.rows() == 0) return 0.0;
  std::size_t multi = 0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) multi += matrix.row_label_count(r) >= 2 ? 1 : 0;
  return static_cast<double>(multi) / static_cast<double>(matrix.rows());
}

SplitResult stratified_test_split(const LabelMatrix& matrix, const SplitParams& params) {
  if (matrix.mode != LabelMode::kBinary) {
    throw DataError("stratified_test_split requires a binary matrix");
  }
  if (params.per_category < 1) throw DataError("per_category must be >= 1");
  if (!(params.validation_fraction >= 0.0 && params.validation_fraction <= 1.0)) {
    throw DataError("validation_fraction must lie in [0,1]");
  }
  SplitResult result;
  result.split.seed = params.seed;
  Xorshift64Star rng(params.seed);

  std::vector<std::size_t> order;
  std::vector<std::size_t> support(matrix.cols());
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    support[c] = matrix.column_support(c);
    if (support[c] >= params.min_support) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return support[a] > support[b]; });

  std::vector<bool> selected(matrix.rows(), false);
  for (const std::size_t c : order) {
    result.test_categories.push_back(matrix.category_ids[c]);
    std::vector<std::size_t> pool;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      if (matrix.positive(r, c) && !selected[r]) pool.push_back(r);
    }
    if (pool.size() < params.per_category) {
      result.warnings.push_back("category '" + matrix.category_ids[c] + "': only " +
                                std::to_string(pool.size()) + " unselected ads available, wanted " +
                                std::to_string(params.per_category));
    }
    const std::size_t take = std::min(pool.size(), params.per_category);
    seeded_partial_shuffle(std::span<std::size_t>(pool), take, rng);
    for (std::size_t i = 0; i < take; ++i) selected[pool[i]] = true;
  }

  std::vector<std::size_t> rest;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (selected[r]) {
      result.split.test.push_back(matrix.ad_ids[r]);
    } else {
      rest.push_back(r);
    }
  }
  seeded_shuffle(std::span<std::size_t>(rest), rng);
  const auto n_validation = static_cast<std::size_t>(
      std::llround(params.validation_fraction * static_cast<double>(rest.size())));
  std::vector<bool> is_validation(matrix.rows(), false);
  for (std::size_t i = 0; i < n_validation && i < rest.size(); ++i) is_validation[rest[i]] = true;
  std::sort(rest.begin(), rest.end());
  for (const std::size_t r : rest) {
    (is_validation[r] ? result.split.validation : result.split.train).push_back(matrix.ad_ids[r]);
  }
  return result;
}

std::string write_split(const SplitResult& result) {
  nlohmann::ordered_json out;
  out["seed"] = result.split.seed;
  out["test_categories"] = result.test_categories;
  out["train"] = result.split.train;
  out["validation"] = result.split.validation;
  out["test"] = result.split.test;
  out["warnings"] = result.warnings;
  return out.dump(2) + "\n";
}

DatasetSplit read_split(std::string_view bytes) {
  try {
    const auto doc = nlohmann::json::parse(bytes);
    DatasetSplit split;
    split.seed = doc.at("seed").get<std::uint64_t>();
    split.train = doc.at("train").get<std::vector<std::string>>();
    split.validation = doc.at("validation").get<std::vector<std::string>>();
    split.test = doc.at("test").get<std::vector<std::string>>();
    return split;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split file: ") + e.what());
  }
}

}  // namespace policyscope::labeling
