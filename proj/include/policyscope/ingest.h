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

// Ad Library record ingestion: parsing, language filtering, deduplication,
// range midpoints and candidate mention tagging.

#ifndef POLICYSCOPE_INGEST_H_
#define POLICYSCOPE_INGEST_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/error.h"

namespace policyscope::ingest {

// Platform-reported interval. An absent upper bound is the open-ended top
// bucket ("1000000+").
struct ValueRange {
  std::uint64_t lower = 0;
  std::optional<std::uint64_t> upper;

  bool open_ended() const { return !upper.has_value(); }
  // "1000-4999", "1000000+", "1,000-4,999" or a single value "0".
  static ValueRange parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct PointEstimate {
  double value = 0.0;
  bool open_ended = false;  // value is the lower bound; true mass is higher
};

// (lower + upper) / 2, or the lower bound with the open-ended marker.
PointEstimate midpoint(const ValueRange& range);

enum class Gender { kFemale, kMale, kUnknown };

inline constexpr std::array<std::string_view, 7> kAgeBuckets = {
    "13-17", "18-24", "25-34", "35-44", "45-54", "55-64", "65+"};

// Metropolitan France, in the column order of the regional exposure table.
inline constexpr std::array<std::string_view, 13> kRegions = {
    "Auvergne-Rhône-Alpes", "Bourgogne-Franche-Comté", "Bretagne",
    "Centre-Val de Loire",  "Corse",                   "Grand Est",
    "Hauts-de-France",      "Normandie",               "Nouvelle-Aquitaine",
    "Occitanie",            "Pays de la Loire",        "Provence-Alpes-Côte d'Azur",
    "Île-de-France"};

std::string_view gender_name(Gender gender);
std::optional<Gender> parse_gender(std::string_view text);
// Index into kAgeBuckets; accepts "65" as "65+".
std::optional<std::size_t> age_bucket_index(std::string_view text);
// Index into kRegions. Matching ignores case, diacritics, hyphens and
// spaces, so "Haut De France" and "Hauts-de-France" both resolve.
std::optional<std::size_t> region_index(std::string_view text);

struct DemographicCell {
  Gender gender = Gender::kUnknown;
  std::size_t age_bucket = 0;  // index into kAgeBuckets
  double share = 0.0;
};

struct RegionCell {
  std::size_t region = 0;  // index into kRegions
  double share = 0.0;
};

struct AdRecord {
  std::string ad_id;
  std::string page_id;
  std::string page_name;
  std::int64_t creation_time = 0;  // seconds since epoch, UTC
  std::string creative_body;
  std::optional<std::string> bylines;
  std::vector<std::string> languages;
  ValueRange impressions;
  std::string currency;
  ValueRange spend;
  std::vector<DemographicCell> demographics;
  std::vector<RegionCell> regions;
};

struct DailyReportRow {
  std::string page_id;
  std::string page_name;
  std::uint64_t ads_count = 0;
  ValueRange spend;
};

struct CandidateAliasSet {
  std::string candidate_id;
  std::vector<std::string> aliases;
};

// CSV daily advertiser report. Requires page_id, page_name, ads_count and
// either spend_lower (+ optional spend_upper) or a single range-valued
// spend column. Throws SchemaError on missing columns; bad rows are
// collected.
ParseResult<DailyReportRow> parse_daily_report(std::string_view bytes);

// JSON array or newline-delimited JSON of Ad Library objects. Throws
// DataError on invalid UTF-8 or an unparseable top-level document;
// malformed objects are collected as row errors.
ParseResult<AdRecord> parse_ads(std::string_view bytes);

// Canonical newline-delimited JSON, readable by parse_ads. Output depends
// only on the records, so re-ingesting is byte-stable.
std::string write_ads(const std::vector<AdRecord>& ads);

std::vector<AdRecord> filter_language(const std::vector<AdRecord>& ads,
                                      std::string_view lang);

// One record per ad_id (earliest creation_time wins; ties keep the first
// seen), ordered by (creation_time, ad_id).
std::vector<AdRecord> dedupe(const std::vector<AdRecord>& ads);

struct CorpusTotals {
  double impressions_estimate = 0.0;
  std::map<std::string, double> spend_estimate;  // keyed by currency
  std::size_t ads = 0;
  std::size_t open_ended_impressions = 0;
  std::size_t open_ended_spend = 0;
};

CorpusTotals corpus_totals(const std::vector<AdRecord>& ads);
std::string corpus_totals_json(const CorpusTotals& totals);

// Whole-word, case- and diacritic-insensitive alias search in the body.
bool match_candidate(const AdRecord& ad, const CandidateAliasSet& aliases);
bool mentions(std::string_view text, const CandidateAliasSet& aliases);

// JSON object: candidate_id -> [alias, ...]. Sorted by candidate_id.
std::vector<CandidateAliasSet> load_aliases(std::string_view bytes);

}  // namespace policyscope::ingest

#endif  // POLICYSCOPE_INGEST_H_
