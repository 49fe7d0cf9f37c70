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

#include "policyscope/ingest.h"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "json.hpp"
#include "policyscope/csv.h"
#include "policyscope/format.h"
#include "policyscope/unicode.h"

namespace policyscope::ingest {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kShareSlack = 1e-6;

std::string strip_thousands(std::string_view text) {
  std::string out;
  for (const char c : text) {
    if (c != ',' && c != ' ' && c != '_') out.push_back(c);
  }
  return out;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

// Region names compare on their folded letters only.
std::string region_key(std::string_view text) {
  const std::u32string folded = unicode::decode(unicode::fold(text));
  std::u32string letters;
  for (const char32_t cp : folded) {
    if (unicode::is_letter(cp)) letters.push_back(cp);
  }
  return unicode::encode(letters);
}

std::uint64_t bound_value(const json& value, std::string_view what) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v < 0) throw DataError(std::string(what) + " is negative");
    return static_cast<std::uint64_t>(v);
  }
  if (value.is_string()) {
    return parse_uint(strip_thousands(value.get<std::string>()));
  }
  throw DataError(std::string(what) + " must be a number or numeric string");
}

ValueRange parse_range_field(const json& value, std::string_view what) {
  if (value.is_object()) {
    ValueRange range;
    if (!value.contains("lower_bound")) {
      throw DataError(std::string(what) + " lacks lower_bound");
    }
    range.lower = bound_value(value.at("lower_bound"), what);
    if (value.contains("upper_bound") && !value.at("upper_bound").is_null()) {
      range.upper = bound_value(value.at("upper_bound"), what);
    }
    if (range.upper && *range.upper < range.lower) {
      throw DataError(std::string(what) + " has upper_bound < lower_bound");
    }
    return range;
  }
  if (value.is_string()) return ValueRange::parse(value.get<std::string>());
  if (value.is_number()) {
    const auto v = bound_value(value, what);
    return ValueRange{v, v};
  }
  throw DataError(std::string(what) + " must be an object or range string");
}

double share_value(const json& value) {
  double share = 0.0;
  if (value.is_number()) {
    share = value.get<double>();
  } else if (value.is_string()) {
    share = parse_double(value.get<std::string>());
  } else {
    throw DataError("percentage must be a decimal string");
  }
  if (!(share >= 0.0 && share <= 1.0)) {
    throw DataError("percentage " + format_double(share) + " outside [0,1]");
  }
  return share;
}

std::string text_field(const json& obj, const char* key, bool required) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    if (required) throw DataError(std::string("missing field '") + key + "'");
    return {};
  }
  const json& v = obj.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw DataError(std::string("field '") + key + "' must be a string");
}

AdRecord ad_from_json(const json& obj) {
  if (!obj.is_object()) throw DataError("ad entry is not a JSON object");
  AdRecord ad;
  ad.ad_id = text_field(obj, "id", true);
  if (ad.ad_id.empty()) throw DataError("empty ad id");
  ad.page_id = text_field(obj, "page_id", false);
  ad.page_name = text_field(obj, "page_name", false);
  ad.creation_time = parse_timestamp(text_field(obj, "ad_creation_time", true));

  if (obj.contains("ad_creative_body") && !obj.at("ad_creative_body").is_null()) {
    ad.creative_body = text_field(obj, "ad_creative_body", true);
  } else if (obj.contains("ad_creative_bodies") &&
             obj.at("ad_creative_bodies").is_array()) {
    // Ad Library API variant: one entry per creative.
    for (const auto& body : obj.at("ad_creative_bodies")) {
      if (!ad.creative_body.empty()) ad.creative_body += "\n";
      ad.creative_body += body.get<std::string>();
    }
  } else {
    throw DataError("missing field 'ad_creative_body'");
  }

  if (obj.contains("bylines") && !obj.at("bylines").is_null()) {
    ad.bylines = text_field(obj, "bylines", false);
  }
  if (obj.contains("languages") && !obj.at("languages").is_null()) {
    for (const auto& lang : obj.at("languages")) {
      ad.languages.push_back(ascii_lower(lang.get<std::string>()));
    }
  }
  for (const char* key : {"impressions", "spend"}) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
      throw DataError(std::string("missing field '") + key + "'");
    }
  }
  ad.impressions = parse_range_field(obj.at("impressions"), "impressions");
  ad.spend = parse_range_field(obj.at("spend"), "spend");
  ad.currency = text_field(obj, "currency", false);
  std::transform(ad.currency.begin(), ad.currency.end(), ad.currency.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });

  double demographic_total = 0.0;
  if (obj.contains("demographic_distribution") &&
      !obj.at("demographic_distribution").is_null()) {
    for (const auto& cell : obj.at("demographic_distribution")) {
      const auto gender = parse_gender(text_field(cell, "gender", true));
      if (!gender) throw DataError("unknown gender '" + cell.at("gender").dump() + "'");
      const auto age = age_bucket_index(text_field(cell, "age", true));
      if (!age) throw DataError("unknown age bucket " + cell.at("age").dump());
      if (!cell.contains("percentage")) throw DataError("demographic cell lacks percentage");
      DemographicCell parsed{*gender, *age, share_value(cell.at("percentage"))};
      demographic_total += parsed.share;
      ad.demographics.push_back(parsed);
    }
  }
  if (demographic_total > 1.0 + kShareSlack) {
    throw DataError("demographic shares sum to " + format_double(demographic_total));
  }

  double region_total = 0.0;
  if (obj.contains("region_distribution") && !obj.at("region_distribution").is_null()) {
    for (const auto& cell : obj.at("region_distribution")) {
      if (!cell.contains("percentage")) throw DataError("region cell lacks percentage");
      const double share = share_value(cell.at("percentage"));
      region_total += share;
      // Overseas departments and "Unknown" fall outside the 13-region
      // scheme; their mass is dropped, not renormalized here.
      const auto region = region_index(text_field(cell, "region", true));
      if (region) ad.regions.push_back(RegionCell{*region, share});
    }
  }
  if (region_total > 1.0 + kShareSlack) {
    throw DataError("region shares sum to " + format_double(region_total));
  }
  return ad;
}

}  // namespace

ValueRange ValueRange::parse(std::string_view raw) {
  const std::string text = strip_thousands(trim(raw));
  if (text.empty()) throw DataError("empty range");
  if (text.back() == '+') {
    return ValueRange{parse_uint(std::string_view(text).substr(0, text.size() - 1)),
                      std::nullopt};
  }
  const auto dash = text.find('-', 1);
  if (dash == std::string::npos) {
    const auto v = parse_uint(text);
    return ValueRange{v, v};
  }
  ValueRange range{parse_uint(std::string_view(text).substr(0, dash)),
                   parse_uint(std::string_view(text).substr(dash + 1))};
  if (*range.upper < range.lower) {
    throw DataError("range '" + text + "' has upper < lower");
  }
  return range;
}

std::string ValueRange::to_string() const {
  if (!upper) return std::to_string(lower) + "+";
  return std::to_string(lower) + "-" + std::to_string(*upper);
}

PointEstimate midpoint(const ValueRange& range) {
  if (!range.upper) return {static_cast<double>(range.lower), true};
  return {(static_cast<double>(range.lower) + static_cast<double>(*range.upper)) / 2.0,
          false};
}

std::string_view gender_name(Gender gender) {
  switch (gender) {
    case Gender::kFemale:
      return "female";
    case Gender::kMale:
      return "male";
    case Gender::kUnknown:
      break;
  }
  return "unknown";
}

std::optional<Gender> parse_gender(std::string_view text) {
  const std::string g = ascii_lower(trim(text));
  if (g == "female") return Gender::kFemale;
  if (g == "male") return Gender::kMale;
  if (g == "unknown") return Gender::kUnknown;
  return std::nullopt;
}

std::optional<std::size_t> age_bucket_index(std::string_view text) {
  text = trim(text);
  if (text == "65") text = "65+";
  for (std::size_t i = 0; i < kAgeBuckets.size(); ++i) {
    if (kAgeBuckets[i] == text) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> region_index(std::string_view text) {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto name : kRegions) k.push_back(region_key(name));
    return k;
  }();
  const std::string key = region_key(text);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return i;
  }
  // common spelling variants in published tables
  if (key == "hautdefrance") return 6;
  if (key == "bourgognefranchecomte") return 1;
  return std::nullopt;
}

ParseResult<DailyReportRow> parse_daily_report(std::string_view bytes) {
  if (!unicode::is_valid_utf8(bytes)) throw DataError("daily report is not valid UTF-8");
  const auto records = csv::parse(bytes);
  if (records.empty()) throw SchemaError("daily report has no header row");
  const csv::Header header(records.front());
  header.require({"page_id", "page_name", "ads_count"});
  const auto spend_col = header.find("spend");
  const auto lower_col = header.find("spend_lower");
  const auto upper_col = header.find("spend_upper");
  if (!spend_col && !lower_col) {
    throw SchemaError("missing required column(s): spend_lower (or spend)");
  }
  const std::size_t page_id = header.at("page_id");
  const std::size_t page_name = header.at("page_name");
  const std::size_t ads_count = header.at("ads_count");

  ParseResult<DailyReportRow> result;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const auto field = [&](std::size_t col) -> std::string_view {
      return col < rec.fields.size() ? std::string_view(rec.fields[col]) : std::string_view();
    };
    try {
      if (rec.fields.size() != header.names().size()) {
        throw DataError("expected " + std::to_string(header.names().size()) +
                        " fields, found " + std::to_string(rec.fields.size()));
      }
      DailyReportRow row;
      row.page_id = std::string(trim(field(page_id)));
      if (row.page_id.empty()) throw DataError("missing page_id");
      row.page_name = std::string(field(page_name));
      row.ads_count = parse_uint(strip_thousands(field(ads_count)));
      if (lower_col) {
        row.spend.lower = parse_uint(strip_thousands(field(*lower_col)));
        const std::string upper =
            upper_col ? strip_thousands(trim(field(*upper_col))) : std::string();
        if (!upper.empty()) {
          row.spend.upper = parse_uint(upper);
          if (*row.spend.upper < row.spend.lower) throw DataError("spend_upper < spend_lower");
        }
      } else {
        row.spend = ValueRange::parse(field(*spend_col));
      }
      result.rows.push_back(std::move(row));
    } catch (const DataError& e) {
      result.errors.push_back(RowError{rec.line, e.what()});
    }
  }
  return result;
}

ParseResult<AdRecord> parse_ads(std::string_view bytes) {
  if (!unicode::is_valid_utf8(bytes)) throw DataError("ad file is not valid UTF-8");
  ParseResult<AdRecord> result;
  const std::string_view body = trim(bytes);
  if (body.empty()) return result;

  if (body.front() == '[') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::exception& e) {
      throw DataError(std::string("ad file is not valid JSON: ") + e.what());
    }
    for (std::size_t i = 0; i < doc.size(); ++i) {
      try {
        result.rows.push_back(ad_from_json(doc[i]));
      } catch (const std::exception& e) {
        // array input reports the 1-based element index
        result.errors.push_back(RowError{i + 1, e.what()});
      }
    }
    return result;
  }

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= bytes.size()) {
    const auto end = bytes.find('\n', start);
    const auto line = bytes.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                        : end - start);
    ++line_no;
    if (!trim(line).empty()) {
      try {
        result.rows.push_back(ad_from_json(json::parse(line)));
      } catch (const std::exception& e) {
        result.errors.push_back(RowError{line_no, e.what()});
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return result;
}

namespace {

ordered_json range_json(const ValueRange& range) {
  ordered_json out;
  out["lower_bound"] = std::to_string(range.lower);
  if (range.upper) out["upper_bound"] = std::to_string(*range.upper);
  return out;
}

}  // namespace

std::string write_ads(const std::vector<AdRecord>& ads) {
  std::string out;
  for (const auto& ad : ads) {
    ordered_json obj;
    obj["id"] = ad.ad_id;
    obj["page_id"] = ad.page_id;
    obj["page_name"] = ad.page_name;
    obj["ad_creation_time"] = format_timestamp(ad.creation_time);
    obj["ad_creative_body"] = ad.creative_body;
    if (ad.bylines) obj["bylines"] = *ad.bylines;
    obj["languages"] = ad.languages;
    obj["impressions"] = range_json(ad.impressions);
    obj["currency"] = ad.currency;
    obj["spend"] = range_json(ad.spend);
    ordered_json demographics = ordered_json::array();
    for (const auto& cell : ad.demographics) {
      demographics.push_back({{"gender", gender_name(cell.gender)},
                              {"age", kAgeBuckets[cell.age_bucket]},
                              {"percentage", format_double(cell.share)}});
    }
    obj["demographic_distribution"] = std::move(demographics);
    ordered_json regions = ordered_json::array();
    for (const auto& cell : ad.regions) {
      regions.push_back({{"region", kRegions[cell.region]},
                         {"percentage", format_double(cell.share)}});
    }
    obj["region_distribution"] = std::move(regions);
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<AdRecord> filter_language(const std::vector<AdRecord>& ads,
                                      std::string_view lang) {
  const std::string wanted = ascii_lower(trim(lang));
  std::vector<AdRecord> kept;
  for (const auto& ad : ads) {
    const bool has = std::any_of(ad.languages.begin(), ad.languages.end(),
                                 [&](const std::string& l) { return ascii_lower(l) == wanted; });
    if (has) kept.push_back(ad);
  }
  return kept;
}

std::vector<AdRecord> dedupe(const std::vector<AdRecord>& ads) {
  std::unordered_map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    const auto [it, inserted] = best.try_emplace(ads[i].ad_id, i);
    if (!inserted && ads[i].creation_time < ads[it->second].creation_time) {
      it->second = i;
    }
  }
  std::vector<AdRecord> out;
  out.reserve(best.size());
  for (const auto& [id, index] : best) out.push_back(ads[index]);
  std::sort(out.begin(), out.end(), [](const AdRecord& a, const AdRecord& b) {
    if (a.creation_time != b.creation_time) return a.creation_time < b.creation_time;
    return a.ad_id < b.ad_id;
  });
  return out;
}

CorpusTotals corpus_totals(const std::vector<AdRecord>& ads) {
  CorpusTotals totals;
  totals.ads = ads.size();
  for (const auto& ad : ads) {
    const auto impressions = midpoint(ad.impressions);
    totals.impressions_estimate += impressions.value;
    if (impressions.open_ended) ++totals.open_ended_impressions;
    const auto spend = midpoint(ad.spend);
    totals.spend_estimate[ad.currency] += spend.value;
    if (spend.open_ended) ++totals.open_ended_spend;
  }
  return totals;
}

std::string corpus_totals_json(const CorpusTotals& totals) {
  ordered_json out;
  out["ads"] = totals.ads;
  out["impressions_estimate"] = totals.impressions_estimate;
  out["open_ended_impressions"] = totals.open_ended_impressions;
  ordered_json spend = ordered_json::object();
  for (const auto& [currency, value] : totals.spend_estimate) spend[currency] = value;
  out["spend_estimate"] = std::move(spend);
  out["open_ended_spend"] = totals.open_ended_spend;
  return out.dump(2) + "\n";
}

bool mentions(std::string_view text, const CandidateAliasSet& aliases) {
  const std::u32string body = unicode::decode(unicode::fold(text));
  for (const auto& alias : aliases.aliases) {
    const std::u32string needle = unicode::decode(unicode::fold(trim(alias)));
    if (needle.empty()) continue;
    for (auto pos = body.find(needle); pos != std::u32string::npos;
         pos = body.find(needle, pos + 1)) {
      const bool left_ok = pos == 0 || !unicode::is_word_char(body[pos - 1]);
      const std::size_t after = pos + needle.size();
      const bool right_ok = after == body.size() || !unicode::is_word_char(body[after]);
      if (left_ok && right_ok) return true;
    }
  }
  return false;
}

bool match_candidate(const AdRecord& ad, const CandidateAliasSet& aliases) {
  return mentions(ad.creative_body, aliases);
}

std::vector<CandidateAliasSet> load_aliases(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw DataError(std::string("alias file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("alias file must be a JSON object");
  std::vector<CandidateAliasSet> out;
  for (const auto& [candidate, list] : doc.items()) {
    CandidateAliasSet set{candidate, {}};
    if (!list.is_array() || list.empty()) {
      throw ValidationError("candidate '" + candidate + "' has no aliases");
    }
    for (const auto& alias : list) {
      if (!alias.is_string() || trim(alias.get<std::string>()).empty()) {
        throw ValidationError("candidate '" + candidate + "' has a blank alias");
      }
      set.aliases.push_back(alias.get<std::string>());
    }
    out.push_back(std::move(set));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.candidate_id < b.candidate_id;
  });
  return out;
}

}  // namespace policyscope::ingest
