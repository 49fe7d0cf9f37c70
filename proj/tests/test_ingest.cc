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

#include <algorithm>

#include "doctest.h"
#include "policyscope/error.h"
#include "policyscope/ingest.h"
#include "test_util.h"

namespace ps = policyscope;
using namespace policyscope::ingest;

namespace {

std::string ad_json(const std::string& id, const std::string& time, const std::string& body,
                    const std::string& extra = "") {
  return R"({"id":")" + id + R"(","page_id":"p1","page_name":"Page","ad_creation_time":")" + time +
         R"(","ad_creative_body":")" + body +
         R"(","languages":["fr"],"impressions":{"lower_bound":"1000","upper_bound":"4999"},)" +
         R"("spend":{"lower_bound":"100","upper_bound":"199"},"currency":"EUR")" + extra + "}";
}

AdRecord record(const std::string& id, std::int64_t time, std::vector<std::string> langs = {"fr"}) {
  AdRecord ad;
  ad.ad_id = id;
  ad.creation_time = time;
  ad.languages = std::move(langs);
  return ad;
}

}  // namespace

TEST_CASE("ValueRange parses bounded, open-ended and comma forms") {
  CHECK(ValueRange::parse("1000-4999") == ValueRange{1000, 4999});
  CHECK(ValueRange::parse("1000000+") == ValueRange{1000000, std::nullopt});
  CHECK(ValueRange::parse("1,000-4,999") == ValueRange{1000, 4999});
  CHECK(ValueRange::parse("0") == ValueRange{0, 0});
  CHECK(ValueRange::parse("1000000+").open_ended());
  CHECK_THROWS_AS(ValueRange::parse("4999-1000"), ps::DataError);
  CHECK_THROWS_AS(ValueRange::parse("abc"), ps::DataError);
}

TEST_CASE("midpoint averages bounds and marks open-ended ranges") {
  CHECK(midpoint({1000, 4999}).value == 2999.5);
  CHECK_FALSE(midpoint({1000, 4999}).open_ended);
  CHECK(midpoint({0, 0}).value == 0.0);
  const auto open = midpoint({1000000, std::nullopt});
  CHECK(open.value == 1000000.0);
  CHECK(open.open_ended);
}

TEST_CASE("midpoint lies within its bounds and is monotone") {
  ps::Xorshift64Star rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto a = rng.uniform(1000000);
    const auto b = a + rng.uniform(1000000);
    const double m = midpoint({a, b}).value;
    CHECK(m >= static_cast<double>(a));
    CHECK(m <= static_cast<double>(b));
    CHECK(midpoint({a, b + 1}).value >= m);
    if (a < b) CHECK(midpoint({a + 1, b}).value >= m);
  }
}

TEST_CASE("parse_daily_report") {
  SUBCASE("header only gives no rows") {
    const auto r = parse_daily_report("page_id,page_name,ads_count,spend_lower,spend_upper\n");
    CHECK(r.rows.empty());
    CHECK(r.errors.empty());
  }
  SUBCASE("three rows with a range-valued spend column") {
    const auto r = parse_daily_report(
        "page_id,page_name,ads_count,spend\n"
        "a,Alpha,3,100-499\n"
        "b,\"Beta, Inc\",1,100-499\n"
        "c,Gamma,0,100-499\n");
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].spend == ValueRange{100, 499});
    CHECK(r.rows[1].page_name == "Beta, Inc");
    CHECK(r.rows[2].ads_count == 0);
  }
  SUBCASE("a row missing page_id is collected, the rest survive") {
    const auto r = parse_daily_report(
        "page_id,page_name,ads_count,spend_lower,spend_upper\n"
        "a,Alpha,3,100,499\n"
        ",Nobody,1,0,99\n"
        "c,Gamma,x,0,99\n"
        "d,Delta,2,1000,\n");
    CHECK(r.rows.size() == 2);
    REQUIRE(r.errors.size() == 2);
    CHECK(r.errors[0].line == 3);
    CHECK(r.errors[1].line == 4);
    CHECK(r.rows[1].spend.open_ended());
  }
  SUBCASE("missing required columns is a schema error") {
    CHECK_THROWS_AS(parse_daily_report("page_id,ads_count\na,1\n"), ps::SchemaError);
    CHECK_THROWS_AS(parse_daily_report("page_id,page_name,ads_count\na,A,1\n"), ps::SchemaError);
  }
}

TEST_CASE("parse_ads reads ranges, demographics and regions") {
  const auto r = parse_ads(
      "[" +
      ad_json("1", "2022-03-01T10:00:00+0000", "Bonjour",
              R"(,"demographic_distribution":[{"gender":"female","age":"25-34","percentage":"0.6"},)"
              R"({"gender":"unknown","age":"65+","percentage":"0.4"}],)"
              R"("region_distribution":[{"region":"Île-de-France","percentage":"0.7"},)"
              R"({"region":"Haut De France","percentage":"0.2"},{"region":"Guadeloupe","percentage":"0.1"}])") +
      "]");
  REQUIRE(r.errors.empty());
  REQUIRE(r.rows.size() == 1);
  const auto& ad = r.rows[0];
  CHECK(ad.impressions == ValueRange{1000, 4999});
  CHECK(ad.spend == ValueRange{100, 199});
  CHECK(ad.creation_time == 1646128800);
  REQUIRE(ad.demographics.size() == 2);
  CHECK(ad.demographics[0].gender == Gender::kFemale);
  CHECK(ad.demographics[0].age_bucket == 2);
  CHECK(ad.demographics[1].age_bucket == 6);
  REQUIRE(ad.regions.size() == 2);  // overseas region dropped
  CHECK(ad.regions[0].region == 12);
  CHECK(ad.regions[1].region == 6);
}

TEST_CASE("parse_ads edge cases") {
  CHECK(parse_ads("[]").rows.empty());
  CHECK(parse_ads("").rows.empty());

  SUBCASE("open-ended impressions") {
    auto text = ad_json("1", "2022-03-01", "x");
    const std::string bounded = R"("lower_bound":"1000","upper_bound":"4999")";
    text.replace(text.find(bounded), bounded.size(), R"("lower_bound":"1000000")");
    const auto r = parse_ads(text);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].impressions.open_ended());
    CHECK(r.rows[0].impressions.lower == 1000000);
  }
  SUBCASE("NDJSON with a malformed line reports its line") {
    const auto r = parse_ads(ad_json("1", "2022-03-01", "a") + "\n{not json}\n" +
                             ad_json("1", "2022-03-02", "dup") + "\n");
    CHECK(r.rows.size() == 2);  // duplicates kept for dedupe
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 2);
  }
  SUBCASE("shares above one are a row error") {
    const auto r = parse_ads(ad_json(
        "1", "2022-03-01", "a",
        R"(,"demographic_distribution":[{"gender":"male","age":"18-24","percentage":"0.7"},)"
        R"({"gender":"female","age":"18-24","percentage":"0.4"}])"));
    CHECK(r.rows.empty());
    CHECK(r.errors.size() == 1);
  }
  SUBCASE("missing impressions is a row error") {
    const auto r = parse_ads(R"({"id":"1","ad_creation_time":"2022-03-01","ad_creative_body":"x"})");
    CHECK(r.rows.empty());
    CHECK(r.errors.size() == 1);
  }
  SUBCASE("invalid UTF-8 is fatal") {
    CHECK_THROWS_AS(parse_ads(ad_json("1", "2022-03-01", "caf\xe9")), ps::DataError);
  }
}

TEST_CASE("write_ads round-trips through parse_ads byte-stably") {
  const auto first = parse_ads(ps::testing::fixture("e2e/ads.json"));
  REQUIRE(first.errors.empty());
  const auto store = write_ads(dedupe(first.rows));
  const auto again = parse_ads(store);
  REQUIRE(again.errors.empty());
  CHECK(write_ads(again.rows) == store);
}

TEST_CASE("filter_language") {
  const std::vector<AdRecord> ads{record("a", 1, {"fr"}), record("b", 2, {"en"}),
                                  record("c", 3, {"fr", "en"})};
  const auto kept = filter_language(ads, "fr");
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].ad_id == "a");
  CHECK(kept[1].ad_id == "c");
  CHECK(filter_language(ads, "FR").size() == 2);
  CHECK(filter_language({record("x", 1, {"en"})}, "fr").empty());
}

TEST_CASE("dedupe keeps the earliest record and sorts") {
  SUBCASE("two records with the same id") {
    auto late = record("a", 20);
    late.page_name = "late";
    auto early = record("a", 10);
    early.page_name = "early";
    const auto out = dedupe({late, early});
    REQUIRE(out.size() == 1);
    CHECK(out[0].page_name == "early");
  }
  SUBCASE("five distinct records come back sorted") {
    const auto out = dedupe({record("e", 5), record("c", 3), record("a", 3), record("d", 4),
                             record("b", 1)});
    REQUIRE(out.size() == 5);
    std::vector<std::string> ids;
    for (const auto& ad : out) ids.push_back(ad.ad_id);
    CHECK(ids == std::vector<std::string>{"b", "a", "c", "d", "e"});
  }
  SUBCASE("ten records with three duplicate ids leave seven") {
    std::vector<AdRecord> ads;
    for (int i = 0; i < 7; ++i) ads.push_back(record("id" + std::to_string(i), i));
    ads.push_back(record("id1", 100));
    ads.push_back(record("id3", 100));
    ads.push_back(record("id5", 100));
    CHECK(dedupe(ads).size() == 7);
  }
}

TEST_CASE("dedupe is idempotent on random inputs") {
  ps::Xorshift64Star rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AdRecord> ads;
    const auto n = rng.uniform(30);
    for (std::uint64_t i = 0; i < n; ++i) {
      ads.push_back(record("id" + std::to_string(rng.uniform(10)),
                           static_cast<std::int64_t>(rng.uniform(5))));
    }
    const auto once = dedupe(ads);
    const auto twice = dedupe(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(once[i].ad_id == twice[i].ad_id);
      CHECK(once[i].creation_time == twice[i].creation_time);
    }
  }
}

TEST_CASE("corpus_totals") {
  CHECK(corpus_totals({}).impressions_estimate == 0.0);
  CHECK(corpus_totals({}).spend_estimate.empty());

  std::vector<AdRecord> ads(3);
  ads[0].impressions = {0, 999};
  ads[1].impressions = {1000, 4999};
  ads[2].impressions = {5000, 9999};
  for (auto& ad : ads) ad.currency = "EUR";
  ads[0].spend = {0, 99};
  ads[1].spend = {100, 199};
  ads[2].spend = {1000, std::nullopt};
  const auto t = corpus_totals(ads);
  CHECK(t.impressions_estimate == 10998.5);
  CHECK(t.spend_estimate.at("EUR") == 49.5 + 149.5 + 1000.0);
  CHECK(t.open_ended_spend == 1);

  SUBCASE("totals of disjoint parts add up") {
    std::vector<AdRecord> left(ads.begin(), ads.begin() + 1);
    std::vector<AdRecord> right(ads.begin() + 1, ads.end());
    CHECK(corpus_totals(left).impressions_estimate + corpus_totals(right).impressions_estimate ==
          t.impressions_estimate);
  }
}

TEST_CASE("match_candidate") {
  const CandidateAliasSet macron{"macron", {"Macron", "Emmanuel Macron"}};
  const CandidateAliasSet melenchon{"melenchon", {"Melenchon"}};
  AdRecord ad;
  ad.creative_body = "Soutenez Macron !";
  CHECK(match_candidate(ad, macron));
  ad.creative_body = "macaron recipe";
  CHECK_FALSE(match_candidate(ad, macron));
  ad.creative_body = "macronie";
  CHECK_FALSE(match_candidate(ad, macron));
  ad.creative_body = "MÉLENCHON 2022";
  CHECK(match_candidate(ad, melenchon));
  CHECK(mentions("l'avenir avec Mélenchon.", melenchon));
}

TEST_CASE("match_candidate ignores case and diacritic changes of the body") {
  const CandidateAliasSet alias{"x", {"Eric Zemmour"}};
  const std::vector<std::string> variants{"vote éric zemmour", "VOTE ERIC ZEMMOUR",
                                          "Vote Éric Zemmour", "vote ÉRIC zemmour"};
  for (const auto& v : variants) CHECK(mentions(v, alias));
  CHECK_FALSE(mentions("vote ericzemmour", alias));
}

TEST_CASE("load_aliases validates and sorts") {
  const auto sets = load_aliases(R"({"b":["Bee"],"a":["Ay","A"]})");
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].candidate_id == "a");
  CHECK_THROWS_AS(load_aliases(R"({"a":[]})"), ps::ValidationError);
  CHECK_THROWS_AS(load_aliases(R"({"a":["  "]})"), ps::ValidationError);
}

TEST_CASE("region and age lookups") {
  CHECK(region_index("Hauts-de-France") == 6u);
  CHECK(region_index("haut de france") == 6u);
  CHECK(region_index("Provence-Alpes-Cote d'Azur") == 11u);
  CHECK_FALSE(region_index("Martinique").has_value());
  CHECK(age_bucket_index("65") == 6u);
  CHECK(age_bucket_index("13-17") == 0u);
  CHECK_FALSE(age_bucket_index("12-13").has_value());
}
