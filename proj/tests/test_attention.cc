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

#include <numeric>

#include "doctest.h"
#include "policyscope/attention.h"
#include "policyscope/codebook.h"
#include "policyscope/error.h"
#include "test_util.h"

namespace ps = policyscope;
using namespace policyscope::attention;
using ps::ingest::AdRecord;
using ps::ingest::Gender;

namespace {

AdRecord make_ad(std::string id, std::uint64_t impressions, double female, std::string body = "") {
  AdRecord ad;
  ad.ad_id = std::move(id);
  ad.creative_body = std::move(body);
  ad.impressions = {impressions, impressions};
  ad.demographics = {{Gender::kFemale, 2, female}, {Gender::kMale, 3, 1.0 - female}};
  ad.regions = {{0, female}, {5, 1.0 - female}};
  return ad;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("predictions round trip and validation") {
  const PredictionSet preds{{"a", {"health", "economy"}}, {"b", {}}, {"c", {"environment"}}};
  const auto text = write_predictions(preds);
  CHECK(text.rfind("ad_id,labels\n", 0) == 0);
  CHECK(read_predictions(text) == preds);
  const auto book = ps::codebook::Codebook::bundled();
  CHECK_NOTHROW(validate_predictions(preds, book));
  CHECK_THROWS_AS(validate_predictions({{"a", {"nonsense"}}}, book), ps::ValidationError);
  const auto m = ps::testing::binary_matrix({"a", "b"}, {"x", "y"}, {{1, 1}, {0, 0}});
  CHECK(predictions_from_matrix(m) == PredictionSet{{"a", {"x", "y"}}, {"b", {}}});
}

TEST_CASE("coverage_stats") {
  const PredictionSet preds{{"a", {"x"}}, {"b", {"y"}}, {"c", {"x", "y"}}, {"d", {"x", "y", "z"}}, {"e", {}}};
  const auto s = coverage_stats(preds, {"a", "b", "c", "d", "e"});
  CHECK(s.universe == 5);
  CHECK(s.with_any == 4);
  CHECK(s.with_multiple == 2);
  CHECK(s.median_labels == 1.5);
  CHECK(s.median_defined);
  const auto none = coverage_stats({}, {"a", "b"});
  CHECK(none.with_any == 0);
  CHECK(none.median_labels == 0.0);
  CHECK_FALSE(none.median_defined);
  CHECK(coverage_stats({{"a", {"x"}}, {"b", {"y"}}}, {"a", "b"}).median_labels == 1.0);
  const auto json = nlohmann::json::parse(render_coverage_json(none));
  CHECK(json["median_labels"].is_null());
}

TEST_CASE("candidate_attention examples") {
  const std::vector<ps::ingest::CandidateAliasSet> aliases{{"macron", {"Macron"}}, {"other", {"Nobody"}}};
  const std::vector<std::string> order{"health", "economy"};
  SUBCASE("two ads, 25/75") {
    const std::vector<AdRecord> ads{make_ad("a", 1000, 1, "Macron ici"), make_ad("b", 3000, 1, "Macron la")};
    const auto t = candidate_attention(ads, {{"a", {"health"}}, {"b", {"economy"}}}, aliases, order);
    REQUIRE(t.candidates.size() == 1);
    CHECK(t.candidates[0].shares == std::vector<double>{0.25, 0.75});
    CHECK(t.candidates[0].mentioning_ads == 2);
    CHECK(t.warnings.size() == 1);  // "other" has no mentioning ads
  }
  SUBCASE("one multi-label ad splits 50/50") {
    const std::vector<AdRecord> ads{make_ad("a", 1000, 1, "Macron")};
    const auto t = candidate_attention(ads, {{"a", {"health", "economy"}}}, aliases, order);
    CHECK(t.candidates[0].shares == std::vector<double>{0.5, 0.5});
    CHECK(t.candidates[0].normalizer == 2000.0);
  }
  SUBCASE("single ad single label") {
    const std::vector<AdRecord> ads{make_ad("a", 10, 1, "Macron")};
    const auto t = candidate_attention(ads, {{"a", {"economy"}}}, aliases, order);
    CHECK(t.candidates[0].shares == std::vector<double>{0.0, 1.0});
  }
  CHECK_THROWS_AS(candidate_attention({make_ad("a", 10, 1, "Macron")}, {{"a", {"zzz"}}}, aliases, order),
                  ps::DataError);
}

TEST_CASE("demographic_exposure examples") {
  const std::vector<std::string> order{"health"};
  const auto one = demographic_exposure({make_ad("a", 1000, 1.0)}, {{"a", {"health"}}}, Axis::kGender, order);
  CHECK(one.shares[0] == std::vector<double>{1.0, 0.0});
  const std::vector<AdRecord> ads{make_ad("a", 1000, 1.0), make_ad("b", 1000, 0.5)};
  const PredictionSet preds{{"a", {"health"}}, {"b", {"health"}}};
  const auto t = demographic_exposure(ads, preds, Axis::kGender, order);
  CHECK(t.buckets == std::vector<std::string>{"female", "male"});
  CHECK(t.shares[0][0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(t.shares[0][1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(t.totals[0] == 2000.0);

  const auto b = baseline({ads[0]}, {{"a", {"x"}}}, Axis::kAge);
  CHECK(b.shares == ad_bucket_shares(ads[0], Axis::kAge));
  CHECK_THROWS_AS(baseline(ads, {}, Axis::kGender), ps::DataError);

  const auto missing = demographic_exposure(ads, preds, Axis::kGender, {"health", "economy"});
  CHECK(missing.rows == std::vector<std::string>{"health"});
  CHECK(missing.warnings.size() == 1);
  CHECK(axis_buckets(Axis::kAge).size() == 7);
  CHECK(axis_buckets(Axis::kRegion).size() == 13);
  CHECK(parse_axis("region") == Axis::kRegion);
  CHECK_THROWS_AS(parse_axis("income"), ps::UsageError);
}

TEST_CASE("classify and flag_exposure") {
  CHECK(classify(0.1, 0.1, 0.2) == Flag::kNone);
  CHECK(classify(0.13, 0.1, 0.2) == Flag::kOver);
  CHECK(classify(0.12, 0.1, 0.2) == Flag::kOver);  // boundary counts
  CHECK(classify(0.085, 0.1, 0.2) == Flag::kNone);
  CHECK(classify(0.079, 0.1, 0.2) == Flag::kUnder);
  CHECK(classify(0.08, 0.1, 0.2) == Flag::kUnder);
  CHECK(classify(0.0, 0.0, 0.2) == Flag::kNone);
  ps::Xorshift64Star rng(31);
  // with rho = 10 over-exposure needs share >= 11 * baseline, impossible once baseline > 1/11
  for (int trial = 0; trial < 1000; ++trial) {
    CHECK(classify(rng.unit(), 0.1 + 0.9 * rng.unit(), 10.0) == Flag::kNone);
  }
}

TEST_CASE("exposure fixture matches the hand computation") {
  const auto ads = ps::ingest::parse_ads(ps::testing::fixture("exposure/ads.json")).rows;
  const auto preds = read_predictions(ps::testing::fixture("exposure/predictions.csv"));
  const auto expected = ps::testing::fixture_json("exposure/expected.json");
  const auto order = expected["order"].get<std::vector<std::string>>();
  for (const auto axis : {Axis::kGender, Axis::kAge, Axis::kRegion}) {
    const std::string name(axis_name(axis));
    CAPTURE(name);
    const auto table = demographic_exposure(ads, preds, axis, order);
    REQUIRE(table.rows == order);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto want = expected["tables"][name][order[k]].get<std::vector<double>>();
      REQUIRE(table.shares[k].size() == want.size());
      for (std::size_t j = 0; j < want.size(); ++j) CHECK(std::abs(table.shares[k][j] - want[j]) <= 1e-9);
      CHECK(std::abs(sum(table.shares[k]) - 1.0) <= 1e-6);
    }
    const auto base = baseline(ads, preds, axis);
    const auto want = expected["baselines"][name].get<std::vector<double>>();
    for (std::size_t j = 0; j < want.size(); ++j) CHECK(std::abs(base.shares[j] - want[j]) <= 1e-9);
    CHECK(std::abs(sum(base.shares) - 1.0) <= 1e-6);
    CHECK_FALSE(table.warnings.empty());  // x4 is open-ended

    const auto flags = flag_exposure(table, base);
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (std::size_t j = 0; j < base.shares.size(); ++j) {
        CHECK(flags.flags[k][j] == classify(table.shares[k][j], base.shares[j], kDefaultRho));
      }
    }
    const auto csv = render_exposure_csv(table, base);
    CHECK(csv.find("\nbaseline,") != std::string::npos);
    const auto fcsv = render_flags_csv(table, base, flags);
    CHECK(fcsv.rfind("category,bucket,share,baseline,flag\n", 0) == 0);
    CHECK(std::count(fcsv.begin(), fcsv.end(), '\n') ==
          static_cast<long>(1 + order.size() * base.shares.size()));
    const auto md = render_exposure_markdown(table, base, flags);
    CHECK(md.find("All labeled ads") != std::string::npos);
  }

  const auto aliases = ps::ingest::load_aliases(ps::testing::fixture("exposure/aliases.json"));
  const auto cand = candidate_attention(ads, preds, aliases, order);
  for (const auto& column : cand.candidates) {
    const auto want = expected["candidates"][column.candidate_id].get<std::vector<double>>();
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(column.shares[k] - want[k]) <= 1e-9);
    CHECK(std::abs(sum(column.shares) - 1.0) <= 1e-6);
  }
  CHECK(cand.candidates.size() == expected["candidates"].size());
  CHECK(render_candidate_csv(cand).find("labeled_mentioning_ads") != std::string::npos);

  std::vector<std::string> universe;
  for (const auto& ad : ads) universe.push_back(ad.ad_id);
  const auto cov = coverage_stats(preds, universe);
  CHECK(cov.with_any == expected["coverage"]["with_any"].get<std::size_t>());
  CHECK(cov.with_multiple == expected["coverage"]["with_multiple"].get<std::size_t>());
  CHECK(cov.median_labels == expected["coverage"]["median_labels"].get<double>());
}

TEST_CASE("exposure properties on random corpora") {
  ps::Xorshift64Star rng(808);
  const std::vector<std::string> order{"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AdRecord> ads;
    PredictionSet preds;
    for (int i = 0; i < 8; ++i) {
      auto ad = make_ad("ad" + std::to_string(i), 2 * (1 + rng.next() % 5000), rng.unit());
      ad.demographics.push_back({Gender::kUnknown, 6, 0.0});
      ads.push_back(ad);
      std::set<std::string> labels;
      for (const auto& c : order) {
        if (rng.unit() < 0.5) labels.insert(c);
      }
      preds[ad.ad_id] = labels;
    }
    preds["ad0"] = {"a"};
    for (const auto axis : {Axis::kGender, Axis::kAge, Axis::kRegion}) {
      const auto table = demographic_exposure(ads, preds, axis, order);
      for (const auto& row : table.shares) CHECK(std::abs(sum(row) - 1.0) <= 1e-6);

      // split ad0 in two halves with the same shares
      auto split = ads;
      auto half = split[0];
      half.impressions = {half.impressions.lower / 2, half.impressions.lower / 2};
      split[0] = half;
      half.ad_id = "ad0b";
      split.push_back(half);
      auto split_preds = preds;
      split_preds["ad0b"] = preds["ad0"];
      const auto again = demographic_exposure(split, split_preds, axis, order);
      REQUIRE(again.rows == table.rows);
      for (std::size_t k = 0; k < table.rows.size(); ++k) {
        for (std::size_t j = 0; j < table.buckets.size(); ++j) {
          CHECK(std::abs(again.shares[k][j] - table.shares[k][j]) <= 1e-12);
        }
      }

      // baseline ignores how many labels an ad carries
      auto single = preds;
      for (auto& [id, labels] : single) {
        if (!labels.empty()) labels = {"a"};
      }
      const auto b1 = baseline(ads, preds, axis), b2 = baseline(ads, single, axis);
      CHECK(b1.shares == b2.shares);
      CHECK(std::abs(sum(b1.shares) - 1.0) <= 1e-6);
    }
  }
}
