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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "json.hpp"
#include "policyscope/error.h"
#include "policyscope/model.h"
#include "test_util.h"

namespace ps = policyscope;
using namespace policyscope::model;
using ps::FeatureSource;
using ps::FeatureVector;

namespace {

LinearHead random_head(ps::Xorshift64Star& rng, std::size_t labels, std::size_t dim) {
  auto head = LinearHead::zeros(ps::testing::numbered("c", labels), dim, FeatureSource::kEmbedding);
  for (auto& w : head.weights) w = 2.0 * rng.unit() - 1.0;
  for (auto& b : head.biases) b = 2.0 * rng.unit() - 1.0;
  return head;
}

FeatureVector random_dense(ps::Xorshift64Star& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = 2.0 * rng.unit() - 1.0;
  return FeatureVector::make_dense(std::move(v), FeatureSource::kEmbedding);
}

// Per-category brute force over the grid: returns (threshold, precision, recall).
std::vector<std::array<double, 3>> calibration_oracle(const std::vector<std::vector<double>>& probs,
                                                      const ps::LabelMatrix& gold, double target,
                                                      std::size_t steps) {
  std::vector<std::array<double, 3>> out;
  for (std::size_t l = 0; l < gold.cols(); ++l) {
    std::vector<std::array<double, 3>> sweep;
    for (std::size_t k = 1; k < steps; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(steps);
      double tp = 0, fp = 0, pos = 0;
      for (std::size_t r = 0; r < gold.rows(); ++r) {
        const bool y = gold.at(r, l) > 0;
        pos += y;
        if (probs[r][l] > t) (y ? tp : fp) += 1;
      }
      sweep.push_back({t, tp + fp > 0 ? tp / (tp + fp) : 0.0, tp / pos});
    }
    // lexicographic preference; strict comparisons keep the earliest (lowest) threshold
    auto key_hit = [](const auto& s) { return std::pair{s[2], s[1]}; };
    auto key_miss = [](const auto& s) { return std::pair{s[1], s[2]}; };
    const std::array<double, 3>* best = nullptr;
    for (const auto& s : sweep) {
      if (s[1] >= target && (!best || key_hit(s) > key_hit(*best))) best = &s;
    }
    if (!best) {
      for (const auto& s : sweep) {
        if (!best || key_miss(s) > key_miss(*best)) best = &s;
      }
    }
    out.push_back(*best);
  }
  return out;
}

}  // namespace

TEST_CASE("forward") {
  auto head = LinearHead::zeros({"a", "b", "c"}, 4, FeatureSource::kEmbedding);
  const auto x = FeatureVector::make_dense({1, -2, 3, 0.5}, FeatureSource::kEmbedding);
  CHECK(forward(head, x) == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(forward(head, x.scaled(0.0)) == forward(head, x));
  head.biases = {std::log(3.0), 0.0, -std::log(3.0)};
  const auto p = forward(head, x);
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(forward(head, FeatureVector::make_dense({1, 2}, FeatureSource::kEmbedding)),
                  ps::DataError);
  // extreme logits stay strictly inside (0, 1)
  CHECK(sigmoid(1e6) < 1.0);
  CHECK(sigmoid(-1e6) > 0.0);
}

TEST_CASE("bce_loss") {
  const std::vector<double> half{0.5, 0.5, 0.5};
  CHECK(bce_loss(std::vector<double>{0.5}, std::vector<double>{0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_loss(half, std::vector<double>{0.0, 1.0, 0.3}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_loss(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}) < 1e-11);
  CHECK(std::isfinite(bce_loss(std::vector<double>{0.0}, std::vector<double>{1.0})));
  CHECK_THROWS_AS(bce_loss(half, std::vector<double>{0.0, 1.2, 0.0}), ps::DataError);
  CHECK_THROWS_AS(bce_loss(half, std::vector<double>{0.0, 1.0}), ps::DataError);
}

TEST_CASE("bce_loss is non-negative and stationary at p = y") {
  ps::Xorshift64Star rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double y = 0.01 + 0.98 * rng.unit();
    const double p = 0.01 + 0.98 * rng.unit();
    CHECK(bce_loss(std::vector<double>{p}, std::vector<double>{y}) >= 0.0);
    const double h = 1e-6;
    const double slope = (bce_loss(std::vector<double>{y + h}, std::vector<double>{y}) -
                          bce_loss(std::vector<double>{y - h}, std::vector<double>{y})) /
                         (2 * h);
    CHECK(std::abs(slope) < 1e-6);
  }
}

TEST_CASE("gradient examples") {
  auto head = LinearHead::zeros({"a"}, 3, FeatureSource::kEmbedding);
  const std::vector<FeatureVector> xs{FeatureVector::make_dense({0, 1, 0}, FeatureSource::kEmbedding)};
  const std::vector<std::vector<double>> ys{{1.0}};
  const auto g = gradient(head, xs, ys);
  CHECK(g.weights == std::vector<double>{0.0, -0.5, 0.0});
  CHECK(g.biases == std::vector<double>{-0.5});
  const auto at_target = gradient(head, xs, std::vector<std::vector<double>>{{0.5}});
  CHECK(at_target.weights == std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(gradient(head, std::span<const FeatureVector>{}, std::span<const std::vector<double>>{}),
                  ps::DataError);
}

TEST_CASE("analytic gradient matches central finite differences") {
  ps::Xorshift64Star rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t labels = 1 + rng.next() % 4, dim = 1 + rng.next() % 6, batch = 1 + rng.next() % 5;
    auto head = random_head(rng, labels, dim);
    std::vector<FeatureVector> xs;
    std::vector<std::vector<double>> ys;
    for (std::size_t b = 0; b < batch; ++b) {
      xs.push_back(random_dense(rng, dim));
      std::vector<double> y(labels);
      for (auto& v : y) v = std::vector<double>{0.0, 0.3, 0.6, 1.0}[rng.next() % 4];
      ys.push_back(y);
    }
    const auto g = gradient(head, xs, ys);
    const double h = 1e-5;
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = batch_loss(head, xs, ys);
      param = saved - h;
      const double down = batch_loss(head, xs, ys);
      param = saved;
      const double numeric = (up - down) / (2 * h);
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, rel);
    };
    for (std::size_t k = 0; k < head.weights.size(); ++k) check(head.weights[k], g.weights[k]);
    for (std::size_t k = 0; k < head.biases.size(); ++k) check(head.biases[k], g.biases[k]);
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("train") {
  ps::Xorshift64Star rng(3);
  const std::size_t n = 80, dim = 5;
  std::vector<FeatureVector> xs;
  ps::LabelMatrix labels(ps::testing::numbered("ad", n), {"pos", "neg"}, ps::LabelMode::kBinary);
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(random_dense(rng, dim));
    labels.at(i, 0) = xs.back().values[0] > 0 ? 1 : 0;
    labels.at(i, 1) = xs.back().values[1] < 0 ? 1 : 0;
  }
  TrainConfig config;
  config.epochs = 20;
  config.initial_learning_rate = 1.0;
  config.seed = 17;
  const auto a = train(xs, labels, config);
  CHECK(a.epoch_loss.size() == 20);
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());
  CHECK(a.head.category_ids == labels.category_ids);
  const auto b = train(xs, labels, config);
  CHECK(a.head == b.head);
  CHECK(a.epoch_loss == b.epoch_loss);
  config.seed = 18;
  CHECK_FALSE(train(xs, labels, config).head == a.head);

  SUBCASE("soft targets") {
    auto soft = labels;
    soft.mode = ps::LabelMode::kSoft;
    for (auto& e : soft.entries) e = e > 0 ? 0.6 : 0.3;
    const auto s = train(xs, soft, config);
    CHECK(s.epoch_loss.back() < s.epoch_loss.front());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(train({}, ps::LabelMatrix({}, {"pos"}, ps::LabelMode::kBinary), config),
                    ps::DataError);
    CHECK_THROWS_AS(train(std::span<const FeatureVector>(xs).first(3), labels, config), ps::DataError);
    auto bad = config;
    bad.epochs = 0;
    CHECK_THROWS_AS(train(xs, labels, bad), ps::DataError);
    bad = config;
    bad.initial_learning_rate = 1e308;
    auto huge = xs;
    for (auto& x : huge) x = x.scaled(1e300);
    CHECK_THROWS_AS(train(huge, labels, bad), ps::DataError);
  }
  CHECK(TrainConfig::defaults_for(FeatureSource::kEmbedding).initial_learning_rate == 2e-5);
  CHECK(TrainConfig::defaults_for(FeatureSource::kTfidf).initial_learning_rate == 0.5);
  CHECK(TrainConfig::defaults_for(FeatureSource::kTfidf).epochs == 4);
  CHECK(TrainConfig::defaults_for(FeatureSource::kTfidf).batch_size == 8);
}

TEST_CASE("predict") {
  const auto head = LinearHead::zeros({"a", "b"}, 2, FeatureSource::kEmbedding);
  const auto x = FeatureVector::make_dense({1, 1}, FeatureSource::kEmbedding);
  CHECK(predict(head, x, ThresholdVector::uniform(2)).labels.empty());
  CHECK(predict(head, x, ThresholdVector::uniform(2, 0.49)).labels == std::vector<std::string>{"a", "b"});
  CHECK(predict(head, x, ThresholdVector{{0.4, 0.6}}).labels == std::vector<std::string>{"a"});

  ps::Xorshift64Star rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = random_head(rng, 4, 3);
    const auto v = random_dense(rng, 3);
    std::vector<double> t(4);
    for (auto& e : t) e = rng.unit();
    const auto pred = predict(h, v, ThresholdVector{t});
    std::vector<std::string> expected;
    for (std::size_t l = 0; l < 4; ++l) {
      if (pred.probabilities[l] > t[l]) expected.push_back(h.category_ids[l]);
    }
    CHECK(pred.labels == expected);
    CHECK(predict(h, v, ThresholdVector::uniform(4, 1.0)).labels.empty());
    // lowering one threshold never removes that label
    auto lower = t;
    lower[0] *= rng.unit();
    const auto relaxed = predict(h, v, ThresholdVector{lower}).labels;
    if (!pred.labels.empty() && pred.labels[0] == "c0") {
      CHECK((!relaxed.empty() && relaxed[0] == "c0"));
    }
  }
}

TEST_CASE("threshold_grid") {
  const auto grid = threshold_grid(0.01);
  REQUIRE(grid.size() == 99);
  CHECK(grid.front() == 0.01);
  CHECK(grid[49] == 0.5);
  CHECK(grid.back() == 0.99);
  CHECK(threshold_grid(0.25) == std::vector<double>{0.25, 0.5, 0.75});
  CHECK_THROWS_AS(threshold_grid(0.0), ps::DataError);
  CHECK_THROWS_AS(threshold_grid(1.0), ps::DataError);
}

TEST_CASE("calibration examples") {
  const auto gold = ps::testing::binary_matrix(ps::testing::numbered("ad", 4), {"a", "empty"},
                                               {{1, 0}, {1, 0}, {0, 0}, {0, 0}});
  const std::vector<std::vector<double>> probs{{0.9, 0.1}, {0.8, 0.2}, {0.3, 0.3}, {0.1, 0.9}};
  const auto r = calibrate_from_probabilities(probs, gold);
  CHECK(r.thresholds.values[0] == 0.3);  // lowest t with precision and recall both 1
  CHECK(r.categories[0].precision == 1.0);
  CHECK(r.categories[0].recall == 1.0);
  CHECK(r.categories[0].met_target);
  CHECK(r.thresholds.values[1] == 0.5);
  CHECK(r.categories[1].no_positives);
  CHECK(r.warnings.size() == 1);

  SUBCASE("target 0 maximizes recall") {
    CalibrationConfig zero{0.0, 0.01};
    // positives score above every negative: max recall already at the minimum, with no precision gain
    const auto g = ps::testing::binary_matrix({"p", "q", "r"}, {"a"}, {{1}, {1}, {0}});
    const auto z = calibrate_from_probabilities({{0.9}, {0.5}, {0.95}}, g, zero);
    CHECK(z.thresholds.values[0] == 0.01);
    ps::Xorshift64Star rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      auto m = ps::testing::random_binary(rng, 12, 3, 0.5);
      std::vector<std::vector<double>> p(12, std::vector<double>(3));
      for (auto& row : p) for (auto& e : row) e = rng.unit();
      const auto res = calibrate_from_probabilities(p, m, zero);
      for (std::size_t l = 0; l < 3; ++l) {
        if (m.column_support(l) == 0) continue;
        double tp = 0;
        for (std::size_t i = 0; i < 12; ++i) tp += (m.at(i, l) > 0 && p[i][l] > 0.01);
        CHECK(res.categories[l].recall == tp / static_cast<double>(m.column_support(l)));
      }
    }
  }
}

TEST_CASE("calibration equals the brute-force oracle") {
  ps::Xorshift64Star rng(4242);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 10, cols = 3;
    auto gold = ps::testing::random_binary(rng, rows, cols, 0.4);
    for (std::size_t l = 0; l < cols; ++l) gold.at(l, l) = 1;  // every category has a positive
    std::vector<std::vector<double>> probs(rows, std::vector<double>(cols));
    for (auto& row : probs) for (auto& e : row) e = std::round(rng.unit() * 1000.0) / 1000.0;
    const double target = std::vector<double>{0.0, 0.5, 0.85, 1.0}[trial % 4];
    const auto got = calibrate_from_probabilities(probs, gold, {target, 0.01});
    const auto want = calibration_oracle(probs, gold, target, 100);
    for (std::size_t l = 0; l < cols; ++l) {
      CHECK(got.thresholds.values[l] == doctest::Approx(want[l][0]).epsilon(1e-12));
      CHECK(got.categories[l].precision == want[l][1]);
      CHECK(got.categories[l].recall == want[l][2]);
      bool any_hit = false;
      for (std::size_t k = 1; k < 100; ++k) {
        double tp = 0, fp = 0;
        for (std::size_t r = 0; r < rows; ++r) {
          if (probs[r][l] > k / 100.0) (gold.at(r, l) > 0 ? tp : fp) += 1;
        }
        any_hit |= (tp + fp > 0 ? tp / (tp + fp) : 0.0) >= target;
      }
      if (any_hit) CHECK(got.categories[l].precision >= target);
    }
  }
}

TEST_CASE("calibrate_thresholds runs the head over validation features") {
  auto head = LinearHead::zeros({"a"}, 1, FeatureSource::kEmbedding);
  head.weights = {4.0};
  std::vector<FeatureVector> xs;
  for (double v : {1.0, 0.8, -0.5, -1.0}) xs.push_back(FeatureVector::make_dense({v}, FeatureSource::kEmbedding));
  const auto gold = ps::testing::binary_matrix(ps::testing::numbered("ad", 4), {"a"}, {{1}, {1}, {0}, {0}});
  const auto r = calibrate_thresholds(head, xs, gold);
  CHECK(r.categories[0].precision == 1.0);
  CHECK(r.categories[0].recall == 1.0);
  CHECK(r.thresholds.values[0] == doctest::Approx(0.12).epsilon(1e-12));  // sigmoid(-2) ~ 0.1192
}

TEST_CASE("model save and load") {
  ps::Xorshift64Star rng(5);
  ModelBundle bundle;
  bundle.head = random_head(rng, 3, 4);
  bundle.head.feature_source = FeatureSource::kTfidf;
  bundle.thresholds = ThresholdVector{{0.1, 0.37, 0.99}};
  ps::textfeat::Vocabulary vocab;
  for (const char* t : {"alpha", "beta", "gamma", "delta"}) {
    vocab.index.emplace(t, vocab.idf.size());
    vocab.idf.push_back(1.0 + rng.unit());
  }
  vocab.document_count = 12;
  bundle.vocabulary = vocab;
  bundle.epoch_loss = {0.7, 0.5, 1.0 / 3.0};
  const auto bytes = save_model(bundle);
  const auto back = load_model(bytes);
  CHECK(back.head == bundle.head);
  CHECK(back.thresholds == bundle.thresholds);
  REQUIRE(back.vocabulary.has_value());
  CHECK(back.vocabulary->index == vocab.index);
  CHECK(back.vocabulary->idf == vocab.idf);
  CHECK(back.vocabulary->document_count == 12);
  CHECK(back.epoch_loss == bundle.epoch_loss);
  CHECK(save_model(back) == bytes);

  CHECK_THROWS_AS(load_model(bytes.substr(0, bytes.size() / 2)), ps::DataError);
  CHECK_THROWS_AS(load_model(""), ps::DataError);
  auto j = nlohmann::json::parse(bytes);
  j["version"] = kModelFormatVersion + 1;
  try {
    load_model(j.dump());
    FAIL("expected a version error");
  } catch (const ps::DataError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  j = nlohmann::json::parse(bytes);
  j["weights"].erase(0);
  CHECK_THROWS_AS(load_model(j.dump()), ps::DataError);
  j = nlohmann::json::parse(bytes);
  j.erase("vocabulary");
  CHECK_THROWS_AS(load_model(j.dump()), ps::DataError);
  j = nlohmann::json::parse(bytes);
  j["thresholds"][0] = 1.5;
  CHECK_THROWS_AS(load_model(j.dump()), ps::DataError);
}
