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

#include "doctest.h"
#include "policyscope/error.h"
#include "policyscope/textfeat.h"
#include "test_util.h"

namespace ps = policyscope;
using namespace policyscope::textfeat;
using Tokens = std::vector<std::string>;

TEST_CASE("preprocess examples") {
  const auto config = PreprocessConfig::french_defaults();
  CHECK(preprocess("Visitez https://ex.fr MAINTENANT !!! \xF0\x9F\x94\xA5", config) ==
        Tokens{"visitez", "maintenant"});
  CHECK(preprocess("", config).empty());
  CHECK(preprocess("\xF0\x9F\x94\xA5\xF0\x9F\x98\x80\xE2\x9C\x85", config).empty());
}

TEST_CASE("preprocess details") {
  auto config = PreprocessConfig::french_defaults();
  CHECK(preprocess("l'écologie", config) == Tokens{"écologie"});  // "l" is a stopword
  config.remove_stopwords = false;
  CHECK(preprocess("l'écologie", config) == Tokens{"l", "écologie"});
  CHECK(preprocess("Voir www.site.fr/x?y=1 ou HTTP://A.B", config) == Tokens{"voir", "ou"});
  CHECK(preprocess("ÉNERGIE Nucléaire", config) == Tokens{"énergie", "nucléaire"});
  config.remove_punct = false;
  CHECK(preprocess("oui, 2022 !", config) == Tokens{"oui", ",", "2022", "!"});
  config.lowercase = false;
  CHECK(preprocess("Oui", config) == Tokens{"Oui"});

  PreprocessConfig empty_list;
  empty_list.remove_stopwords = true;
  CHECK_THROWS_AS(preprocess("x", empty_list), ps::UsageError);
  CHECK_THROWS_AS(preprocess("caf\xe9", PreprocessConfig::french_defaults()), ps::DataError);
}

TEST_CASE("preprocess is idempotent on its output") {
  const auto config = PreprocessConfig::french_defaults();
  const auto ads = ps::testing::fixture_json("e2e/ads.json");
  for (const auto& ad : ads) {
    const auto once = preprocess(ad["ad_creative_body"].get<std::string>(), config);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(preprocess(joined, config) == once);
  }
}

TEST_CASE("bundled stopwords") {
  const auto& words = bundled_french_stopwords();
  CHECK(words.contains("le"));
  CHECK(words.contains("et"));
  CHECK_FALSE(words.contains("maintenant"));
  CHECK(parse_stopwords("# comment\nun\n\n deux \n") == std::set<std::string>{"un", "deux"});
}

TEST_CASE("fit_tfidf") {
  std::vector<Tokens> corpus(10, Tokens{"common"});
  corpus[0].push_back("rare");
  corpus[1].push_back("pair");
  corpus[2].push_back("pair");
  const auto vocab = fit_tfidf(corpus, 1);
  CHECK(vocab.document_count == 10);
  CHECK(vocab.idf[vocab.index.at("common")] == 1.0);
  CHECK(vocab.idf[vocab.index.at("rare")] == doctest::Approx(std::log(11.0 / 2.0) + 1.0).epsilon(1e-15));
  CHECK(vocab.idf[vocab.index.at("rare")] == doctest::Approx(2.7047).epsilon(1e-4));
  // indices follow lexicographic term order
  CHECK(vocab.index.at("common") == 0);
  CHECK(vocab.index.at("pair") == 1);
  CHECK(vocab.index.at("rare") == 2);

  const auto pruned = fit_tfidf(corpus, 2);
  CHECK_FALSE(pruned.index.contains("rare"));
  CHECK(pruned.index.contains("pair"));
  CHECK_THROWS_AS(fit_tfidf({}, 2), ps::DataError);
}

TEST_CASE("idf is non-increasing in document frequency") {
  std::vector<Tokens> corpus(12);
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (std::size_t t = 0; t <= d; ++t) corpus[d].push_back("t" + std::to_string(t));
  }
  // term tK appears in 12 - K documents
  const auto vocab = fit_tfidf(corpus, 1);
  for (int k = 1; k < 12; ++k) {
    const double prev = vocab.idf[vocab.index.at("t" + std::to_string(k - 1))];
    const double cur = vocab.idf[vocab.index.at("t" + std::to_string(k))];
    CHECK(cur >= prev);
  }
  CHECK(vocab.idf[vocab.index.at("t0")] == 1.0);
}

TEST_CASE("transform") {
  const std::vector<Tokens> corpus{{"a", "b"}, {"a"}, {"b", "c"}, {"a", "c"}};
  const auto vocab = fit_tfidf(corpus, 1);
  SUBCASE("out-of-vocabulary tokens give a zero vector") {
    const auto x = transform({"zz", "yy"}, vocab);
    CHECK(x.norm() == 0.0);
    CHECK(x.dimension == 3);
  }
  SUBCASE("one in-vocabulary token gives a unit vector") {
    const auto x = transform({"b"}, vocab);
    const auto dense = x.to_dense();
    CHECK(dense == std::vector<double>{0.0, 1.0, 0.0});
  }
  SUBCASE("two-term document") {
    // idf(a) = ln(5/4) + 1, idf(c) = ln(5/3) + 1; tf(a) = 2
    const double wa = 2.0 * (std::log(5.0 / 4.0) + 1.0);
    const double wc = std::log(5.0 / 3.0) + 1.0;
    const double n = std::sqrt(wa * wa + wc * wc);
    const auto dense = transform({"a", "c", "a"}, vocab).to_dense();
    CHECK(dense[0] == doctest::Approx(wa / n).epsilon(1e-14));
    CHECK(dense[1] == 0.0);
    CHECK(dense[2] == doctest::Approx(wc / n).epsilon(1e-14));
  }
  SUBCASE("nonzero vectors are unit length and transform is repeatable") {
    const auto ads = ps::testing::fixture_json("e2e/ads.json");
    std::vector<Tokens> docs;
    for (const auto& ad : ads) {
      docs.push_back(preprocess(ad["ad_creative_body"].get<std::string>(),
                                PreprocessConfig::french_defaults()));
    }
    const auto v = fit_tfidf(docs, 2);
    for (const auto& d : docs) {
      const auto x = transform(d, v);
      if (x.norm() > 0) CHECK(std::abs(x.norm() - 1.0) <= 1e-9);
      const auto y = transform(d, v);
      CHECK(x.values == y.values);
      CHECK(x.indices == y.indices);
    }
  }
}

TEST_CASE("load_embeddings") {
  const auto table = load_embeddings("a\t1\t2\t3\t4\nb\t0\t0\t0\t0\nc\t-1.5\t2e-3\t0\t1\n");
  CHECK(table.vectors.size() == 3);
  CHECK(table.dimension == 4);
  CHECK(table.feature("c").values == std::vector<double>{-1.5, 2e-3, 0, 1});
  CHECK(table.feature("c").source == ps::FeatureSource::kEmbedding);
  CHECK_THROWS_AS(table.feature("zz"), ps::DataError);
  CHECK_THROWS_AS(load_embeddings("a\t1\t2\na\t3\t4\n"), ps::DataError);
  CHECK_THROWS_AS(load_embeddings(""), ps::DataError);
  CHECK_THROWS_AS(load_embeddings("a\t1\t2\nb\t1\n"), ps::DataError);
  CHECK_THROWS_AS(load_embeddings("a\t1\tnan\n"), ps::DataError);
  try {
    load_embeddings("a\t1\t2\nb\t1\n");
  } catch (const ps::DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  const auto fixture = load_embeddings(ps::testing::fixture("e2e/embeddings.tsv"));
  CHECK(fixture.dimension == 16);
  CHECK(fixture.vectors.size() == 58);
}
