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

// Text preprocessing, TF-IDF features and precomputed embeddings.

#ifndef POLICYSCOPE_TEXTFEAT_H_
#define POLICYSCOPE_TEXTFEAT_H_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/features.h"

namespace policyscope::textfeat {

struct PreprocessConfig {
  bool remove_links = true;
  bool remove_emojis = true;
  bool remove_stopwords = true;
  bool remove_punct = true;
  bool lowercase = true;
  std::set<std::string> stopword_list;

  // All steps on, bundled French stopwords.
  static PreprocessConfig french_defaults();
};

// One stopword per line, '#' comments and blank lines ignored.
std::set<std::string> parse_stopwords(std::string_view bytes);
const std::set<std::string>& bundled_french_stopwords();

// Strip URLs, strip emojis, lowercase, split into letter runs (other
// non-space runs become separate tokens), drop tokens without letters,
// drop stopwords. Throws DataError for invalid UTF-8 and UsageError when
// stopword removal is requested with an empty list.
std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config);

// Terms are indexed in byte-lexicographic order.
struct Vocabulary {
  std::map<std::string, std::size_t> index;
  std::vector<double> idf;
  std::size_t document_count = 0;
  std::size_t min_document_frequency = 2;

  std::size_t size() const { return idf.size(); }
};

// Keeps terms with df >= min_document_frequency;
// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Throws DataError on an empty
// corpus.
Vocabulary fit_tfidf(const std::vector<std::vector<std::string>>& corpus,
                     std::size_t min_document_frequency = 2);

// Raw count x idf per in-vocabulary term, L2-normalized when nonzero.
FeatureVector transform(const std::vector<std::string>& tokens, const Vocabulary& vocab);

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> vectors;

  // Throws DataError when the ad has no vector.
  FeatureVector feature(const std::string& ad_id) const;
};

// TSV "ad_id<TAB>v1...<TAB>vd". Throws DataError naming the line for
// dimension mismatches, non-finite values, duplicates or an empty file.
EmbeddingTable load_embeddings(std::string_view bytes);

}  // namespace policyscope::textfeat

#endif  // POLICYSCOPE_TEXTFEAT_H_
