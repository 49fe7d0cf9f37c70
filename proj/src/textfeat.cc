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

#include "policyscope/textfeat.h"

#include <cmath>
#include <regex>

#include "policyscope/error.h"
#include "policyscope/format.h"
#include "policyscope/unicode.h"

namespace policyscope {
namespace embedded {
extern const std::string_view kStopwordsFr;
}  // namespace embedded

namespace textfeat {

PreprocessConfig PreprocessConfig::french_defaults() {
  PreprocessConfig config;
  config.stopword_list = bundled_french_stopwords();
  return config;
}

std::set<std::string> parse_stopwords(std::string_view bytes) {
  std::set<std::string> words;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    const auto line = trim(bytes.substr(start, end - start));
    if (!line.empty() && line.front() != '#') words.insert(unicode::to_lower(line));
    start = end + 1;
  }
  return words;
}

const std::set<std::string>& bundled_french_stopwords() {
  static const std::set<std::string> words = parse_stopwords(embedded::kStopwordsFr);
  return words;
}

namespace {

const std::regex& url_pattern() {
  static const std::regex pattern(R"((https?://|www\.)[^\s]*)",
                                  std::regex::ECMAScript | std::regex::icase);
  return pattern;
}

bool continues_run(char32_t cp) { return unicode::is_letter(cp) || unicode::is_mark(cp); }

}  // namespace

std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config) {
  if (!unicode::is_valid_utf8(text)) throw DataError("text is not valid UTF-8");
  if (config.remove_stopwords && config.stopword_list.empty()) {
    throw UsageError("stopword removal requested without a stopword list");
  }
  std::string working(text);
  if (config.remove_links) working = std::regex_replace(working, url_pattern(), " ");
  std::u32string cps = unicode::decode(working);
  if (config.remove_emojis) std::erase_if(cps, unicode::is_emoji);
  if (config.lowercase) cps = unicode::decode(unicode::to_lower(unicode::encode(cps)));

  // Letter runs (with combining marks) are word tokens; every other maximal
  // non-space run is one symbol token.
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (unicode::is_space(cps[i])) {
      ++i;
      continue;
    }
    const bool word = unicode::is_letter(cps[i]);
    std::size_t j = i + 1;
    while (j < cps.size() && !unicode::is_space(cps[j]) &&
           (word ? continues_run(cps[j]) : !unicode::is_letter(cps[j]))) {
      ++j;
    }
    std::string token = unicode::encode(std::u32string_view(cps).substr(i, j - i));
    i = j;
    if (!word && config.remove_punct) continue;
    if (config.remove_stopwords && config.stopword_list.contains(
                                       config.lowercase ? token : unicode::to_lower(token))) {
      continue;
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

Vocabulary fit_tfidf(const std::vector<std::vector<std::string>>& corpus,
                     std::size_t min_document_frequency) {
  if (corpus.empty()) throw DataError("cannot fit TF-IDF on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    const std::set<std::string> unique(doc.begin(), doc.end());
    for (const auto& term : unique) ++df[term];
  }
  Vocabulary vocab;
  vocab.document_count = corpus.size();
  vocab.min_document_frequency = min_document_frequency;
  const auto n = static_cast<double>(corpus.size());
  for (const auto& [term, count] : df) {
    if (count < min_document_frequency) continue;
    vocab.index.emplace(term, vocab.idf.size());
    vocab.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return vocab;
}

FeatureVector transform(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (const auto& token : tokens) {
    const auto it = vocab.index.find(token);
    if (it != vocab.index.end()) counts[it->second] += 1.0;
  }
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  double norm2 = 0.0;
  for (const auto& [index, count] : counts) {
    const double v = count * vocab.idf[index];
    indices.push_back(static_cast<std::uint32_t>(index));
    values.push_back(v);
    norm2 += v * v;
  }
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (double& v : values) v /= norm;
  }
  return FeatureVector::make_sparse(vocab.size(), std::move(indices), std::move(values),
                                    FeatureSource::kTfidf);
}

FeatureVector EmbeddingTable::feature(const std::string& ad_id) const {
  const auto it = vectors.find(ad_id);
  if (it == vectors.end()) throw DataError("no embedding for ad '" + ad_id + "'");
  return FeatureVector::make_dense(it->second, FeatureSource::kEmbedding);
}

EmbeddingTable load_embeddings(std::string_view bytes) {
  EmbeddingTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto where = [&] { return "embeddings line " + std::to_string(line_no) + ": "; };

    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos
                                                                       : tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    const std::string ad_id(trim(fields[0]));
    if (ad_id.empty()) throw DataError(where() + "empty ad_id");
    if (fields.size() < 2) throw DataError(where() + "no vector values for '" + ad_id + "'");
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      try {
        v = parse_double(fields[k]);
      } catch (const DataError&) {
        throw DataError(where() + "malformed value '" + std::string(fields[k]) + "'");
      }
      if (!std::isfinite(v)) throw DataError(where() + "non-finite value for '" + ad_id + "'");
      values.push_back(v);
    }
    if (table.vectors.empty()) {
      table.dimension = values.size();
    } else if (values.size() != table.dimension) {
      throw DataError(where() + "'" + ad_id + "' has dimension " + std::to_string(values.size()) +
                      ", expected " + std::to_string(table.dimension));
    }
    if (!table.vectors.emplace(ad_id, std::move(values)).second) {
      throw DataError(where() + "duplicate ad_id '" + ad_id + "'");
    }
  }
  if (table.vectors.empty()) throw DataError("embeddings file is empty; dimension unknown");
  return table;
}

}  // namespace textfeat
}  // namespace policyscope
