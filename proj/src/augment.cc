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

#include "policyscope/augment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "policyscope/format.h"
#include "policyscope/rng.h"

namespace policyscope::textfeat {

std::string ReverseWordsTranslator::translate(std::string_view text, std::string_view,
                                              std::string_view) const {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  const auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !space(text[j])) ++j;
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  std::string out;
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    if (!out.empty()) out.push_back(' ');
    out += *it;
  }
  return out;
}

HttpTranslator::HttpTranslator(std::string url, double timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw UsageError("translator URL lacks a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  host_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::string HttpTranslator::translate(std::string_view text, std::string_view source,
                                      std::string_view target) const {
  httplib::Client client(host_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  const nlohmann::json body = {{"text", text}, {"source", source}, {"target", target}};
  const auto response = client.Post(path_, body.dump(), "application/json");
  if (!response) {
    throw TranslationError("translation request to " + host_ + path_ +
                               " failed: " + httplib::to_string(response.error()),
                           true);
  }
  if (response->status >= 500) {
    throw TranslationError("translator returned HTTP " + std::to_string(response->status), true);
  }
  if (response->status != 200) {
    throw TranslationError("translator returned HTTP " + std::to_string(response->status), false);
  }
  try {
    return nlohmann::json::parse(response->body).at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TranslationError(std::string("malformed translator response: ") + e.what(), false);
  }
}

std::unique_ptr<Translator> make_translator(std::string_view url, double timeout_seconds) {
  if (url == "mock:identity") return std::make_unique<IdentityTranslator>();
  if (url == "mock:reverse") return std::make_unique<ReverseWordsTranslator>();
  if (url.starts_with("http://")) {
    return std::make_unique<HttpTranslator>(std::string(url), timeout_seconds);
  }
  throw UsageError("unsupported translator '" + std::string(url) +
                   "' (expected mock:identity, mock:reverse or http://...)");
}

std::string back_translate(std::string_view text, std::string_view source_language,
                           std::string_view pivot_language, const Translator& translator) {
  const std::string pivot = translator.translate(text, source_language, pivot_language);
  return translator.translate(pivot, pivot_language, source_language);
}

std::vector<AugmentDraw> sample_for_augmentation(const LabelMatrix& train, const AugmentPlan& plan) {
  if (!(plan.fraction >= 0.0 && plan.fraction <= 1.0)) {
    throw DataError("augmentation fraction must lie in [0,1]");
  }
  Xorshift64Star rng(plan.seed);
  std::vector<AugmentDraw> draws;
  for (std::size_t c = 0; c < train.cols(); ++c) {
    std::vector<std::size_t> pool;
    for (std::size_t r = 0; r < train.rows(); ++r) {
      if (train.positive(r, c)) pool.push_back(r);
    }
    // the epsilon absorbs representation error, e.g. 0.4 * 5 = 2.0000000000000004
    const auto take = static_cast<std::size_t>(
        std::floor(plan.fraction * static_cast<double>(pool.size()) + 1e-9));
    seeded_partial_shuffle(std::span<std::size_t>(pool), take, rng);
    for (std::size_t i = 0; i < take; ++i) {
      draws.push_back(AugmentDraw{train.ad_ids[pool[i]], train.category_ids[c]});
    }
  }
  return draws;
}

AugmentResult augment_dataset(const LabelMatrix& train,
                              const std::map<std::string, std::string>& texts,
                              const AugmentPlan& plan, const Translator& translator) {
  for (const auto& id : train.ad_ids) {
    if (!texts.contains(id)) throw DataError("no text for training ad '" + id + "'");
  }
  AugmentResult result;
  result.matrix = train;
  for (const auto& id : train.ad_ids) result.texts.emplace(id, texts.at(id));

  std::set<std::string> unique_ids;
  for (const auto& draw : sample_for_augmentation(train, plan)) unique_ids.insert(draw.ad_id);
  const std::vector<std::string> ids(unique_ids.begin(), unique_ids.end());

  struct Outcome {
    std::string text;
    std::string error;
    bool ok = false;
  };
  std::vector<Outcome> outcomes(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      const std::string& original = texts.at(ids[i]);
      for (std::size_t attempt = 0;; ++attempt) {
        try {
          outcomes[i].text =
              back_translate(original, plan.source_language, plan.pivot_language, translator);
          outcomes[i].ok = true;
          break;
        } catch (const TranslationError& e) {
          if (!e.retriable() || attempt >= plan.retries) {
            outcomes[i].error = e.what();
            break;
          }
        } catch (const std::exception& e) {
          outcomes[i].error = e.what();
          break;
        }
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(plan.max_in_flight, 1, std::max<std::size_t>(ids.size(), 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::string& id = ids[i];
    if (!outcomes[i].ok) {
      result.failures.push_back(AugmentFailure{id, outcomes[i].error});
      continue;
    }
    if (outcomes[i].text == texts.at(id)) {
      result.dropped_identical.push_back(id);
      continue;
    }
    const std::string synthetic = id + std::string(kSyntheticSuffix);
    result.matrix.append_row(synthetic, train.row(static_cast<std::size_t>(train.row_index(id))));
    result.texts[synthetic] = outcomes[i].text;
    result.synthetic_ids.push_back(synthetic);
  }
  return result;
}

std::string write_texts(const std::map<std::string, std::string>& texts) {
  std::string out;
  for (const auto& [id, text] : texts) {
    nlohmann::ordered_json line;
    line["ad_id"] = id;
    line["text"] = text;
    out += line.dump() + "\n";
  }
  return out;
}

std::map<std::string, std::string> read_texts(std::string_view bytes) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < bytes.size()) {
    auto end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    const auto line = trim(bytes.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      out[obj.at("ad_id").get<std::string>()] = obj.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("texts line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace policyscope::textfeat
