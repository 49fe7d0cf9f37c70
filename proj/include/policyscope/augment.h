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

// Back-translation data augmentation.

#ifndef POLICYSCOPE_AUGMENT_H_
#define POLICYSCOPE_AUGMENT_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/error.h"
#include "policyscope/label_matrix.h"

namespace policyscope::textfeat {

inline constexpr std::string_view kSyntheticSuffix = "#bt";

class TranslationError : public Error {
 public:
  TranslationError(const std::string& message, bool retriable)
      : Error(message), retriable_(retriable) {}
  bool retriable() const { return retriable_; }

 private:
  bool retriable_;
};

// Implementations must be safe to call from several threads at once.
class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::string translate(std::string_view text, std::string_view source,
                                std::string_view target) const = 0;
};

// mock:identity
class IdentityTranslator final : public Translator {
 public:
  std::string translate(std::string_view text, std::string_view, std::string_view) const override {
    return std::string(text);
  }
};

// mock:reverse. Splits on whitespace runs and rejoins the words in reverse
// order with single spaces, so a round trip restores single-spaced text
// exactly and normalizes any other spacing.
class ReverseWordsTranslator final : public Translator {
 public:
  std::string translate(std::string_view text, std::string_view, std::string_view) const override;
};

// POST {"text","source","target"} to the endpoint, expects {"text"}.
// Transport failures and 5xx responses are retriable; other statuses and
// malformed responses are not.
class HttpTranslator final : public Translator {
 public:
  HttpTranslator(std::string url, double timeout_seconds);
  std::string translate(std::string_view text, std::string_view source,
                        std::string_view target) const override;

 private:
  std::string host_;  // scheme://host[:port]
  std::string path_;
  double timeout_seconds_;
};

// "mock:identity", "mock:reverse" or an http:// URL. Throws UsageError.
std::unique_ptr<Translator> make_translator(std::string_view url, double timeout_seconds = 30.0);

// source -> pivot -> source, returned verbatim.
std::string back_translate(std::string_view text, std::string_view source_language,
                           std::string_view pivot_language, const Translator& translator);

struct AugmentPlan {
  double fraction = 0.4;  // of each category's training support
  std::string source_language = "fr";
  std::string pivot_language = "en";
  std::uint64_t seed = 0;
  std::size_t max_in_flight = 4;
  std::size_t retries = 2;  // extra attempts on retriable errors
};

struct AugmentDraw {
  std::string ad_id;
  std::string category_id;
  friend bool operator==(const AugmentDraw&, const AugmentDraw&) = default;
};

// For each category in column order, floor(fraction * support) labeled
// ads drawn without replacement from one seeded stream. Results in draw
// order. Throws DataError when fraction is outside [0,1].
std::vector<AugmentDraw> sample_for_augmentation(const LabelMatrix& train, const AugmentPlan& plan);

struct AugmentFailure {
  std::string ad_id;
  std::string message;
};

struct AugmentResult {
  std::map<std::string, std::string> texts;  // originals plus synthetic ads
  LabelMatrix matrix;                        // originals, then synthetic rows by source id
  std::vector<std::string> synthetic_ids;
  std::vector<std::string> dropped_identical;
  std::vector<AugmentFailure> failures;
};

// Each drawn ad (once, however many categories drew it) is back-translated;
// a paraphrase different from its original becomes "<id>#bt" with the
// original's full label row. Throws DataError if a train ad lacks text.
AugmentResult augment_dataset(const LabelMatrix& train,
                              const std::map<std::string, std::string>& texts,
                              const AugmentPlan& plan, const Translator& translator);

// JSON Lines {"ad_id","text"} sorted by ad_id.
std::string write_texts(const std::map<std::string, std::string>& texts);
std::map<std::string, std::string> read_texts(std::string_view bytes);

}  // namespace policyscope::textfeat

#endif  // POLICYSCOPE_AUGMENT_H_
