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

#include "policyscope/config.h"

#include <functional>
#include <sstream>

#include "policyscope/error.h"
#include "policyscope/format.h"

namespace policyscope::config {

namespace {

std::string quoted_value(std::string_view text, std::size_t line) {
  std::string out;
  std::size_t i = 1;
  for (; i < text.size() && text[i] != '"'; ++i) {
    if (text[i] == '\\') {
      if (++i == text.size()) break;
      switch (text[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default:
          throw UsageError("config line " + std::to_string(line) + ": unknown escape \\" +
                           std::string(1, text[i]));
      }
    } else {
      out += text[i];
    }
  }
  if (i >= text.size()) {
    throw UsageError("config line " + std::to_string(line) + ": unterminated string");
  }
  const auto rest = trim(text.substr(i + 1));
  if (!rest.empty() && rest.front() != '#') {
    throw UsageError("config line " + std::to_string(line) + ": text after string value");
  }
  return out;
}

bool is_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (const char c : key) {
    if (!is_key_char(c)) return false;
  }
  return true;
}

}  // namespace

std::map<std::string, std::string> parse_kv(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw UsageError(where + "unclosed section header");
      section = std::string(trim(line.substr(1, close - 1)));
      if (!valid_key(section)) throw UsageError(where + "bad section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw UsageError(where + "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw UsageError(where + "bad key '" + std::string(key) + "'");
    auto raw = trim(line.substr(eq + 1));
    std::string value;
    if (!raw.empty() && raw.front() == '"') {
      value = quoted_value(raw, line_no);
    } else {
      raw = trim(raw.substr(0, raw.find('#')));
      if (raw.empty()) throw UsageError(where + "missing value");
      value = std::string(raw);
    }
    const auto full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (!out.emplace(full, std::move(value)).second) {
      throw UsageError(where + "duplicate key '" + full + "'");
    }
  }
  return out;
}

namespace {

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::filesystem::path&)>;

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    return parse_uint(v);
  } catch (const Error&) {
    throw UsageError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const Error&) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw UsageError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::filesystem::path to_path(const std::string& v, const std::filesystem::path& base) {
  if (v.empty()) return {};
  const std::filesystem::path p(v);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    const auto path = [&t](const std::string& key, std::filesystem::path Paths::*member) {
      t[key] = [member](PipelineConfig& c, const std::string& v, const std::filesystem::path& base) {
        c.paths.*member = to_path(v, base);
      };
    };
    const auto str = [&t](const std::string& key, std::string PipelineConfig::*member) {
      t[key] = [member](PipelineConfig& c, const std::string& v, const std::filesystem::path&) {
        c.*member = v;
      };
    };
    const auto size = [&t](const std::string& key, std::size_t PipelineConfig::*member) {
      t[key] = [member, key](PipelineConfig& c, const std::string& v, const std::filesystem::path&) {
        c.*member = static_cast<std::size_t>(to_u64(key, v));
      };
    };
    const auto real = [&t](const std::string& key, double PipelineConfig::*member) {
      t[key] = [member, key](PipelineConfig& c, const std::string& v, const std::filesystem::path&) {
        c.*member = to_double(key, v);
      };
    };
    const auto flag = [&t](const std::string& key, bool PipelineConfig::*member) {
      t[key] = [member, key](PipelineConfig& c, const std::string& v, const std::filesystem::path&) {
        c.*member = to_bool(key, v);
      };
    };
    t["seed"] = [](PipelineConfig& c, const std::string& v, const std::filesystem::path&) {
      c.seed = to_u64("seed", v);
    };
    path("paths.ads", &Paths::ads);
    path("paths.daily_reports", &Paths::daily_reports);
    path("paths.annotations", &Paths::annotations);
    path("paths.embeddings", &Paths::embeddings);
    path("paths.codebook", &Paths::codebook);
    path("paths.aliases", &Paths::aliases);
    path("paths.stopwords", &Paths::stopwords);
    path("paths.gold", &Paths::gold);
    path("paths.out", &Paths::out);
    str("ingest.language", &PipelineConfig::language);
    str("labeling.mode", &PipelineConfig::label_mode);
    t["labeling.min_duration"] = [](PipelineConfig& c, const std::string& v,
                                    const std::filesystem::path&) {
      c.min_duration = to_u64("labeling.min_duration", v);
    };
    str("labeling.subset", &PipelineConfig::subset);
    flag("labeling.drop_other", &PipelineConfig::drop_other);
    size("labeling.per_category", &PipelineConfig::per_category);
    size("labeling.min_support", &PipelineConfig::min_support);
    real("labeling.validation_fraction", &PipelineConfig::validation_fraction);
    str("features.source", &PipelineConfig::feature_source);
    size("features.min_df", &PipelineConfig::min_df);
    t["train.epochs"] = [](PipelineConfig& c, const std::string& v, const std::filesystem::path&) {
      c.epochs = static_cast<int>(to_u64("train.epochs", v));
    };
    real("train.learning_rate", &PipelineConfig::learning_rate);
    size("train.batch_size", &PipelineConfig::batch_size);
    flag("train.use_augmented", &PipelineConfig::use_augmented);
    real("calibration.precision_target", &PipelineConfig::precision_target);
    real("calibration.grid_step", &PipelineConfig::grid_step);
    real("augment.fraction", &PipelineConfig::augment_fraction);
    str("augment.source_language", &PipelineConfig::source_language);
    str("augment.pivot_language", &PipelineConfig::pivot_language);
    str("augment.translator", &PipelineConfig::translator);
    size("augment.max_in_flight", &PipelineConfig::max_in_flight);
    size("augment.retries", &PipelineConfig::retries);
    real("augment.timeout", &PipelineConfig::translator_timeout);
    real("analysis.rho", &PipelineConfig::rho);
    size("analysis.complexity_threshold", &PipelineConfig::complexity_threshold);
    return t;
  }();
  return table;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

PipelineConfig PipelineConfig::from_kv(const std::map<std::string, std::string>& kv,
                                       const std::filesystem::path& base_dir) {
  PipelineConfig c;
  c.paths.out = to_path("out", base_dir);
  for (const auto& [key, value] : kv) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw UsageError("unknown config key '" + key + "'");
    it->second(c, value, base_dir);
  }
  check(c.label_mode == "vm" || c.label_mode == "distrib",
        "labeling.mode must be vm or distrib, got '" + c.label_mode + "'");
  check(c.feature_source == "embedding" || c.feature_source == "tfidf",
        "features.source must be embedding or tfidf, got '" + c.feature_source + "'");
  check(c.validation_fraction >= 0.0 && c.validation_fraction < 1.0,
        "labeling.validation_fraction must lie in [0,1)");
  check(c.epochs >= 1, "train.epochs must be >= 1");
  check(c.batch_size >= 1, "train.batch_size must be >= 1");
  check(c.learning_rate >= 0.0, "train.learning_rate must be >= 0");
  check(c.precision_target >= 0.0 && c.precision_target <= 1.0,
        "calibration.precision_target must lie in [0,1]");
  check(c.grid_step > 0.0 && c.grid_step < 1.0, "calibration.grid_step must lie in (0,1)");
  check(c.augment_fraction >= 0.0 && c.augment_fraction <= 1.0,
        "augment.fraction must lie in [0,1]");
  check(c.max_in_flight >= 1, "augment.max_in_flight must be >= 1");
  check(c.rho >= 0.0, "analysis.rho must be >= 0");
  check(c.min_df >= 1, "features.min_df must be >= 1");
  check(!c.language.empty(), "ingest.language must not be empty");
  return c;
}

std::string PipelineConfig::render() const {
  std::ostringstream out;
  const auto p = [](const std::filesystem::path& path) { return quote(path.generic_string()); };
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "seed = " << seed << "\n\n[paths]\n"
      << "ads = " << p(paths.ads) << "\n"
      << "daily_reports = " << p(paths.daily_reports) << "\n"
      << "annotations = " << p(paths.annotations) << "\n"
      << "embeddings = " << p(paths.embeddings) << "\n"
      << "codebook = " << p(paths.codebook) << "\n"
      << "aliases = " << p(paths.aliases) << "\n"
      << "stopwords = " << p(paths.stopwords) << "\n"
      << "gold = " << p(paths.gold) << "\n"
      << "out = " << p(paths.out) << "\n\n[ingest]\n"
      << "language = " << quote(language) << "\n\n[labeling]\n"
      << "mode = " << quote(label_mode) << "\n"
      << "min_duration = " << min_duration << "\n"
      << "subset = " << quote(subset) << "\n"
      << "drop_other = " << b(drop_other) << "\n"
      << "per_category = " << per_category << "\n"
      << "min_support = " << min_support << "\n"
      << "validation_fraction = " << format_double(validation_fraction) << "\n\n[features]\n"
      << "source = " << quote(feature_source) << "\n"
      << "min_df = " << min_df << "\n\n[train]\n"
      << "epochs = " << epochs << "\n"
      << "learning_rate = " << format_double(learning_rate) << "\n"
      << "batch_size = " << batch_size << "\n"
      << "use_augmented = " << b(use_augmented) << "\n\n[calibration]\n"
      << "precision_target = " << format_double(precision_target) << "\n"
      << "grid_step = " << format_double(grid_step) << "\n\n[augment]\n"
      << "fraction = " << format_double(augment_fraction) << "\n"
      << "source_language = " << quote(source_language) << "\n"
      << "pivot_language = " << quote(pivot_language) << "\n"
      << "translator = " << quote(translator) << "\n"
      << "max_in_flight = " << max_in_flight << "\n"
      << "retries = " << retries << "\n"
      << "timeout = " << format_double(translator_timeout) << "\n\n[analysis]\n"
      << "rho = " << format_double(rho) << "\n"
      << "complexity_threshold = " << complexity_threshold << "\n";
  return out.str();
}

PipelineConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> kv;
  std::filesystem::path base = std::filesystem::current_path();
  if (!path.empty()) {
    if (!std::filesystem::is_regular_file(path)) {
      throw UsageError("config file '" + path.string() + "' does not exist");
    }
    kv = parse_kv(read_file(path.string()));
    base = std::filesystem::absolute(path).parent_path();
  }
  const auto cwd = std::filesystem::current_path();
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("override '" + item + "' is not key=value");
    const auto key = std::string(trim(std::string_view(item).substr(0, eq)));
    auto value = std::string(trim(std::string_view(item).substr(eq + 1)));
    if (!setters().contains(key)) throw UsageError("unknown config key '" + key + "'");
    // command-line paths are relative to the working directory
    if (key.starts_with("paths.") && !value.empty()) value = to_path(value, cwd).string();
    kv[key] = value;
  }
  return PipelineConfig::from_kv(kv, base);
}

}  // namespace policyscope::config
