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

#include "policyscope/pipeline.h"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "policyscope/agreement.h"
#include "policyscope/attention.h"
#include "policyscope/augment.h"
#include "policyscope/codebook.h"
#include "policyscope/csv.h"
#include "policyscope/error.h"
#include "policyscope/evaluation.h"
#include "policyscope/format.h"
#include "policyscope/ingest.h"
#include "policyscope/label_matrix.h"
#include "policyscope/labeling.h"
#include "policyscope/model.h"
#include "policyscope/rng.h"
#include "policyscope/textfeat.h"

namespace policyscope::pipeline {

namespace fs = std::filesystem;
using config::PipelineConfig;
using nlohmann::ordered_json;

std::string labels_file(std::string_view mode) { return "labels_" + std::string(mode) + ".csv"; }

std::uint64_t stage_seed(std::string_view stage, std::uint64_t global_seed) {
  return derive_seed(stage, global_seed);
}

namespace {

// Soft entries at or above this level mean a two-vote majority.
constexpr double kMajorityLevel = 0.6;

void echo(std::string_view command, const PipelineConfig& config, std::ostream& log) {
  log << "# policyscope " << command << "\n# seed " << config.seed << ", stage seed "
      << stage_seed(command, config.seed) << "\n"
      << config.render() << "\n";
}

fs::path artifact(const PipelineConfig& config, std::string_view name) {
  return config.paths.out / std::string(name);
}

fs::path output(const PipelineConfig& config, std::string_view name) {
  std::error_code ec;
  fs::create_directories(config.paths.out, ec);
  if (ec) throw DataError("cannot create output directory '" + config.paths.out.string() + "'");
  return artifact(config, name);
}

void write(const fs::path& path, std::string_view contents, std::ostream& log) {
  write_file(path.string(), contents);
  log << "wrote " << path.generic_string() << "\n";
}

fs::path require_input(const fs::path& path, std::string_view key) {
  if (path.empty()) throw UsageError("config key '" + std::string(key) + "' is not set");
  if (!fs::exists(path)) {
    throw DataError("missing input '" + path.string() + "' (" + std::string(key) + ")");
  }
  return path;
}

std::string read_artifact(const PipelineConfig& config, std::string_view name,
                          std::string_view producer) {
  const auto path = artifact(config, name);
  if (!fs::is_regular_file(path)) {
    throw DataError("missing artifact '" + path.string() + "'; run `policyscope " +
                    std::string(producer) + "` first");
  }
  return read_file(path.string());
}

const codebook::Codebook& load_codebook(const PipelineConfig& config) {
  if (config.paths.codebook.empty()) return codebook::Codebook::bundled();
  static std::map<fs::path, codebook::Codebook> cache;
  const auto path = require_input(config.paths.codebook, "paths.codebook");
  auto it = cache.find(path);
  if (it == cache.end()) {
    it = cache.emplace(path, codebook::Codebook::load(read_file(path.string()))).first;
  }
  return it->second;
}

std::vector<ingest::AdRecord> load_store(const PipelineConfig& config) {
  auto parsed = ingest::parse_ads(read_artifact(config, kAdStore, "ingest"));
  if (!parsed.errors.empty()) {
    throw DataError("ad store is corrupt: " + parsed.errors.front().message);
  }
  return std::move(parsed.rows);
}

std::map<std::string, std::string> store_texts(const std::vector<ingest::AdRecord>& ads) {
  std::map<std::string, std::string> texts;
  for (const auto& ad : ads) texts.emplace(ad.ad_id, ad.creative_body);
  return texts;
}

FeatureSource source_of(const PipelineConfig& config) {
  return parse_feature_source(config.feature_source);
}

// Majority view of a label matrix: soft entries count from two votes up.
LabelMatrix majority(const LabelMatrix& matrix) {
  if (matrix.mode == LabelMode::kBinary) return matrix;
  LabelMatrix out(matrix.ad_ids, matrix.category_ids, LabelMode::kBinary);
  for (std::size_t i = 0; i < matrix.entries.size(); ++i) {
    out.entries[i] = matrix.entries[i] >= kMajorityLevel - 1e-9 ? 1.0 : 0.0;
  }
  return out;
}

LabelMatrix load_model_labels(const PipelineConfig& config) {
  return read_label_matrix(read_artifact(config, kModelLabels, "split"),
                           config.label_mode == "distrib");
}

labeling::DatasetSplit load_split(const PipelineConfig& config) {
  return labeling::read_split(read_artifact(config, kSplit, "split"));
}

textfeat::PreprocessConfig preprocess_config(const PipelineConfig& config) {
  auto pre = textfeat::PreprocessConfig::french_defaults();
  if (!config.paths.stopwords.empty()) {
    pre.stopword_list = textfeat::parse_stopwords(
        read_file(require_input(config.paths.stopwords, "paths.stopwords").string()));
  }
  return pre;
}

// Rebuilds model inputs for `ids`. TF-IDF needs texts and the fitted
// vocabulary; embeddings are looked up by ad id.
class FeatureBuilder {
 public:
  FeatureBuilder(const PipelineConfig& config, FeatureSource source,
                 std::map<std::string, std::string> texts)
      : config_(config), source_(source), texts_(std::move(texts)) {
    if (source_ == FeatureSource::kEmbedding) {
      embeddings_ = textfeat::load_embeddings(
          read_file(require_input(config.paths.embeddings, "paths.embeddings").string()));
    } else {
      preprocess_ = preprocess_config(config);
    }
  }

  void fit(const std::vector<std::string>& ids) {
    if (source_ != FeatureSource::kTfidf) return;
    std::vector<std::vector<std::string>> corpus;
    for (const auto& id : ids) corpus.push_back(tokens(id));
    vocabulary_ = textfeat::fit_tfidf(corpus, config_.min_df);
  }

  void set_vocabulary(std::optional<textfeat::Vocabulary> vocab) { vocabulary_ = std::move(vocab); }
  const std::optional<textfeat::Vocabulary>& vocabulary() const { return vocabulary_; }

  std::vector<FeatureVector> build(const std::vector<std::string>& ids) const {
    std::vector<FeatureVector> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
      if (source_ == FeatureSource::kEmbedding) {
        out.push_back(embeddings_.feature(id));
      } else {
        if (!vocabulary_) throw DataError("tfidf features need a fitted vocabulary");
        out.push_back(textfeat::transform(tokens(id), *vocabulary_));
      }
    }
    return out;
  }

  std::size_t dimension() const {
    return source_ == FeatureSource::kEmbedding ? embeddings_.dimension
                                                : (vocabulary_ ? vocabulary_->size() : 0);
  }

 private:
  std::vector<std::string> tokens(const std::string& id) const {
    const auto it = texts_.find(id);
    if (it == texts_.end()) throw DataError("no text for ad '" + id + "'");
    return textfeat::preprocess(it->second, preprocess_);
  }

  const PipelineConfig& config_;
  FeatureSource source_;
  std::map<std::string, std::string> texts_;
  textfeat::EmbeddingTable embeddings_;
  textfeat::PreprocessConfig preprocess_;
  std::optional<textfeat::Vocabulary> vocabulary_;
};

fs::path model_path(const PipelineConfig& config, const fs::path& model) {
  return model.empty() ? artifact(config, kModel) : model;
}

model::ModelBundle load_bundle(const PipelineConfig& config, const fs::path& model) {
  const auto path = model_path(config, model);
  if (!fs::is_regular_file(path)) {
    throw DataError("missing model '" + path.string() + "'; run `policyscope train` first");
  }
  return model::load_model(read_file(path.string()));
}

FeatureBuilder builder_for(const PipelineConfig& config, const model::ModelBundle& bundle,
                           std::map<std::string, std::string> texts) {
  FeatureBuilder builder(config, bundle.head.feature_source, std::move(texts));
  builder.set_vocabulary(bundle.vocabulary);
  if (builder.dimension() != bundle.head.dimension) {
    throw DataError("feature dimension " + std::to_string(builder.dimension()) +
                    " does not match the model (" + std::to_string(bundle.head.dimension) + ")");
  }
  return builder;
}

LabelMatrix rows_for(const LabelMatrix& labels, const std::vector<std::string>& ids,
                     std::string_view part) {
  if (ids.empty()) throw DataError("the " + std::string(part) + " split is empty");
  return labels.select_rows(ids);
}

LabelMatrix predict_matrix(const model::ModelBundle& bundle,
                           const std::vector<FeatureVector>& features,
                           const std::vector<std::string>& ids) {
  LabelMatrix pred(ids, bundle.head.category_ids, LabelMode::kBinary);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto p = model::forward(bundle.head, features[r]);
    for (std::size_t l = 0; l < p.size(); ++l) {
      pred.at(r, l) = p[l] > bundle.thresholds.values[l] ? 1.0 : 0.0;
    }
  }
  return pred;
}

void warn_all(const std::vector<std::string>& warnings, std::ostream& log) {
  for (const auto& w : warnings) log << "warning: " << w << "\n";
}

std::vector<std::string> modeling_categories(const PipelineConfig& config,
                                             const codebook::Codebook& book,
                                             const LabelMatrix& grouped) {
  std::vector<std::string> ids;
  if (config.subset == "all") {
    ids = grouped.category_ids;
  } else {
    ids = book.subset(config.subset);
  }
  if (config.drop_other) std::erase(ids, std::string(codebook::kOtherId));
  return ids;
}

std::vector<std::string> list_ad_files(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".json" || ext == ".ndjson" || ext == ".jsonl")) {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

void cmd_ingest(const PipelineConfig& config, std::ostream& log) {
  echo("ingest", config, log);
  const auto source = require_input(config.paths.ads, "paths.ads");
  std::vector<std::string> files;
  if (fs::is_directory(source)) {
    files = list_ad_files(source);
    if (files.empty()) throw DataError("no ad files (.json, .ndjson, .jsonl) in '" + source.string() + "'");
  } else {
    files.push_back(source.string());
  }

  std::vector<ingest::AdRecord> parsed;
  ordered_json errors = ordered_json::array();
  for (const auto& file : files) {
    auto result = ingest::parse_ads(read_file(file));
    for (const auto& e : result.errors) {
      const auto name = fs::path(file).filename().string();
      log << "warning: " << name << ":" << e.line << ": " << e.message << "\n";
      errors.push_back({{"file", name}, {"line", e.line}, {"message", e.message}});
    }
    for (auto& ad : result.rows) parsed.push_back(std::move(ad));
  }
  const auto in_language = ingest::filter_language(parsed, config.language);
  const auto ads = ingest::dedupe(in_language);
  if (ads.empty()) {
    throw DataError("no ads left after parsing and language filter '" + config.language + "'");
  }
  const auto totals = ingest::corpus_totals(ads);

  ordered_json report;
  report["files"] = files.size();
  report["parsed"] = parsed.size();
  report["row_errors"] = std::move(errors);
  report["language"] = config.language;
  report["after_language_filter"] = in_language.size();
  report["duplicates_removed"] = in_language.size() - ads.size();
  report["ads"] = ads.size();

  if (!config.paths.daily_reports.empty()) {
    const auto daily = ingest::parse_daily_report(
        read_file(require_input(config.paths.daily_reports, "paths.daily_reports").string()));
    std::string out = csv::join_row({"page_id", "page_name", "ads_count", "spend"});
    for (const auto& row : daily.rows) {
      out += csv::join_row({row.page_id, row.page_name, std::to_string(row.ads_count),
                            row.spend.to_string()});
    }
    for (const auto& e : daily.errors) {
      log << "warning: daily report line " << e.line << ": " << e.message << "\n";
    }
    report["daily_report_rows"] = daily.rows.size();
    report["daily_report_errors"] = daily.errors.size();
    write(output(config, kDailyReports), out, log);
  }

  write(output(config, kAdStore), ingest::write_ads(ads), log);
  write(output(config, kCorpusTotals), ingest::corpus_totals_json(totals), log);
  write(output(config, kIngestReport), report.dump(2) + "\n", log);
  log << "ads: " << ads.size() << " (parsed " << parsed.size() << ", duplicates removed "
      << in_language.size() - ads.size() << ")\n"
      << "impressions estimate: " << format_double(totals.impressions_estimate)
      << " (open-ended: " << totals.open_ended_impressions << ")\n";
  for (const auto& [currency, value] : totals.spend_estimate) {
    log << "spend estimate " << currency << ": " << format_double(value) << "\n";
  }
}

void cmd_aggregate(const PipelineConfig& config, std::ostream& log) {
  echo("aggregate", config, log);
  const auto& book = load_codebook(config);
  const auto parsed = labeling::parse_annotations(
      read_file(require_input(config.paths.annotations, "paths.annotations").string()));
  for (const auto& e : parsed.errors) {
    log << "warning: annotations line " << e.line << ": " << e.message << "\n";
  }
  const auto kept = labeling::filter_votes(parsed.rows, config.min_duration);
  const auto assemblies = labeling::assemble(kept);
  if (assemblies.empty()) {
    throw DataError("no assemblies: no ad has " + std::to_string(labeling::kVotesPerAd) +
                    " distinct workers after the " + std::to_string(config.min_duration) +
                    " s duration filter");
  }
  const auto ids = book.category_ids();
  const LabelMatrix matrix = config.label_mode == "vm"
                                 ? labeling::vm_aggregate(assemblies, ids)
                                 : labeling::distrib_aggregate(assemblies, ids);
  ordered_json report;
  report["mode"] = config.label_mode;
  report["votes"] = parsed.rows.size();
  report["row_errors"] = parsed.errors.size();
  report["votes_after_duration_filter"] = kept.size();
  report["assemblies"] = assemblies.size();
  report["rows"] = matrix.rows();
  if (matrix.mode == LabelMode::kBinary) {
    report["multi_label_fraction"] = labeling::multi_label_fraction(matrix);
  }
  write(output(config, labels_file(config.label_mode)), write_label_matrix(matrix), log);
  write(output(config, kAggregateReport), report.dump(2) + "\n", log);
  log << "assemblies: " << assemblies.size() << ", labeled rows: " << matrix.rows() << "\n";
}

void cmd_split(const PipelineConfig& config, std::ostream& log) {
  echo("split", config, log);
  const auto& book = load_codebook(config);
  const auto raw = read_label_matrix(
      read_artifact(config, labels_file(config.label_mode), "aggregate"),
      config.label_mode == "distrib");
  const auto grouped = codebook::group_columns(raw, book);
  const auto labels = codebook::subset_filter(grouped, modeling_categories(config, book, grouped));
  if (labels.rows() == 0) throw DataError("no labeled ads remain in subset '" + config.subset + "'");

  labeling::SplitParams params;
  params.per_category = config.per_category;
  params.min_support = config.min_support;
  params.validation_fraction = config.validation_fraction;
  params.seed = stage_seed("split", config.seed);
  // soft labels are stratified on their majority view
  const auto result = labeling::stratified_test_split(majority(labels), params);
  warn_all(result.warnings, log);
  write(output(config, kModelLabels), write_label_matrix(labels), log);
  write(output(config, kSplit), labeling::write_split(result), log);
  log << "rows: " << labels.rows() << ", categories: " << labels.cols()
      << ", train/validation/test: " << result.split.train.size() << "/"
      << result.split.validation.size() << "/" << result.split.test.size() << "\n";
}

void cmd_train(const PipelineConfig& config, std::ostream& log) {
  echo("train", config, log);
  const auto source = source_of(config);
  const auto split = load_split(config);
  LabelMatrix train_labels;
  std::map<std::string, std::string> texts;
  if (config.use_augmented) {
    if (source != FeatureSource::kTfidf) {
      throw UsageError("train.use_augmented needs features.source = \"tfidf\"");
    }
    train_labels = read_label_matrix(read_artifact(config, kAugmentedLabels, "augment"),
                                     config.label_mode == "distrib");
    texts = textfeat::read_texts(read_artifact(config, kAugmentedTexts, "augment"));
  } else {
    train_labels = rows_for(load_model_labels(config), split.train, "train");
    if (source == FeatureSource::kTfidf) texts = store_texts(load_store(config));
  }
  if (train_labels.rows() == 0) throw DataError("the train split is empty");

  FeatureBuilder builder(config, source, std::move(texts));
  builder.fit(train_labels.ad_ids);
  const auto features = builder.build(train_labels.ad_ids);

  auto train_config = model::TrainConfig::defaults_for(source);
  train_config.epochs = config.epochs;
  train_config.batch_size = config.batch_size;
  if (config.learning_rate > 0.0) train_config.initial_learning_rate = config.learning_rate;
  train_config.seed = stage_seed("train", config.seed);
  auto result = model::train(features, train_labels, train_config);

  model::ModelBundle bundle;
  bundle.thresholds = model::ThresholdVector::uniform(result.head.labels());
  bundle.head = std::move(result.head);
  bundle.vocabulary = builder.vocabulary();
  bundle.epoch_loss = result.epoch_loss;

  std::string log_csv = csv::join_row({"epoch", "loss"});
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    log_csv += csv::join_row({std::to_string(e + 1), format_double(result.epoch_loss[e])});
  }
  write(output(config, kModel), model::save_model(bundle), log);
  write(output(config, kTrainingLog), log_csv, log);
  log << "trained on " << train_labels.rows() << " ads, dimension " << bundle.head.dimension
      << ", learning rate " << format_double(train_config.initial_learning_rate)
      << ", final loss " << format_double(result.epoch_loss.back()) << "\n";
}

void cmd_calibrate(const PipelineConfig& config, const fs::path& model, std::ostream& log) {
  echo("calibrate", config, log);
  auto bundle = load_bundle(config, model);
  const auto split = load_split(config);
  const auto labels = majority(rows_for(load_model_labels(config), split.validation, "validation"));
  if (labels.category_ids != bundle.head.category_ids) {
    throw DataError("model categories do not match " + std::string(kModelLabels));
  }
  std::map<std::string, std::string> texts;
  if (bundle.head.feature_source == FeatureSource::kTfidf) texts = store_texts(load_store(config));
  const auto builder = builder_for(config, bundle, std::move(texts));
  const auto features = builder.build(labels.ad_ids);
  const auto result = model::calibrate_thresholds(
      bundle.head, features, labels, {config.precision_target, config.grid_step});
  warn_all(result.warnings, log);
  bundle.thresholds = result.thresholds;

  std::string table = csv::join_row(
      {"category", "threshold", "precision", "recall", "met_target", "no_positives"});
  for (const auto& c : result.categories) {
    table += csv::join_row({c.category_id, format_double(c.threshold), format_double(c.precision),
                            format_double(c.recall), c.met_target ? "true" : "false",
                            c.no_positives ? "true" : "false"});
  }
  const auto path = model_path(config, model);
  write(path, model::save_model(bundle), log);
  write(output(config, kCalibration), table, log);
}

void cmd_evaluate(const PipelineConfig& config, const fs::path& model, std::ostream& log) {
  echo("evaluate", config, log);
  const auto bundle = load_bundle(config, model);
  const auto split = load_split(config);
  const auto gold = majority(rows_for(load_model_labels(config), split.test, "test"));
  if (gold.category_ids != bundle.head.category_ids) {
    throw DataError("model categories do not match " + std::string(kModelLabels));
  }
  std::map<std::string, std::string> texts;
  if (bundle.head.feature_source == FeatureSource::kTfidf) texts = store_texts(load_store(config));
  const auto builder = builder_for(config, bundle, std::move(texts));
  const auto pred = predict_matrix(bundle, builder.build(gold.ad_ids), gold.ad_ids);
  const auto report = evaluation::classification_report(gold, pred);
  write(output(config, kReportCsv), evaluation::render_report(report, evaluation::ReportFormat::kCsv), log);
  write(output(config, kReportJson), evaluation::render_report(report, evaluation::ReportFormat::kJson), log);
  const auto md = evaluation::render_report(report, evaluation::ReportFormat::kMarkdown);
  write(output(config, kReportMarkdown), md, log);
  log << md;
}

void cmd_agreement(const PipelineConfig& config, std::ostream& log) {
  echo("agreement", config, log);
  const auto gold = read_label_matrix(read_file(require_input(config.paths.gold, "paths.gold").string()));
  const auto crowd = read_label_matrix(read_artifact(config, labels_file("vm"), "aggregate --mode vm"));
  const auto report = agreement::subgroup_kappa(gold, crowd, config.complexity_threshold);
  const auto versus = agreement::gold_vs_crowd_report(gold, crowd);
  const auto aligned = agreement::align(gold, crowd);
  write(output(config, kAgreementCsv), agreement::render_agreement_csv(report), log);
  const auto text = agreement::render_agreement_text(report);
  write(output(config, kAgreementText), text, log);
  write(output(config, kGoldVsCrowd), evaluation::render_report(versus, evaluation::ReportFormat::kCsv), log);
  write(output(config, kCooccurrence),
        agreement::render_cooccurrence_csv(agreement::cooccurrence(aligned.reference)), log);
  log << text;
}

void cmd_augment(const PipelineConfig& config, std::ostream& log) {
  echo("augment", config, log);
  const auto split = load_split(config);
  const auto train_labels = rows_for(load_model_labels(config), split.train, "train");
  const auto texts = store_texts(load_store(config));
  const auto translator = textfeat::make_translator(config.translator, config.translator_timeout);

  textfeat::AugmentPlan plan;
  plan.fraction = config.augment_fraction;
  plan.source_language = config.source_language;
  plan.pivot_language = config.pivot_language;
  plan.seed = stage_seed("augment", config.seed);
  plan.max_in_flight = config.max_in_flight;
  plan.retries = config.retries;
  const auto result = textfeat::augment_dataset(train_labels, texts, plan, *translator);

  ordered_json report;
  report["translator"] = config.translator;
  report["train_rows"] = train_labels.rows();
  report["synthetic_rows"] = result.synthetic_ids.size();
  report["dropped_identical"] = result.dropped_identical;
  ordered_json failures = ordered_json::array();
  for (const auto& f : result.failures) {
    log << "warning: translation failed for '" << f.ad_id << "': " << f.message << "\n";
    failures.push_back({{"ad_id", f.ad_id}, {"message", f.message}});
  }
  report["failures"] = std::move(failures);
  write(output(config, kAugmentedTexts), textfeat::write_texts(result.texts), log);
  write(output(config, kAugmentedLabels), write_label_matrix(result.matrix), log);
  write(output(config, kAugmentReport), report.dump(2) + "\n", log);
  log << "rows: " << train_labels.rows() << " -> " << result.matrix.rows() << "\n";
}

void cmd_predict(const PipelineConfig& config, const fs::path& model, std::ostream& log) {
  echo("predict", config, log);
  const auto bundle = load_bundle(config, model);
  const auto ads = load_store(config);
  std::vector<std::string> ids;
  for (const auto& ad : ads) ids.push_back(ad.ad_id);
  std::sort(ids.begin(), ids.end());
  std::map<std::string, std::string> texts;
  if (bundle.head.feature_source == FeatureSource::kTfidf) texts = store_texts(ads);
  const auto builder = builder_for(config, bundle, std::move(texts));
  const auto features = builder.build(ids);

  attention::PredictionSet preds;
  std::vector<std::string> header{"ad_id"};
  header.insert(header.end(), bundle.head.category_ids.begin(), bundle.head.category_ids.end());
  std::string probabilities = csv::join_row(header);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto p = model::predict(bundle.head, features[r], bundle.thresholds);
    preds[ids[r]] = std::set<std::string>(p.labels.begin(), p.labels.end());
    std::vector<std::string> fields{ids[r]};
    for (const double v : p.probabilities) fields.push_back(format_double(v));
    probabilities += csv::join_row(fields);
  }
  const auto stats = attention::coverage_stats(preds, ids);
  write(output(config, kPredictions), attention::write_predictions(preds), log);
  write(output(config, kProbabilities), probabilities, log);
  log << "predicted " << ids.size() << " ads; with a label: " << stats.with_any
      << ", with several: " << stats.with_multiple << "\n";
}

void cmd_analyze(const PipelineConfig& config, std::string_view dimension, const fs::path& model,
                 std::ostream& log) {
  if (dimension != "candidate" && dimension != "gender" && dimension != "age" &&
      dimension != "region") {
    throw UsageError("unknown dimension '" + std::string(dimension) +
                     "' (expected candidate, gender, age or region)");
  }
  echo("analyze", config, log);
  const auto& book = load_codebook(config);
  const auto bundle = load_bundle(config, model);
  const auto& order = bundle.head.category_ids;
  const auto preds = attention::read_predictions(read_artifact(config, kPredictions, "predict"));
  attention::validate_predictions(preds, book);
  const auto ads = load_store(config);
  std::vector<std::string> universe;
  for (const auto& ad : ads) universe.push_back(ad.ad_id);
  std::sort(universe.begin(), universe.end());
  write(output(config, kCoverage),
        attention::render_coverage_json(attention::coverage_stats(preds, universe)), log);

  if (dimension == "candidate") {
    const auto aliases =
        ingest::load_aliases(read_file(require_input(config.paths.aliases, "paths.aliases").string()));
    const auto table = attention::candidate_attention(ads, preds, aliases, order);
    warn_all(table.warnings, log);
    write(output(config, "attention_candidate.csv"), attention::render_candidate_csv(table), log);
    const auto md = attention::render_candidate_markdown(table, &book);
    write(output(config, "attention_candidate.md"), md, log);
    log << md;
    return;
  }
  const auto axis = attention::parse_axis(dimension);
  const auto table = attention::demographic_exposure(ads, preds, axis, order);
  warn_all(table.warnings, log);
  const auto base = attention::baseline(ads, preds, axis);
  const auto flags = attention::flag_exposure(table, base, config.rho);
  const std::string stem = "exposure_" + std::string(dimension);
  write(output(config, stem + ".csv"), attention::render_exposure_csv(table, base), log);
  const auto md = attention::render_exposure_markdown(table, base, flags, &book);
  write(output(config, stem + ".md"), md, log);
  write(output(config, "flags_" + std::string(dimension) + ".csv"),
        attention::render_flags_csv(table, base, flags), log);
  log << md;
}

void cmd_report(const PipelineConfig& config, std::ostream& log) {
  echo("report", config, log);
  std::ostringstream md;
  md << "# PolicyScope run summary\n\nSeed: " << config.seed << "\n";
  const auto section = [&](std::string_view title, std::string_view name, bool fenced) {
    md << "\n## " << title << "\n\n";
    const auto path = artifact(config, name);
    if (!fs::is_regular_file(path)) {
      md << "_not produced (" << name << " missing)_\n";
      return;
    }
    const auto body = read_file(path.string());
    if (fenced) {
      md << "```\n" << body << (body.ends_with('\n') ? "" : "\n") << "```\n";
    } else {
      md << body;
    }
  };
  section("Corpus", kCorpusTotals, true);
  section("Annotations", kAggregateReport, true);
  md << "\n## Split\n\n";
  if (fs::is_regular_file(artifact(config, kSplit))) {
    const auto split = load_split(config);
    md << "train " << split.train.size() << ", validation " << split.validation.size()
       << ", test " << split.test.size() << "\n";
  } else {
    md << "_not produced (" << kSplit << " missing)_\n";
  }
  section("Training loss", kTrainingLog, true);
  section("Calibration", kCalibration, true);
  section("Evaluation (test split)", kReportMarkdown, false);
  section("Coverage", kCoverage, true);
  section("Agreement", kAgreementText, true);
  section("Augmentation", kAugmentReport, true);
  section("Candidate attention", "attention_candidate.md", false);
  for (const std::string axis : {"gender", "age", "region"}) {
    section("Exposure by " + axis, "exposure_" + axis + ".md", false);
  }
  write(output(config, kSummary), md.str(), log);
}

}  // namespace policyscope::pipeline
