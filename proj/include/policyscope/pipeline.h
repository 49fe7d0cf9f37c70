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

// Pipeline stages. Each command reads and writes files under the
// configured output directory, echoes the effective configuration and its
// stage seed to `log`, and throws the library's exceptions on failure.

#ifndef POLICYSCOPE_PIPELINE_H_
#define POLICYSCOPE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string_view>

#include "policyscope/config.h"

namespace policyscope::pipeline {

// Artifact file names inside the output directory.
inline constexpr std::string_view kAdStore = "ads.ndjson";
inline constexpr std::string_view kCorpusTotals = "corpus_totals.json";
inline constexpr std::string_view kIngestReport = "ingest_report.json";
inline constexpr std::string_view kDailyReports = "daily_reports.csv";
inline constexpr std::string_view kAggregateReport = "aggregate_report.json";
inline constexpr std::string_view kModelLabels = "model_labels.csv";
inline constexpr std::string_view kSplit = "split.json";
inline constexpr std::string_view kModel = "model.json";
inline constexpr std::string_view kTrainingLog = "training_log.csv";
inline constexpr std::string_view kCalibration = "calibration.csv";
inline constexpr std::string_view kReportCsv = "report.csv";
inline constexpr std::string_view kReportJson = "report.json";
inline constexpr std::string_view kReportMarkdown = "report.md";
inline constexpr std::string_view kPredictions = "predictions.csv";
inline constexpr std::string_view kProbabilities = "probabilities.csv";
inline constexpr std::string_view kCoverage = "coverage.json";
inline constexpr std::string_view kAugmentedTexts = "augmented_texts.jsonl";
inline constexpr std::string_view kAugmentedLabels = "augmented_labels.csv";
inline constexpr std::string_view kAugmentReport = "augment_report.json";
inline constexpr std::string_view kAgreementCsv = "agreement.csv";
inline constexpr std::string_view kAgreementText = "agreement.txt";
inline constexpr std::string_view kGoldVsCrowd = "gold_vs_crowd.csv";
inline constexpr std::string_view kCooccurrence = "cooccurrence.csv";
inline constexpr std::string_view kSummary = "summary.md";

// "labels_vm.csv" or "labels_distrib.csv".
std::string labels_file(std::string_view mode);

// Sub-seed for one stage, derived from the global seed.
std::uint64_t stage_seed(std::string_view stage, std::uint64_t global_seed);

void cmd_ingest(const config::PipelineConfig& config, std::ostream& log);
void cmd_aggregate(const config::PipelineConfig& config, std::ostream& log);
void cmd_split(const config::PipelineConfig& config, std::ostream& log);
void cmd_train(const config::PipelineConfig& config, std::ostream& log);
// An empty model path means <out>/model.json.
void cmd_calibrate(const config::PipelineConfig& config, const std::filesystem::path& model,
                   std::ostream& log);
void cmd_evaluate(const config::PipelineConfig& config, const std::filesystem::path& model,
                  std::ostream& log);
void cmd_agreement(const config::PipelineConfig& config, std::ostream& log);
void cmd_augment(const config::PipelineConfig& config, std::ostream& log);
void cmd_predict(const config::PipelineConfig& config, const std::filesystem::path& model,
                 std::ostream& log);
// dimension: candidate, gender, age or region. Throws UsageError otherwise.
void cmd_analyze(const config::PipelineConfig& config, std::string_view dimension,
                 const std::filesystem::path& model, std::ostream& log);
void cmd_report(const config::PipelineConfig& config, std::ostream& log);

}  // namespace policyscope::pipeline

#endif  // POLICYSCOPE_PIPELINE_H_
