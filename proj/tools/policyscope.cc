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

// policyscope: command-line front end for the pipeline stages.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "policyscope/config.h"
#include "policyscope/error.h"
#include "policyscope/pipeline.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Options {
  std::string config_path;
  std::string seed;
  std::string out;
  std::string mode;
  std::string gold;
  std::string language;
  std::string model;
  std::string dimension;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "Pipeline config file (TOML-style)");
  cmd->add_option("--seed", o.seed, "Global seed (unsigned 64-bit)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--set", o.overrides, "Config override section.key=value (repeatable)");
}

std::vector<std::string> overrides_of(const Options& o) {
  std::vector<std::string> out = o.overrides;
  if (!o.seed.empty()) out.push_back("seed=" + o.seed);
  if (!o.out.empty()) out.push_back("paths.out=" + o.out);
  if (!o.mode.empty()) out.push_back("labeling.mode=" + o.mode);
  if (!o.gold.empty()) out.push_back("paths.gold=" + o.gold);
  if (!o.language.empty()) out.push_back("ingest.language=" + o.language);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PolicyScope: policy-topic classification and attention analytics for political ads"};
  app.require_subcommand(1);
  Options o;

  const auto sub = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, o);
    return cmd;
  };
  auto* ingest = sub("ingest", "Parse, filter and deduplicate ad records");
  ingest->add_option("--lang", o.language, "Language filter");
  auto* aggregate = sub("aggregate", "Aggregate crowd votes into a label matrix");
  aggregate->add_option("--mode", o.mode, "vm or distrib");
  auto* split = sub("split", "Group, restrict to the subset and split train/validation/test");
  split->add_option("--mode", o.mode, "vm or distrib");
  auto* train = sub("train", "Train the classifier head");
  train->add_option("--mode", o.mode, "vm or distrib");
  auto* calibrate = sub("calibrate", "Calibrate per-category thresholds on the validation split");
  auto* evaluate = sub("evaluate", "Score the model on the test split");
  for (auto* cmd : {calibrate, evaluate}) {
    cmd->add_option("--mode", o.mode, "vm or distrib");
    cmd->add_option("--model", o.model, "Model file (default <out>/model.json)");
  }
  auto* agreement = sub("agreement", "Cohen's kappa between gold and crowd labels");
  agreement->add_option("--gold", o.gold, "Gold label matrix CSV");
  auto* augment = sub("augment", "Back-translation augmentation of the train split");
  augment->add_option("--mode", o.mode, "vm or distrib");
  auto* predict = sub("predict", "Predict labels for every ingested ad");
  predict->add_option("--model", o.model, "Model file (default <out>/model.json)");
  auto* analyze = sub("analyze", "Attention and exposure tables");
  analyze->add_option("--dimension", o.dimension, "candidate, gender, age or region")->required();
  analyze->add_option("--model", o.model, "Model file (default <out>/model.json)");
  auto* report = sub("report", "Collect artifacts into summary.md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  namespace pl = policyscope::pipeline;
  try {
    const auto config = policyscope::config::load(o.config_path, overrides_of(o));
    const std::filesystem::path model = o.model;
    auto& log = std::cout;
    if (ingest->parsed()) pl::cmd_ingest(config, log);
    if (aggregate->parsed()) pl::cmd_aggregate(config, log);
    if (split->parsed()) pl::cmd_split(config, log);
    if (train->parsed()) pl::cmd_train(config, log);
    if (calibrate->parsed()) pl::cmd_calibrate(config, model, log);
    if (evaluate->parsed()) pl::cmd_evaluate(config, model, log);
    if (agreement->parsed()) pl::cmd_agreement(config, log);
    if (augment->parsed()) pl::cmd_augment(config, log);
    if (predict->parsed()) pl::cmd_predict(config, model, log);
    if (analyze->parsed()) pl::cmd_analyze(config, o.dimension, model, log);
    if (report->parsed()) pl::cmd_report(config, log);
  } catch (const policyscope::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
