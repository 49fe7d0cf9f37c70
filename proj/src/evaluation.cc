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

#include "policyscope/evaluation.h"

#include "json.hpp"
#include "policyscope/csv.h"
#include "policyscope/error.h"
#include "policyscope/format.h"

namespace policyscope::evaluation {

namespace {

void check_aligned(const LabelMatrix& gold, const LabelMatrix& pred) {
  if (gold.ad_ids != pred.ad_ids) throw DataError("gold and predicted ads differ or are misordered");
  if (gold.category_ids != pred.category_ids) {
    throw DataError("gold and predicted categories differ or are misordered");
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Scores scores_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Scores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  // 2PR/(P+R) == 2TP/(2TP+FP+FN) whenever TP > 0; the count form is exact.
  s.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  return s;
}

std::vector<ClassMetrics> per_class_prf(const LabelMatrix& gold, const LabelMatrix& pred) {
  check_aligned(gold, pred);
  std::vector<ClassMetrics> out;
  for (std::size_t c = 0; c < gold.cols(); ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < gold.rows(); ++r) {
      const bool g = gold.positive(r, c);
      const bool p = pred.positive(r, c);
      tp += (g && p) ? 1 : 0;
      fp += (!g && p) ? 1 : 0;
      fn += (g && !p) ? 1 : 0;
    }
    out.push_back(ClassMetrics{gold.category_ids[c], scores_from_counts(tp, fp, fn), tp + fn});
  }
  return out;
}

Scores micro_average(const LabelMatrix& gold, const LabelMatrix& pred) {
  check_aligned(gold, pred);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    const bool g = gold.entries[i] > 0.0;
    const bool p = pred.entries[i] > 0.0;
    tp += (g && p) ? 1 : 0;
    fp += (!g && p) ? 1 : 0;
    fn += (g && !p) ? 1 : 0;
  }
  return scores_from_counts(tp, fp, fn);
}

Scores samples_average(const LabelMatrix& gold, const LabelMatrix& pred,
                       const SamplesOptions& options) {
  check_aligned(gold, pred);
  Scores sum;
  for (std::size_t r = 0; r < gold.rows(); ++r) {
    std::size_t both = 0, n_gold = 0, n_pred = 0;
    for (std::size_t c = 0; c < gold.cols(); ++c) {
      const bool g = gold.positive(r, c);
      const bool p = pred.positive(r, c);
      both += (g && p) ? 1 : 0;
      n_gold += g ? 1 : 0;
      n_pred += p ? 1 : 0;
    }
    if (n_gold == 0 && n_pred == 0) {
      const double v = options.empty_both_is_perfect ? 1.0 : 0.0;
      sum.precision += v;
      sum.recall += v;
      sum.f1 += v;
      continue;
    }
    sum.precision += ratio(both, n_pred);
    sum.recall += ratio(both, n_gold);
    sum.f1 += ratio(2 * both, n_gold + n_pred);
  }
  if (gold.rows() == 0) return sum;
  const auto n = static_cast<double>(gold.rows());
  return Scores{sum.precision / n, sum.recall / n, sum.f1 / n};
}

ClassReport classification_report(const LabelMatrix& gold, const LabelMatrix& pred,
                                  const SamplesOptions& options) {
  ClassReport report;
  report.per_class = per_class_prf(gold, pred);
  report.micro_avg = micro_average(gold, pred);
  report.samples_avg = samples_average(gold, pred, options);
  for (const auto& m : report.per_class) report.total_support += m.support;
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw UsageError("unknown report format '" + std::string(name) + "'");
}

std::string render_report(const ClassReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv: {
      std::string out = "category,precision,recall,f1,support\n";
      auto row = [&](const std::string& name, const Scores& s, std::size_t support) {
        out += csv::join_row({name, format_double(s.precision), format_double(s.recall),
                              format_double(s.f1), std::to_string(support)});
      };
      for (const auto& m : report.per_class) row(m.category_id, m.scores, m.support);
      row("micro avg", report.micro_avg, report.total_support);
      row("samples avg", report.samples_avg, report.total_support);
      return out;
    }
    case ReportFormat::kJson: {
      nlohmann::ordered_json out;
      out["conventions"] =
          "precision=0 when no predictions; recall=0 when no gold; f1=0 when P+R=0; "
          "samples metrics=1 for ads with empty gold and predicted sets";
      auto scores = [](const Scores& s) {
        return nlohmann::ordered_json{{"precision", s.precision}, {"recall", s.recall},
                                      {"f1", s.f1}};
      };
      nlohmann::ordered_json classes = nlohmann::ordered_json::array();
      for (const auto& m : report.per_class) {
        auto entry = scores(m.scores);
        entry["support"] = m.support;
        classes.push_back({{"category", m.category_id}, {"metrics", entry}});
      }
      out["per_class"] = std::move(classes);
      out["micro_avg"] = scores(report.micro_avg);
      out["samples_avg"] = scores(report.samples_avg);
      out["total_support"] = report.total_support;
      return out.dump(2) + "\n";
    }
    case ReportFormat::kMarkdown: {
      std::string out =
          "<!-- P=0 with no predictions; R=0 with no gold; samples metrics=1 for empty/empty "
          "ads -->\n| category | precision | recall | f1 | support |\n|---|---:|---:|---:|---:|\n";
      auto row = [&](const std::string& name, const Scores& s, std::size_t support) {
        out += "| " + name + " | " + format_fixed(s.precision, 2) + " | " +
               format_fixed(s.recall, 2) + " | " + format_fixed(s.f1, 2) + " | " +
               std::to_string(support) + " |\n";
      };
      for (const auto& m : report.per_class) row(m.category_id, m.scores, m.support);
      row("micro avg", report.micro_avg, report.total_support);
      row("samples avg", report.samples_avg, report.total_support);
      return out;
    }
  }
  return {};
}

ClassReport read_report_csv(std::string_view bytes) {
  const auto records = csv::parse(bytes);
  if (records.empty()) throw SchemaError("empty report");
  const csv::Header header(records.front());
  header.require({"category", "precision", "recall", "f1", "support"});
  ClassReport report;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() < 5) throw DataError("short report row on line " + std::to_string(records[r].line));
    Scores s{parse_double(f[header.at("precision")]), parse_double(f[header.at("recall")]),
             parse_double(f[header.at("f1")])};
    const std::string& name = f[header.at("category")];
    const std::size_t support = parse_uint(f[header.at("support")]);
    if (name == "micro avg") {
      report.micro_avg = s;
      report.total_support = support;
    } else if (name == "samples avg") {
      report.samples_avg = s;
    } else {
      report.per_class.push_back(ClassMetrics{name, s, support});
    }
  }
  return report;
}

}  // namespace policyscope::evaluation
