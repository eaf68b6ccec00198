/* Copyright 2026 The VISOR Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "visor/report.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "visor/error.h"

namespace visor {
namespace {

using OrderedJson = nlohmann::ordered_json;

struct Cell {
  std::string display;
  std::optional<double> value;  // numeric cells only
};

Cell Text(std::string s) { return {std::move(s), std::nullopt}; }
Cell Count(std::size_t n) {
  return {std::to_string(n), static_cast<double>(n)};
}
Cell Percent(std::optional<double> v) {
  if (!v) return {};
  return {FormatPercent(*v), *v};
}

Cell Number(std::optional<double> v, const char* fmt) {
  if (!v) return {};
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, *v);
  return {buf, *v};
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::size_t>> footer;
};

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Render(const Table& table, TableFormat format) {
  std::ostringstream out;
  switch (format) {
    case TableFormat::kCsv: {
      auto line = [&](const auto& cells, auto get) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (i) out << ',';
          out << CsvField(get(cells[i]));
        }
        out << '\n';
      };
      line(table.header, [](const std::string& s) { return s; });
      for (const auto& row : table.rows) {
        line(row, [](const Cell& c) { return c.display; });
      }
      for (const auto& [name, n] : table.footer) {
        out << "# " << name << ": " << n << '\n';
      }
      break;
    }
    case TableFormat::kMarkdown: {
      auto line = [&](const auto& cells, auto get) {
        out << '|';
        for (const auto& c : cells) out << ' ' << get(c) << " |";
        out << '\n';
      };
      line(table.header, [](const std::string& s) { return s; });
      out << '|';
      for (std::size_t i = 0; i < table.header.size(); ++i) out << " --- |";
      out << '\n';
      for (const auto& row : table.rows) {
        line(row, [](const Cell& c) { return c.display; });
      }
      if (!table.footer.empty()) out << '\n';
      for (const auto& [name, n] : table.footer) {
        out << name << ": " << n << '\n';
      }
      break;
    }
    case TableFormat::kJson: {
      for (const auto& row : table.rows) {
        OrderedJson record;
        for (std::size_t i = 0; i < row.size(); ++i) {
          const Cell& c = row[i];
          if (!c.value) {
            record[table.header[i]] =
                c.display.empty() ? OrderedJson(nullptr) : OrderedJson(c.display);
          } else {
            record[table.header[i]] = {{"value", *c.value},
                                       {"display", c.display}};
          }
        }
        out << record.dump() << '\n';
      }
      for (const auto& [name, n] : table.footer) {
        OrderedJson record;
        record[name] = n;
        out << record.dump() << '\n';
      }
      break;
    }
  }
  return out.str();
}

std::vector<std::string> SummaryHeader(std::size_t n_images) {
  std::vector<std::string> header = {"prompts", "images", "oa",
                                     "visor_uncond", "visor_cond"};
  for (std::size_t n = 1; n <= n_images; ++n) {
    header.push_back("visor_" + std::to_string(n));
  }
  return header;
}

void AppendSummary(const MetricsSummary& s, std::vector<Cell>& row) {
  row.push_back(Count(s.prompts));
  row.push_back(Count(s.images));
  row.push_back(Percent(s.oa_pct));
  row.push_back(Percent(s.visor_uncond_pct));
  row.push_back(Percent(s.visor_cond_pct));
  for (double v : s.visor_n_pct) row.push_back(Percent(v));
}

OrderedJson PercentJson(std::optional<double> v) {
  if (!v) return nullptr;
  return {{"value", *v}, {"display", FormatPercent(*v)}};
}

OrderedJson SummaryJson(const MetricsSummary& s) {
  OrderedJson out;
  out["prompts"] = s.prompts;
  out["images"] = s.images;
  out["oa"] = PercentJson(s.oa_pct);
  out["visor_uncond"] = PercentJson(s.visor_uncond_pct);
  out["visor_cond"] = PercentJson(s.visor_cond_pct);
  auto& visor_n = out["visor_n"] = OrderedJson::array();
  for (double v : s.visor_n_pct) visor_n.push_back(PercentJson(v));
  return out;
}

OrderedJson SplitJson(const std::map<std::string, MetricsSummary>& split) {
  OrderedJson out = OrderedJson::object();
  for (const auto& [k, s] : split) out[k] = SummaryJson(s);
  return out;
}

std::string FormatThreshold(double t) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << t;
  return out.str();
}

}  // namespace

std::string FormatPercent(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::optional<TableFormat> ParseTableFormat(std::string_view name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "json") return TableFormat::kJson;
  if (name == "markdown" || name == "md") return TableFormat::kMarkdown;
  return std::nullopt;
}

std::string_view TableFormatExtension(TableFormat format) {
  switch (format) {
    case TableFormat::kCsv:
      return "csv";
    case TableFormat::kJson:
      return "jsonl";
    case TableFormat::kMarkdown:
      return "md";
  }
  return "";
}

RunReport BuildReport(std::span<const PromptGroup> groups,
                      const Vocabulary& vocabulary, const RunMetadata& metadata,
                      const Coverage& coverage) {
  if (metadata.corpus_id.empty() || metadata.detector_id.empty()) {
    throw ValidationError("report metadata needs corpus and detector ids");
  }
  RunReport report;
  report.metadata = metadata;
  report.metadata.images_per_prompt = ImagesPerPrompt(groups);
  report.overall = Summarize(groups);
  report.by_relation = SplitMetrics(groups, SplitKey::kRelation, vocabulary);
  report.by_supercategory =
      SplitMetrics(groups, SplitKey::kSupercategoryPair, vocabulary);
  report.supercategories = vocabulary.supercategories();
  report.by_variant = SplitMetrics(groups, SplitKey::kVariant, vocabulary);
  report.presence = ObjectPositionPresence(groups);
  ConsistencyResult consistency = Consistency(groups);
  if (!consistency.pct.empty()) report.consistency = std::move(consistency);
  report.coverage = coverage;
  return report;
}

std::string EmitBenchmarkTable(const RunReport& report, TableFormat format) {
  Table table;
  table.header = {"split", "bucket"};
  for (auto& h : SummaryHeader(report.overall.visor_n_pct.size())) {
    table.header.push_back(std::move(h));
  }
  std::vector<Cell> overall = {Text("overall"), Text("all")};
  AppendSummary(report.overall, overall);
  table.rows.push_back(std::move(overall));

  std::size_t omitted = 0;
  for (Relation r : kAllRelations) {
    auto it = report.by_relation.find(std::string(RelationName(r)));
    if (it == report.by_relation.end() || it->second.prompts == 0) {
      ++omitted;
      continue;
    }
    std::vector<Cell> row = {Text("relation"), Text(it->first)};
    AppendSummary(it->second, row);
    table.rows.push_back(std::move(row));
  }
  if (omitted > 0) table.footer.emplace_back("omitted_empty_buckets", omitted);
  return Render(table, format);
}

std::string EmitSupercategoryMatrix(const RunReport& report) {
  if (report.supercategories.empty()) {
    throw ValidationError("report has no supercategory axis");
  }
  Table table;
  table.header.push_back("supercategory");
  for (const auto& s : report.supercategories) table.header.push_back(s);
  for (std::size_t i = 0; i < report.supercategories.size(); ++i) {
    std::vector<Cell> row = {Text(report.supercategories[i])};
    for (std::size_t j = 0; j < report.supercategories.size(); ++j) {
      const auto& a = report.supercategories[std::min(i, j)];
      const auto& b = report.supercategories[std::max(i, j)];
      auto it = report.by_supercategory.find(a + "|" + b);
      row.push_back(it == report.by_supercategory.end()
                        ? Cell{}
                        : Percent(it->second.visor_uncond_pct));
    }
    table.rows.push_back(std::move(row));
  }
  return Render(table, TableFormat::kCsv);
}

std::string EmitConsistencyTable(const ConsistencyResult& result,
                                 TableFormat format) {
  Table table;
  std::vector<Cell> row;
  for (Relation r : kAllRelations) {
    table.header.emplace_back(RelationName(r));
    auto it = result.pct.find(r);
    row.push_back(it == result.pct.end() ? Cell{} : Percent(it->second));
  }
  table.header.emplace_back("average");
  row.push_back(Percent(result.average_pct));
  table.rows.push_back(std::move(row));
  return Render(table, format);
}

std::string EmitObjectBiasTable(const RunReport& report, TableFormat format) {
  Table table;
  table.header = {"measure", "images", "value"};
  const ObjectPresence& p = report.presence;
  if (p.images > 0) {
    table.rows.push_back({Text("object_a_present"), Count(p.images),
                          Percent(p.a_pct)});
    table.rows.push_back({Text("object_b_present"), Count(p.images),
                          Percent(p.b_pct)});
    table.rows.push_back({Text("both_present"), Count(p.images),
                          Percent(p.both_pct)});
  }
  for (const auto& [variant, s] : report.by_variant) {
    table.rows.push_back({Text("oa:" + variant), Count(s.images),
                          Percent(s.oa_pct)});
  }
  return Render(table, format);
}

std::string EmitDeltaSTable(std::span<const DeltaSRow> rows,
                            TableFormat format) {
  Table table;
  table.header = {"bucket", "records", "delta_s"};
  for (const DeltaSRow& r : rows) {
    table.rows.push_back(
        {Text(r.bucket), Count(r.records), Number(r.delta_s, "%.6f")});
  }
  return Render(table, format);
}

std::string EmitCorrelationTable(const CorrelationResult& result,
                                 TableFormat format) {
  Table table;
  table.header = {"metric", "pairs", "pearson_r"};
  table.rows.push_back(
      {Text("oa"), Count(result.pairs), Number(result.oa_r, "%.4f")});
  table.rows.push_back({Text("visor_cond"), Count(result.cond_pairs),
                        Number(result.visor_cond_r, "%.4f")});
  return Render(table, format);
}

std::string EmitReportJson(const RunReport& report) {
  OrderedJson out;
  out["metadata"] = {{"corpus_id", report.metadata.corpus_id},
                     {"detector_id", report.metadata.detector_id},
                     {"threshold", report.metadata.threshold},
                     {"images_per_prompt", report.metadata.images_per_prompt}};
  out["overall"] = SummaryJson(report.overall);
  out["by_relation"] = SplitJson(report.by_relation);
  out["by_supercategory"] = SplitJson(report.by_supercategory);
  out["by_variant"] = SplitJson(report.by_variant);
  out["object_presence"] = {{"images", report.presence.images},
                            {"object_a", PercentJson(report.presence.a_pct)},
                            {"object_b", PercentJson(report.presence.b_pct)},
                            {"both", PercentJson(report.presence.both_pct)}};
  if (report.consistency) {
    OrderedJson c;
    for (const auto& [r, pct] : report.consistency->pct) {
      c[std::string(RelationName(r))] = {
          {"pairs", report.consistency->pairs.at(r)},
          {"consistency", PercentJson(pct)}};
    }
    c["average"] = PercentJson(report.consistency->average_pct);
    out["consistency"] = std::move(c);
  }
  if (report.delta_s) out["delta_s"] = *report.delta_s;
  if (report.correlation) {
    const CorrelationResult& c = *report.correlation;
    out["correlation"] = {
        {"pairs", c.pairs},
        {"oa_r", c.oa_r},
        {"cond_pairs", c.cond_pairs},
        {"visor_cond_r",
         c.visor_cond_r ? OrderedJson(*c.visor_cond_r) : OrderedJson(nullptr)}};
  }
  out["coverage"] = {{"expected_images", report.coverage.expected_images},
                     {"missing_images", report.coverage.missing_images},
                     {"unknown_records", report.coverage.unknown_records},
                     {"warnings", report.coverage.warnings}};
  return out.dump(2) + "\n";
}

std::map<double, MetricsSummary> ThresholdSweep(
    std::span<const Prompt> corpus, std::span<const ImageDetections> detections,
    std::span<const double> thresholds, int images_per_prompt) {
  if (thresholds.empty()) throw ValidationError("sweep needs thresholds");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) {
      throw ValidationError("sweep thresholds must be in [0, 1]");
    }
    if (i > 0 && thresholds[i] <= thresholds[i - 1]) {
      throw ValidationError("sweep thresholds must be strictly ascending");
    }
  }
  std::map<double, MetricsSummary> out;
  for (double t : thresholds) {
    RunEvaluation run = EvaluateRun(corpus, detections, {t, images_per_prompt});
    out.emplace(t, Summarize(run.groups));
  }
  return out;
}

std::string EmitSweepTable(const std::map<double, MetricsSummary>& sweep,
                           TableFormat format) {
  if (sweep.empty()) throw ValidationError("empty sweep");
  Table table;
  table.header = {"threshold"};
  for (auto& h : SummaryHeader(sweep.begin()->second.visor_n_pct.size())) {
    table.header.push_back(std::move(h));
  }
  for (const auto& [t, s] : sweep) {
    std::vector<Cell> row = {Cell{FormatThreshold(t), t}};
    AppendSummary(s, row);
    table.rows.push_back(std::move(row));
  }
  return Render(table, format);
}

}  // namespace visor
