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
#ifndef VISOR_REPORT_H_
#define VISOR_REPORT_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "visor/detection.h"
#include "visor/evaluation.h"
#include "visor/metrics.h"
#include "visor/sr2d.h"

namespace visor {

struct RunMetadata {
  std::string corpus_id;
  std::string detector_id;
  double threshold = kDefaultThreshold;
  int images_per_prompt = kDefaultImagesPerPrompt;
};

struct RunReport {
  RunMetadata metadata;
  MetricsSummary overall;
  std::map<std::string, MetricsSummary> by_relation;
  std::map<std::string, MetricsSummary> by_supercategory;  // "x|y" keys
  std::vector<std::string> supercategories;  // matrix axis order
  std::map<std::string, MetricsSummary> by_variant;
  ObjectPresence presence;
  std::optional<ConsistencyResult> consistency;
  std::optional<double> delta_s;
  std::optional<CorrelationResult> correlation;
  Coverage coverage;
};

// Throws ValidationError when metadata ids are empty or groups are empty.
RunReport BuildReport(std::span<const PromptGroup> groups,
                      const Vocabulary& vocabulary, const RunMetadata& metadata,
                      const Coverage& coverage);

enum class TableFormat { kCsv, kJson, kMarkdown };

std::optional<TableFormat> ParseTableFormat(std::string_view name);
std::string_view TableFormatExtension(TableFormat format);

// Two-decimal fixed formatting used by every table.
std::string FormatPercent(double value);

// Overall row followed by one row per relation, columns OA, VISOR uncond,
// cond, 1..N. Relations with no prompts are omitted and counted in a footer.
// JSON output is one object per row with raw values and display strings.
std::string EmitBenchmarkTable(const RunReport& report, TableFormat format);

// Symmetric supercategory x supercategory matrix of unconditional VISOR (CSV).
// Cells without prompts are empty.
std::string EmitSupercategoryMatrix(const RunReport& report);

std::string EmitConsistencyTable(const ConsistencyResult& result,
                                 TableFormat format);

// A, B and both-object presence plus OA per prompt variant.
std::string EmitObjectBiasTable(const RunReport& report, TableFormat format);

// Complete report as one JSON document with full-precision values.
std::string EmitReportJson(const RunReport& report);

struct DeltaSRow {
  std::string bucket;
  std::size_t records = 0;
  double delta_s = 0;
};

// Delta_s values shown with 6 decimals.
std::string EmitDeltaSTable(std::span<const DeltaSRow> rows,
                            TableFormat format);

// Correlation coefficients shown with 4 decimals.
std::string EmitCorrelationTable(const CorrelationResult& result,
                                 TableFormat format);

// Re-evaluates the run at each threshold. Thresholds must be ascending and
// within [0, 1].
std::map<double, MetricsSummary> ThresholdSweep(
    std::span<const Prompt> corpus, std::span<const ImageDetections> detections,
    std::span<const double> thresholds, int images_per_prompt);

std::string EmitSweepTable(const std::map<double, MetricsSummary>& sweep,
                           TableFormat format);

}  // namespace visor

#endif  // VISOR_REPORT_H_
