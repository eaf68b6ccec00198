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
#include "visor/evaluation.h"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "prompt_json.h"
#include "visor/error.h"

namespace visor {
namespace {

using OrderedJson = nlohmann::ordered_json;

bool RequireBool(const OrderedJson& record, const char* field,
                 std::size_t line) {
  auto it = record.find(field);
  if (it == record.end()) throw ParseError(line, field, "missing");
  if (!it->is_boolean()) throw ParseError(line, field, "expected a boolean");
  return it->get<bool>();
}

}  // namespace

RunEvaluation EvaluateRun(std::span<const Prompt> corpus,
                          std::span<const ImageDetections> detections,
                          const EvaluationOptions& options) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) {
    throw ValidationError("threshold must be in [0, 1]");
  }
  if (options.images_per_prompt < 1) {
    throw ValidationError("images per prompt must be at least 1");
  }
  const int n = options.images_per_prompt;

  std::unordered_map<std::string, std::size_t> by_id;
  RunEvaluation run;
  run.groups.reserve(corpus.size());
  for (const Prompt& prompt : corpus) {
    if (!by_id.emplace(prompt.id, run.groups.size()).second) {
      throw ValidationError("duplicate prompt id '" + prompt.id + "'");
    }
    run.groups.push_back({prompt, std::vector<ImageEvaluation>(n)});
  }

  // Slot filled flags, one per (group, image).
  std::vector<char> filled(run.groups.size() * static_cast<std::size_t>(n), 0);
  std::map<std::string, std::size_t> unknown;
  for (const ImageDetections& record : detections) {
    auto it = by_id.find(record.prompt_id);
    if (it == by_id.end()) {
      ++unknown[record.prompt_id];
      ++run.coverage.unknown_records;
      continue;
    }
    if (record.image_index < 0 || record.image_index >= n) {
      throw ValidationError("image_index " +
                            std::to_string(record.image_index) +
                            " out of range for prompt '" + record.prompt_id +
                            "' with " + std::to_string(n) + " images");
    }
    const std::size_t slot =
        it->second * static_cast<std::size_t>(n) + record.image_index;
    if (filled[slot]) {
      throw ValidationError("duplicate detections for (" + record.prompt_id +
                            ", " + std::to_string(record.image_index) + ")");
    }
    filled[slot] = 1;
    PromptGroup& group = run.groups[it->second];
    group.evaluations[record.image_index] =
        EvaluateImage(record, group.prompt, options.threshold);
  }

  run.coverage.expected_images = filled.size();
  std::size_t incomplete_prompts = 0;
  for (std::size_t g = 0; g < run.groups.size(); ++g) {
    bool incomplete = false;
    for (int i = 0; i < n; ++i) {
      if (filled[g * n + i]) continue;
      run.groups[g].evaluations[i] = MissingImage(run.groups[g].prompt, i);
      ++run.coverage.missing_images;
      incomplete = true;
    }
    incomplete_prompts += incomplete ? 1 : 0;
  }
  if (run.coverage.missing_images > 0) {
    run.coverage.warnings.push_back(
        std::to_string(run.coverage.missing_images) + " of " +
        std::to_string(run.coverage.expected_images) + " image slots across " +
        std::to_string(incomplete_prompts) +
        " prompts have no detections record; scored as failures");
  }
  for (const auto& [id, count] : unknown) {
    run.coverage.warnings.push_back("unknown prompt_id '" + id + "' (" +
                                    std::to_string(count) +
                                    " records skipped)");
  }
  return run;
}

void WriteEvaluations(std::ostream& out, std::span<const PromptGroup> groups) {
  for (const PromptGroup& group : groups) {
    for (const ImageEvaluation& eval : group.evaluations) {
      OrderedJson record;
      record["prompt_id"] = group.prompt.id;
      record["image_index"] = eval.image_index;
      AppendPromptFields(group.prompt, record);
      record["object_a_present"] = eval.object_a_present;
      record["object_b_present"] = eval.object_b_present;
      record["oa"] = eval.oa;
      auto& relations = record["relations"] = OrderedJson::array();
      for (Relation r : eval.relations_satisfied.ToVector()) {
        relations.push_back(RelationName(r));
      }
      record["visor"] = eval.visor;
      record["missing"] = eval.missing;
      out << record.dump() << '\n';
    }
  }
  if (!out) throw IoError("failed writing evaluation file");
}

std::vector<PromptGroup> ReadEvaluations(std::istream& in,
                                         const Vocabulary& vocabulary) {
  std::vector<PromptGroup> groups;
  std::unordered_map<std::string, std::size_t> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    OrderedJson record;
    try {
      record = OrderedJson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    Prompt prompt = PromptFromJson(record, line_no, vocabulary, "prompt_id");

    ImageEvaluation eval;
    eval.prompt_id = prompt.id;
    auto index = record.find("image_index");
    if (index == record.end() || !index->is_number_integer() ||
        index->get<long long>() < 0) {
      throw ParseError(line_no, "image_index",
                       "expected a non-negative integer");
    }
    eval.image_index = index->get<int>();
    eval.object_a_present = RequireBool(record, "object_a_present", line_no);
    eval.object_b_present = RequireBool(record, "object_b_present", line_no);
    eval.oa = RequireBool(record, "oa", line_no);
    eval.visor = RequireBool(record, "visor", line_no);
    eval.missing = RequireBool(record, "missing", line_no);
    auto relations = record.find("relations");
    if (relations == record.end() || !relations->is_array()) {
      throw ParseError(line_no, "relations", "expected an array");
    }
    for (const auto& r : *relations) {
      auto rel = r.is_string() ? ParseRelation(r.get<std::string>())
                               : std::nullopt;
      if (!rel) throw ParseError(line_no, "relations", "unknown relation");
      eval.relations_satisfied.Insert(*rel);
    }
    if (eval.visor && !eval.oa) {
      throw ParseError(line_no, "visor", "visor requires oa");
    }

    auto [it, inserted] = by_id.emplace(prompt.id, groups.size());
    if (inserted) groups.push_back({std::move(prompt), {}});
    groups[it->second].evaluations.push_back(std::move(eval));
  }

  for (PromptGroup& group : groups) {
    std::sort(group.evaluations.begin(), group.evaluations.end(),
              [](const ImageEvaluation& a, const ImageEvaluation& b) {
                return a.image_index < b.image_index;
              });
    for (std::size_t i = 0; i < group.evaluations.size(); ++i) {
      if (group.evaluations[i].image_index != static_cast<int>(i)) {
        throw ValidationError("prompt '" + group.prompt.id +
                              "' image indices are not 0..N-1");
      }
    }
  }
  ImagesPerPrompt(groups);
  return groups;
}

int ImagesPerPrompt(std::span<const PromptGroup> groups) {
  if (groups.empty()) throw ValidationError("no prompt groups");
  const std::size_t n = groups.front().evaluations.size();
  if (n == 0) throw ValidationError("prompt groups have no images");
  for (const PromptGroup& g : groups) {
    if (g.evaluations.size() != n) {
      throw ValidationError("prompt '" + g.prompt.id + "' has " +
                            std::to_string(g.evaluations.size()) +
                            " images, expected " + std::to_string(n));
    }
  }
  return static_cast<int>(n);
}

}  // namespace visor
