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
#include "visor/detection.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "visor/error.h"

namespace visor {
namespace {

using Json = nlohmann::json;

double RequireNumber(const Json& value, std::size_t line,
                     const std::string& field) {
  if (!value.is_number()) throw ParseError(line, field, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ParseError(line, field, "not finite");
  return x;
}

Detection ParseDetection(const Json& item, std::size_t line,
                         const std::string& prefix) {
  if (!item.is_object()) throw ParseError(line, prefix, "expected an object");
  Detection d;

  auto label = item.find("label");
  if (label == item.end()) throw ParseError(line, prefix + ".label", "missing");
  if (!label->is_string()) {
    throw ParseError(line, prefix + ".label", "expected a string");
  }
  d.label = label->get<std::string>();

  auto score = item.find("score");
  if (score == item.end()) throw ParseError(line, prefix + ".score", "missing");
  d.score = RequireNumber(*score, line, prefix + ".score");
  if (d.score < 0.0 || d.score > 1.0) {
    throw ParseError(line, prefix + ".score", "out of range [0, 1]");
  }

  auto box = item.find("box");
  if (box == item.end()) throw ParseError(line, prefix + ".box", "missing");
  if (!box->is_array() || box->size() != 4) {
    throw ParseError(line, prefix + ".box",
                     "expected [x_min, y_min, x_max, y_max]");
  }
  d.box = {RequireNumber((*box)[0], line, prefix + ".box"),
           RequireNumber((*box)[1], line, prefix + ".box"),
           RequireNumber((*box)[2], line, prefix + ".box"),
           RequireNumber((*box)[3], line, prefix + ".box")};
  if (!d.box.IsValid()) {
    throw ParseError(line, prefix + ".box",
                     "need 0 <= x_min < x_max and 0 <= y_min < y_max");
  }
  return d;
}

}  // namespace

bool BoundingBox::IsValid() const {
  for (double v : {x_min, y_min, x_max, y_max}) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return x_min < x_max && y_min < y_max;
}

Point Centroid(const BoundingBox& box) {
  return {(box.x_min + box.x_max) / 2.0, (box.y_min + box.y_max) / 2.0};
}

DetectionReader::DetectionReader(std::istream& in,
                                 std::optional<int> images_per_prompt)
    : in_(in), images_per_prompt_(images_per_prompt) {}

std::optional<ImageDetections> DetectionReader::Next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;

    Json record;
    try {
      record = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(line_, "", std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(line_, "", "expected an object");

    ImageDetections out;
    auto id = record.find("prompt_id");
    if (id == record.end()) throw ParseError(line_, "prompt_id", "missing");
    if (!id->is_string() || id->get_ref<const std::string&>().empty()) {
      throw ParseError(line_, "prompt_id", "expected a nonempty string");
    }
    out.prompt_id = id->get<std::string>();

    auto index = record.find("image_index");
    if (index == record.end()) throw ParseError(line_, "image_index", "missing");
    if (!index->is_number_integer() || index->get<std::int64_t>() < 0 ||
        index->get<std::int64_t>() > std::numeric_limits<int>::max()) {
      throw ParseError(line_, "image_index", "expected a non-negative integer");
    }
    out.image_index = index->get<int>();
    if (images_per_prompt_ && out.image_index >= *images_per_prompt_) {
      throw ParseError(line_, "image_index",
                       "must be below images-per-prompt " +
                           std::to_string(*images_per_prompt_));
    }

    auto detections = record.find("detections");
    if (detections == record.end()) {
      throw ParseError(line_, "detections", "missing");
    }
    if (!detections->is_array()) {
      throw ParseError(line_, "detections", "expected an array");
    }
    out.detections.reserve(detections->size());
    for (std::size_t i = 0; i < detections->size(); ++i) {
      out.detections.push_back(ParseDetection(
          (*detections)[i], line_, "detections[" + std::to_string(i) + "]"));
    }

    auto read_extent = [&](const char* field, std::optional<double>& dst) {
      auto it = record.find(field);
      if (it == record.end() || it->is_null()) return;
      const double v = RequireNumber(*it, line_, field);
      if (v <= 0.0) throw ParseError(line_, field, "must be positive");
      dst = v;
    };
    read_extent("image_width", out.image_width);
    read_extent("image_height", out.image_height);

    std::string key = out.prompt_id + '\n' + std::to_string(out.image_index);
    if (!keys_.insert(std::move(key)).second) {
      throw ParseError(line_, "image_index",
                       "duplicate key (" + out.prompt_id + ", " +
                           std::to_string(out.image_index) + ")");
    }
    return out;
  }
  return std::nullopt;
}

std::vector<ImageDetections> ParseDetections(
    std::istream& in, std::optional<int> images_per_prompt) {
  DetectionReader reader(in, images_per_prompt);
  std::vector<ImageDetections> records;
  while (auto record = reader.Next()) records.push_back(std::move(*record));
  return records;
}

std::string DetectionsToJsonLine(const ImageDetections& record) {
  nlohmann::ordered_json out;
  out["prompt_id"] = record.prompt_id;
  out["image_index"] = record.image_index;
  if (record.image_width) out["image_width"] = *record.image_width;
  if (record.image_height) out["image_height"] = *record.image_height;
  auto& detections = out["detections"] = nlohmann::ordered_json::array();
  for (const Detection& d : record.detections) {
    nlohmann::ordered_json item;
    item["label"] = d.label;
    item["score"] = d.score;
    item["box"] = {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max};
    detections.push_back(std::move(item));
  }
  return out.dump();
}

std::size_t RelationSet::size() const {
  std::size_t n = 0;
  for (Relation r : kAllRelations) n += Contains(r) ? 1 : 0;
  return n;
}

RelationSet RelationSet::OnAxisOf(Relation r) const {
  RelationSet out;
  for (Relation m : kAllRelations) {
    if (Contains(m) && IsHorizontal(m) == IsHorizontal(r)) out.Insert(m);
  }
  return out;
}

RelationSet RelationSet::Flipped() const {
  RelationSet out;
  for (Relation m : kAllRelations) {
    if (Contains(m)) out.Insert(FlipRelation(m));
  }
  return out;
}

std::vector<Relation> RelationSet::ToVector() const {
  std::vector<Relation> out;
  for (Relation m : kAllRelations) {
    if (Contains(m)) out.push_back(m);
  }
  return out;
}

std::string NormalizeLabel(std::string_view label) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!label.empty() && is_space(label.front())) label.remove_prefix(1);
  while (!label.empty() && is_space(label.back())) label.remove_suffix(1);
  std::string out(label);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

const Detection* SelectObject(std::span<const Detection> detections,
                              std::string_view label, double threshold) {
  const std::string wanted = NormalizeLabel(label);
  const Detection* best = nullptr;
  for (const Detection& d : detections) {
    if (d.score < threshold) continue;
    if (best != nullptr && d.score <= best->score) continue;
    if (NormalizeLabel(d.label) != wanted) continue;
    best = &d;
  }
  return best;
}

RelationSet DeriveRelations(Point a, Point b) {
  RelationSet out;
  if (a.x < b.x) out.Insert(Relation::kLeft);
  if (a.x > b.x) out.Insert(Relation::kRight);
  if (a.y < b.y) out.Insert(Relation::kAbove);
  if (a.y > b.y) out.Insert(Relation::kBelow);
  return out;
}

ImageEvaluation EvaluateImage(const ImageDetections& record,
                              const Prompt& prompt, double threshold) {
  if (record.prompt_id != prompt.id) {
    throw ValidationError("detection record '" + record.prompt_id +
                          "' does not belong to prompt '" + prompt.id + "'");
  }
  ImageEvaluation eval;
  eval.prompt_id = prompt.id;
  eval.image_index = record.image_index;

  const Detection* a =
      SelectObject(record.detections, prompt.object_a.name, threshold);
  eval.object_a_present = a != nullptr;
  if (!prompt.object_b) {
    eval.oa = eval.object_a_present;
    return eval;
  }
  const Detection* b =
      SelectObject(record.detections, prompt.object_b->name, threshold);
  eval.object_b_present = b != nullptr;
  eval.oa = eval.object_a_present && eval.object_b_present;
  if (eval.oa) {
    eval.relations_satisfied = DeriveRelations(Centroid(a->box), Centroid(b->box));
    eval.visor =
        prompt.relation && eval.relations_satisfied.Contains(*prompt.relation);
  }
  return eval;
}

ImageEvaluation MissingImage(const Prompt& prompt, int image_index) {
  ImageEvaluation eval;
  eval.prompt_id = prompt.id;
  eval.image_index = image_index;
  eval.missing = true;
  return eval;
}

}  // namespace visor
