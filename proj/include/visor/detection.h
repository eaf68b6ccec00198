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
#ifndef VISOR_DETECTION_H_
#define VISOR_DETECTION_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "visor/sr2d.h"

namespace visor {

inline constexpr double kDefaultThreshold = 0.1;
inline constexpr int kDefaultImagesPerPrompt = 4;

// Pixel coordinates, x rightward and y downward.
struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  // Finite, non-negative, with positive extent on both axes.
  bool IsValid() const;
  bool operator==(const BoundingBox&) const = default;
};

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

Point Centroid(const BoundingBox& box);

struct Detection {
  std::string label;
  double score = 0;  // in [0, 1]
  BoundingBox box;
};

struct ImageDetections {
  std::string prompt_id;
  int image_index = 0;
  std::vector<Detection> detections;
  // Accepted for mirroring tests; ignored by metrics.
  std::optional<double> image_width;
  std::optional<double> image_height;
};

// Streaming reader for the line-delimited detection format. Each Next() call
// returns the next record or throws ParseError naming the line and field.
// Blank lines are skipped.
class DetectionReader {
 public:
  // When images_per_prompt is set, image_index must be below it.
  explicit DetectionReader(std::istream& in,
                           std::optional<int> images_per_prompt = {});

  std::optional<ImageDetections> Next();
  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::optional<int> images_per_prompt_;
  std::size_t line_ = 0;
  std::unordered_set<std::string> keys_;
};

std::vector<ImageDetections> ParseDetections(
    std::istream& in, std::optional<int> images_per_prompt = {});

std::string DetectionsToJsonLine(const ImageDetections& record);

// Set of relations satisfied by subject A with respect to object B. Holds at
// most one relation per axis.
class RelationSet {
 public:
  RelationSet() = default;
  RelationSet(std::initializer_list<Relation> relations) {
    for (Relation r : relations) Insert(r);
  }

  void Insert(Relation r) { bits_ |= Bit(r); }
  bool Contains(Relation r) const { return (bits_ & Bit(r)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;

  // Keeps only the relations on the same axis as `r`.
  RelationSet OnAxisOf(Relation r) const;
  // Each member replaced by FlipRelation(member).
  RelationSet Flipped() const;
  std::vector<Relation> ToVector() const;

  bool operator==(const RelationSet&) const = default;

 private:
  static std::uint8_t Bit(Relation r) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r));
  }
  std::uint8_t bits_ = 0;
};

// Trimmed and lowercased label used for matching detections to categories.
std::string NormalizeLabel(std::string_view label);

// Highest-scoring detection whose label matches and whose score is at least
// `threshold`. Ties go to the earliest detection. nullptr when none qualify.
const Detection* SelectObject(std::span<const Detection> detections,
                              std::string_view label, double threshold);

// Strict sign tests on centroids: Left iff a.x < b.x, Right iff a.x > b.x,
// Above iff a.y < b.y, Below iff a.y > b.y.
RelationSet DeriveRelations(Point a, Point b);

struct ImageEvaluation {
  std::string prompt_id;
  int image_index = 0;
  bool object_a_present = false;
  bool object_b_present = false;
  // Both mentioned objects present. For single-object prompts, A present.
  bool oa = false;
  RelationSet relations_satisfied;  // empty unless oa
  bool visor = false;
  // Slot had no detection record and was scored as a failure.
  bool missing = false;
};

// Throws ValidationError when record.prompt_id != prompt.id.
ImageEvaluation EvaluateImage(const ImageDetections& record,
                              const Prompt& prompt, double threshold);

// Evaluation for an image slot without any detection record.
ImageEvaluation MissingImage(const Prompt& prompt, int image_index);

}  // namespace visor

#endif  // VISOR_DETECTION_H_
