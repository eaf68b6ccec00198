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
#ifndef VISOR_EVALUATION_H_
#define VISOR_EVALUATION_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "visor/detection.h"
#include "visor/sr2d.h"

namespace visor {

// All N image evaluations of one prompt, indexed 0..N-1 without gaps.
struct PromptGroup {
  Prompt prompt;
  std::vector<ImageEvaluation> evaluations;
};

struct EvaluationOptions {
  double threshold = kDefaultThreshold;
  int images_per_prompt = kDefaultImagesPerPrompt;
};

struct Coverage {
  std::size_t expected_images = 0;
  std::size_t missing_images = 0;
  std::size_t unknown_records = 0;
  std::vector<std::string> warnings;
};

struct RunEvaluation {
  std::vector<PromptGroup> groups;  // corpus order
  Coverage coverage;
};

// Joins detections to the corpus by prompt id and evaluates every image slot.
// Slots without a record are scored as failures and counted as missing;
// records for unknown prompts are skipped with a warning. Throws
// ValidationError for an invalid threshold, N < 1, an out-of-range
// image_index or a duplicate (prompt_id, image_index).
RunEvaluation EvaluateRun(std::span<const Prompt> corpus,
                          std::span<const ImageDetections> detections,
                          const EvaluationOptions& options);

// Per-image evaluation file: one JSON object per image slot, carrying the
// prompt fields needed to rebuild groups without the corpus.
void WriteEvaluations(std::ostream& out, std::span<const PromptGroup> groups);

// Throws ParseError on malformed lines and ValidationError when a prompt's
// image indices are not exactly 0..N-1.
std::vector<PromptGroup> ReadEvaluations(std::istream& in,
                                         const Vocabulary& vocabulary);

// Number of images per prompt shared by every group. Throws ValidationError
// when groups disagree or the list is empty.
int ImagesPerPrompt(std::span<const PromptGroup> groups);

}  // namespace visor

#endif  // VISOR_EVALUATION_H_
