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
#ifndef VISOR_TESTS_FIXTURES_H_
#define VISOR_TESTS_FIXTURES_H_

#include <random>
#include <string>
#include <vector>

#include "visor/detection.h"
#include "visor/sr2d.h"

namespace visor::testing {

struct Fixture {
  std::vector<Prompt> corpus;
  std::vector<ImageDetections> detections;
  int images_per_prompt = 4;
};

struct RandomFixtureOptions {
  int categories = 3;  // phrase prompts over C(k, 2) * 8 predicates
  int images_per_prompt = 4;
  double missing_rate = 0.05;  // image slots without a record
  double unknown_rate = 0.0;   // extra records for prompts not in the corpus
  int max_detections = 5;
};

// Integer-valued boxes on a 512x512 canvas, scores on a 0.05 grid, labels
// with random case and padding. Ties in scores and centroids are common.
Fixture RandomFixture(std::mt19937_64& rng, const RandomFixtureOptions& options);

// Eight prompts over {cat, dog}, four images each, covering missing objects,
// below-threshold objects, wrong relations, centroid ties and distractors.
//   visor-correct images per prompt: 4 3 2 1 0 0 1 2
//   both-objects images per prompt:  4 4 3 2 2 0 2 4
Fixture HandFixture();

std::string CorpusText(const Fixture& fixture);
std::string DetectionsText(const Fixture& fixture);

// x -> width - x for every box.
ImageDetections MirrorHorizontally(const ImageDetections& record, double width);
ImageDetections ScaleBoxes(const ImageDetections& record, double factor);

// Square box of half-size `half` centered at (cx, cy).
Detection Place(std::string label, double score, double cx, double cy,
                double half = 40);

}  // namespace visor::testing

#endif  // VISOR_TESTS_FIXTURES_H_
