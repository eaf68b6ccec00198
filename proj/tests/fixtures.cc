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
#include "fixtures.h"

#include <algorithm>
#include <sstream>

#include "visor/corpus.h"

namespace visor::testing {
namespace {

std::size_t Uniform(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool Chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::string Decorate(std::mt19937_64& rng, const std::string& label) {
  std::string out = label;
  if (Chance(rng, 0.2)) {
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
  }
  if (Chance(rng, 0.1)) out = "  " + out;
  if (Chance(rng, 0.1)) out += " \t";
  return out;
}

enum class Scene { kCorrect, kDistracted, kWrong, kTie, kOnlyA, kOnlyB, kNeither, kFaintA };

// Centers for subject and object so that the subject satisfies `r`.
void Centers(Relation r, double& ax, double& ay, double& bx, double& by) {
  ax = ay = bx = by = 256;
  switch (r) {
    case Relation::kLeft:
      ax = 100, bx = 400;
      break;
    case Relation::kRight:
      ax = 400, bx = 100;
      break;
    case Relation::kAbove:
      ay = 100, by = 400;
      break;
    case Relation::kBelow:
      ay = 400, by = 100;
      break;
  }
}

ImageDetections Render(const Prompt& prompt, int index, Scene scene) {
  const std::string a = prompt.object_a.name;
  const std::string b = prompt.object_b->name;
  const Relation r = *prompt.relation;
  double ax, ay, bx, by;
  Centers(scene == Scene::kWrong ? FlipRelation(r) : r, ax, ay, bx, by);

  ImageDetections out{prompt.id, index, {}, 512.0, 512.0};
  auto& d = out.detections;
  switch (scene) {
    case Scene::kCorrect:
    case Scene::kWrong:
      d = {Place(a, 0.8, ax, ay), Place(b, 0.7, bx, by)};
      break;
    case Scene::kDistracted:
      // The stronger subject detection is the correctly placed one.
      d = {Place(a, 0.3, bx + 60, by + 60), Place("person", 0.95, 256, 256),
           Place(a + " ", 0.9, ax, ay), Place(b, 0.6, bx, by)};
      break;
    case Scene::kTie:
      d = {Place(a, 0.5, 256, 256, 30), Place(b, 0.5, 256, 256, 60)};
      break;
    case Scene::kOnlyA:
      d = {Place(a, 0.9, ax, ay), Place("person", 0.9, bx, by)};
      break;
    case Scene::kOnlyB:
      d = {Place(b, 0.9, bx, by)};
      break;
    case Scene::kNeither:
      d = {Place("person", 0.99, ax, ay)};
      break;
    case Scene::kFaintA:
      d = {Place(a, 0.05, ax, ay), Place(b, 0.9, bx, by)};
      break;
  }
  return out;
}

}  // namespace

Detection Place(std::string label, double score, double cx, double cy,
                double half) {
  return {std::move(label), score, {cx - half, cy - half, cx + half, cy + half}};
}

Fixture RandomFixture(std::mt19937_64& rng,
                      const RandomFixtureOptions& options) {
  const auto& all = Vocabulary::Coco().categories();
  std::vector<ObjectCategory> chosen;
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < options.categories; ++i) chosen.push_back(all[order[i]]);
  const ObjectCategory distractor = all[order[options.categories]];

  Fixture f;
  f.images_per_prompt = options.images_per_prompt;
  for (const Predicate& p : EnumeratePredicates(chosen)) {
    f.corpus.push_back(MakePrompt(p, {}));
  }
  for (const Prompt& prompt : f.corpus) {
    const std::string labels[] = {prompt.object_a.name, prompt.object_b->name,
                                  distractor.name};
    for (int i = 0; i < options.images_per_prompt; ++i) {
      if (Chance(rng, options.missing_rate)) continue;
      ImageDetections record{prompt.id, i, {}, 512.0, 512.0};
      const std::size_t count = Uniform(rng, options.max_detections + 1);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t which = Chance(rng, 0.2) ? 2 : Uniform(rng, 2);
        const double score = 0.05 * static_cast<double>(Uniform(rng, 21));
        // Coarse grid so equal centroids happen regularly.
        const double x0 = 32.0 * static_cast<double>(Uniform(rng, 12));
        const double y0 = 32.0 * static_cast<double>(Uniform(rng, 12));
        const double w = 32.0 * static_cast<double>(1 + Uniform(rng, 4));
        const double h = 32.0 * static_cast<double>(1 + Uniform(rng, 4));
        record.detections.push_back(
            {Decorate(rng, labels[which]), score, {x0, y0, x0 + w, y0 + h}});
      }
      f.detections.push_back(std::move(record));
    }
    if (Chance(rng, options.unknown_rate)) {
      f.detections.push_back({"ghost__" + prompt.id, 0, {}, {}, {}});
    }
  }
  std::shuffle(f.detections.begin(), f.detections.end(), rng);
  return f;
}

Fixture HandFixture() {
  const Vocabulary& coco = Vocabulary::Coco();
  const ObjectCategory cat = *coco.Find("cat");
  const ObjectCategory dog = *coco.Find("dog");
  using S = Scene;
  struct Row {
    Predicate predicate;
    std::vector<Scene> scenes;
  };
  const std::vector<Row> rows = {
      {{cat, dog, Relation::kLeft},
       {S::kCorrect, S::kDistracted, S::kCorrect, S::kCorrect}},
      {{cat, dog, Relation::kRight},
       {S::kCorrect, S::kCorrect, S::kDistracted, S::kWrong}},
      {{cat, dog, Relation::kAbove},
       {S::kCorrect, S::kCorrect, S::kTie, S::kOnlyA}},
      {{cat, dog, Relation::kBelow},
       {S::kCorrect, S::kWrong, S::kOnlyB, S::kFaintA}},
      {{dog, cat, Relation::kLeft},
       {S::kWrong, S::kWrong, S::kNeither, S::kOnlyA}},
      {{dog, cat, Relation::kRight},
       {S::kOnlyA, S::kOnlyB, S::kNeither, S::kFaintA}},
      {{dog, cat, Relation::kAbove},
       {S::kCorrect, S::kOnlyB, S::kNeither, S::kWrong}},
      {{dog, cat, Relation::kBelow},
       {S::kCorrect, S::kCorrect, S::kWrong, S::kTie}},
  };
  Fixture f;
  f.images_per_prompt = 4;
  for (const Row& row : rows) {
    f.corpus.push_back(MakePrompt(row.predicate, {}));
    for (int i = 0; i < 4; ++i) {
      f.detections.push_back(Render(f.corpus.back(), i, row.scenes[i]));
    }
  }
  // Exercise label normalization once.
  f.detections[0].detections[0].label = " Cat ";
  return f;
}

std::string CorpusText(const Fixture& fixture) {
  std::ostringstream out;
  WriteCorpus(out, fixture.corpus);
  return out.str();
}

std::string DetectionsText(const Fixture& fixture) {
  std::string out;
  for (const ImageDetections& r : fixture.detections) {
    out += DetectionsToJsonLine(r) + "\n";
  }
  return out;
}

ImageDetections MirrorHorizontally(const ImageDetections& record,
                                   double width) {
  ImageDetections out = record;
  for (Detection& d : out.detections) {
    const double x_min = width - d.box.x_max;
    const double x_max = width - d.box.x_min;
    d.box.x_min = x_min;
    d.box.x_max = x_max;
  }
  return out;
}

ImageDetections ScaleBoxes(const ImageDetections& record, double factor) {
  ImageDetections out = record;
  for (Detection& d : out.detections) {
    d.box = {d.box.x_min * factor, d.box.y_min * factor, d.box.x_max * factor,
             d.box.y_max * factor};
  }
  return out;
}

}  // namespace visor::testing
