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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.h"
#include "visor/error.h"

namespace visor {
namespace {

using testing::Place;

Prompt CatDog(Relation r) {
  const Vocabulary& coco = Vocabulary::Coco();
  return MakePrompt({*coco.Find("cat"), *coco.Find("dog"), r}, {});
}

ImageDetections Record(const Prompt& p, std::vector<Detection> dets,
                       int index = 0) {
  ImageDetections r;
  r.prompt_id = p.id;
  r.image_index = index;
  r.detections = std::move(dets);
  return r;
}

TEST(DetectionReaderTest, ParsesTwoLineFile) {
  std::istringstream in(
      R"({"prompt_id":"cat__dog__left__phrase","image_index":0,"detections":[)"
      R"({"label":"cat","score":0.9,"box":[10,20,30,60]},)"
      R"({"label":"dog","score":0.4,"box":[100,20,140,60]}]})"
      "\n\n"
      R"({"prompt_id":"cat__dog__left__phrase","image_index":1,)"
      R"("detections":[],"image_width":512,"image_height":256})"
      "\n");
  const auto records = ParseDetections(in, 4);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].detections.size(), 2u);
  EXPECT_EQ(records[0].detections[1].label, "dog");
  EXPECT_DOUBLE_EQ(records[0].detections[0].score, 0.9);
  EXPECT_EQ(records[0].detections[0].box, (BoundingBox{10, 20, 30, 60}));
  EXPECT_TRUE(records[1].detections.empty());
  EXPECT_EQ(records[1].image_width, 512.0);
  EXPECT_EQ(records[1].image_height, 256.0);
}

void ExpectParseError(const std::string& text, std::size_t line,
                      const std::string& field,
                      std::optional<int> images_per_prompt = {}) {
  std::istringstream in(text);
  try {
    ParseDetections(in, images_per_prompt);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

TEST(DetectionReaderTest, RejectsOutOfRangeScore) {
  const std::string ok =
      R"({"prompt_id":"p","image_index":0,"detections":[]})" "\n";
  ExpectParseError(
      ok + R"({"prompt_id":"p","image_index":1,"detections":[)"
           R"({"label":"cat","score":1.3,"box":[0,0,1,1]}]})",
      2, "detections[0].score");
  std::istringstream in(
      R"({"prompt_id":"p","image_index":1,"detections":[)"
      R"({"label":"cat","score":1.3,"box":[0,0,1,1]}]})");
  try {
    ParseDetections(in);
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 1"), std::string::npos);
    EXPECT_NE(what.find("score"), std::string::npos);
  }
}

TEST(DetectionReaderTest, RejectsStructuralProblems) {
  ExpectParseError(
      R"({"prompt_id":"p","image_index":0,"detections":[]})" "\n"
      R"({"prompt_id":"p","image_index":0,"detections":[]})",
      2, "image_index");
  ExpectParseError(R"({"prompt_id":"p","image_index":4,"detections":[]})", 1,
                   "image_index", 4);
  ExpectParseError(R"({"prompt_id":"p","image_index":-1,"detections":[]})", 1,
                   "image_index");
  ExpectParseError(R"({"image_index":0,"detections":[]})", 1, "prompt_id");
  ExpectParseError(
      R"({"prompt_id":"p","image_index":0,"detections":[)"
      R"({"label":"cat","score":0.5,"box":[10,10,5,20]}]})",
      1, "detections[0].box");
  ExpectParseError(
      R"({"prompt_id":"p","image_index":0,"detections":[)"
      R"({"label":"cat","score":0.5,"box":[0,0,1]}]})",
      1, "detections[0].box");
  ExpectParseError(
      R"({"prompt_id":"p","image_index":0,"detections":[{"score":0.5,)"
      R"("box":[0,0,1,1]}]})",
      1, "detections[0].label");
  ExpectParseError("[1,2]", 1, "");
}

TEST(DetectionIoTest, JsonLineRoundTrip) {
  std::mt19937_64 rng(3);
  const auto fixture = testing::RandomFixture(rng, {});
  std::istringstream in(testing::DetectionsText(fixture));
  const auto back = ParseDetections(in);
  ASSERT_EQ(back.size(), fixture.detections.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(DetectionsToJsonLine(back[i]),
              DetectionsToJsonLine(fixture.detections[i]));
  }
}

TEST(CentroidTest, Examples) {
  EXPECT_EQ(Centroid({0, 0, 10, 10}), (Point{5, 5}));
  EXPECT_EQ(Centroid({10, 20, 30, 60}), (Point{20, 40}));
  EXPECT_EQ(Centroid({0, 0, 1, 1}), (Point{0.5, 0.5}));
}

TEST(NormalizeLabelTest, TrimsAndLowercases) {
  EXPECT_EQ(NormalizeLabel("  Potted Plant\t"), "potted plant");
  EXPECT_EQ(NormalizeLabel("DOG"), "dog");
  EXPECT_EQ(NormalizeLabel(""), "");
}

TEST(SelectObjectTest, ArgmaxAboveThreshold) {
  const std::vector<Detection> dets = {
      Place("cat", 0.3, 10, 10), Place("Dog", 0.8, 20, 20),
      Place("cat", 0.7, 30, 30), Place("cat", 0.7, 40, 40),
      Place("bird", 0.05, 50, 50)};
  EXPECT_EQ(SelectObject(dets, "cat", 0.1), &dets[2]);  // earliest of a tie
  EXPECT_EQ(SelectObject(dets, "dog", 0.1), &dets[1]);
  EXPECT_EQ(SelectObject(dets, "dog", 0.8), &dets[1]);  // inclusive
  EXPECT_EQ(SelectObject(dets, "dog", 0.81), nullptr);
  EXPECT_EQ(SelectObject(dets, "bird", 0.1), nullptr);
  EXPECT_EQ(SelectObject(dets, "cow", 0.0), nullptr);
}

TEST(DeriveRelationsTest, Examples) {
  EXPECT_EQ(DeriveRelations({10, 50}, {100, 50}), RelationSet{Relation::kLeft});
  EXPECT_EQ(DeriveRelations({100, 50}, {10, 50}),
            RelationSet{Relation::kRight});
  EXPECT_EQ(DeriveRelations({40, 10}, {40, 90}), RelationSet{Relation::kAbove});
  EXPECT_EQ(DeriveRelations({40, 90}, {40, 10}), RelationSet{Relation::kBelow});
  EXPECT_EQ(DeriveRelations({10, 10}, {90, 90}),
            (RelationSet{Relation::kLeft, Relation::kAbove}));
  EXPECT_TRUE(DeriveRelations({5, 5}, {5, 5}).empty());
}

TEST(RelationSetTest, Operations) {
  RelationSet s{Relation::kLeft, Relation::kBelow};
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.Flipped(), (RelationSet{Relation::kRight, Relation::kAbove}));
  EXPECT_EQ(s.OnAxisOf(Relation::kRight), RelationSet{Relation::kLeft});
  EXPECT_EQ(s.OnAxisOf(Relation::kAbove), RelationSet{Relation::kBelow});
  EXPECT_EQ(s.ToVector(),
            (std::vector<Relation>{Relation::kLeft, Relation::kBelow}));
}

TEST(EvaluateImageTest, Examples) {
  const Prompt left = CatDog(Relation::kLeft);
  auto correct = EvaluateImage(
      Record(left, {Place("cat", 0.9, 10, 50), Place("dog", 0.8, 100, 50)}),
      left, 0.1);
  EXPECT_TRUE(correct.oa);
  EXPECT_TRUE(correct.visor);
  EXPECT_EQ(correct.relations_satisfied, RelationSet{Relation::kLeft});

  auto wrong = EvaluateImage(
      Record(left, {Place("cat", 0.9, 100, 50), Place("dog", 0.8, 10, 50)}),
      left, 0.1);
  EXPECT_TRUE(wrong.oa);
  EXPECT_FALSE(wrong.visor);

  auto only_a = EvaluateImage(Record(left, {Place("cat", 0.9, 10, 50)}), left,
                              0.1);
  EXPECT_TRUE(only_a.object_a_present);
  EXPECT_FALSE(only_a.object_b_present);
  EXPECT_FALSE(only_a.oa);
  EXPECT_FALSE(only_a.visor);
  EXPECT_TRUE(only_a.relations_satisfied.empty());

  // The highest-scoring instance decides, not any instance.
  auto argmax = EvaluateImage(
      Record(left, {Place("cat", 0.5, 10, 50), Place("cat", 0.9, 200, 50),
                    Place("dog", 0.8, 100, 50)}),
      left, 0.1);
  EXPECT_FALSE(argmax.visor);

  const Prompt other = CatDog(Relation::kAbove);
  EXPECT_THROW(EvaluateImage(Record(other, {}), left, 0.1), ValidationError);

  const Prompt single =
      MakeSingleObjectPrompt(*Vocabulary::Coco().Find("cat"));
  auto s = EvaluateImage(Record(single, {Place("cat", 0.9, 10, 10)}), single,
                         0.1);
  EXPECT_TRUE(s.oa);
  EXPECT_FALSE(s.visor);

  auto missing = MissingImage(left, 3);
  EXPECT_TRUE(missing.missing);
  EXPECT_EQ(missing.image_index, 3);
  EXPECT_FALSE(missing.oa);
}

// Mirroring an image about its vertical axis swaps left and right, keeps
// above and below, and never changes object presence.
TEST(EvaluateImagePropertyTest, HorizontalMirror) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const auto fixture = testing::RandomFixture(rng, {});
    std::map<std::string, const Prompt*> by_id;
    for (const Prompt& p : fixture.corpus) by_id[p.id] = &p;
    for (const ImageDetections& record : fixture.detections) {
      const Prompt& p = *by_id.at(record.prompt_id);
      const auto base = EvaluateImage(record, p, 0.1);
      const auto mirror =
          EvaluateImage(testing::MirrorHorizontally(record, 512), p, 0.1);
      ASSERT_EQ(mirror.oa, base.oa);
      RelationSet expected;
      for (Relation r : base.relations_satisfied.ToVector()) {
        expected.Insert(IsHorizontal(r) ? FlipRelation(r) : r);
      }
      ASSERT_EQ(mirror.relations_satisfied, expected);
    }
  }
}

TEST(EvaluateImagePropertyTest, ThresholdMonotone) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 100; ++round) {
    const auto fixture = testing::RandomFixture(rng, {});
    std::map<std::string, const Prompt*> by_id;
    for (const Prompt& p : fixture.corpus) by_id[p.id] = &p;
    for (const ImageDetections& record : fixture.detections) {
      const Prompt& p = *by_id.at(record.prompt_id);
      bool prev_a = true, prev_b = true;
      for (double t : {0.0, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0}) {
        const auto e = EvaluateImage(record, p, t);
        ASSERT_LE(e.object_a_present, prev_a);
        ASSERT_LE(e.object_b_present, prev_b);
        prev_a = e.object_a_present;
        prev_b = e.object_b_present;
      }
    }
  }
}

}  // namespace
}  // namespace visor
