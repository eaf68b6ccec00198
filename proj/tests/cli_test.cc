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
#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.h"
#include "visor/corpus.h"

namespace visor::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("visor_cli_test_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return dir_ / name; }

  int Visor(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return visor::cli::Run(args, out_, err_);
  }

  void Write(const std::string& name, const std::string& text) {
    std::ofstream(Path(name)) << text;
  }

  std::string Read(const std::string& name) const {
    std::ifstream in(Path(name));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::size_t Lines(const std::string& name) const {
    const std::string text = Read(name);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }

  void WriteHandFixture() {
    const auto f = visor::testing::HandFixture();
    Write("corpus.jsonl", visor::testing::CorpusText(f));
    Write("detections.jsonl", visor::testing::DetectionsText(f));
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, GenCountsAndDeterminism) {
  ASSERT_EQ(Visor({"gen", "-o", Path("a.jsonl")}), 0) << err_.str();
  EXPECT_EQ(Lines("a.jsonl"), 25280u);
  EXPECT_NE(out_.str().find("25280 prompts"), std::string::npos);
  ASSERT_EQ(Visor({"gen", "-o", Path("b.jsonl")}), 0);
  EXPECT_EQ(Read("a.jsonl"), Read("b.jsonl"));

  ASSERT_EQ(Visor({"gen", "--categories", "representative", "--variant",
                   "phrase,single-object", "--variant", "attributed",
                   "--count", "30", "--seed", "4", "-o", Path("c.jsonl")}),
            0)
      << err_.str();
  EXPECT_EQ(Lines("c.jsonl"), 440u + 11u + 30u);
}

TEST_F(CliTest, GenCustomCategoriesAndErrors) {
  Write("cats.csv", "cat,animal\ndog,animal\ncar,vehicle\n");
  ASSERT_EQ(Visor({"gen", "--categories", Path("cats.csv"), "-o",
                   Path("c.jsonl")}),
            0)
      << err_.str();
  EXPECT_EQ(Lines("c.jsonl"), 24u);
  EXPECT_NE(Visor({"gen", "--categories", Path("missing.csv"), "-o",
                   Path("c.jsonl")}),
            0);
  EXPECT_NE(err_.str().find("missing.csv"), std::string::npos);
  EXPECT_NE(Visor({"gen", "--variant", "haiku", "-o", Path("c.jsonl")}), 0);
  EXPECT_NE(Visor({"gen"}), 0);
}

TEST_F(CliTest, EvaluateWritesDeterministicOutputs) {
  WriteHandFixture();
  const std::vector<std::string> args = {
      "evaluate", "--corpus", Path("corpus.jsonl"), "--detections",
      Path("detections.jsonl"), "--corpus-id", "hand", "--detector-id", "fx",
      "--out"};
  auto with_out = [&](const std::string& d) {
    auto a = args;
    a.push_back(Path(d));
    return a;
  };
  ASSERT_EQ(Visor(with_out("r1")), 0) << err_.str();
  ASSERT_EQ(Visor(with_out("r2")), 0) << err_.str();
  for (const char* file : {"evaluations.jsonl", "report.json", "benchmark.csv",
                           "supercategory.csv", "object_bias.csv",
                           "consistency.csv"}) {
    const std::string a = Read(std::string("r1/") + file);
    EXPECT_FALSE(a.empty()) << file;
    EXPECT_EQ(a, Read(std::string("r2/") + file)) << file;
  }
  std::ifstream golden(VISOR_TEST_DATA "/hand_benchmark.csv");
  std::stringstream g;
  g << golden.rdbuf();
  EXPECT_EQ(Read("r1/benchmark.csv"), g.str());
  EXPECT_EQ(Lines("r1/evaluations.jsonl"), 32u);
}

TEST_F(CliTest, EvaluateReportsMissingInputs) {
  WriteHandFixture();
  EXPECT_NE(Visor({"evaluate", "--corpus", Path("corpus.jsonl"),
                   "--detections", Path("nope.jsonl"), "--out", Path("r")}),
            0);
  EXPECT_NE(err_.str().find("nope.jsonl"), std::string::npos);
  Write("bad.jsonl",
        R"({"prompt_id":"p","image_index":0,"detections":[)"
        R"({"label":"cat","score":1.3,"box":[0,0,1,1]}]})");
  EXPECT_EQ(Visor({"evaluate", "--corpus", Path("corpus.jsonl"),
                   "--detections", Path("bad.jsonl"), "--out", Path("r")}),
            1);
  EXPECT_NE(err_.str().find("line 1"), std::string::npos);
  EXPECT_NE(err_.str().find("score"), std::string::npos);
}

TEST_F(CliTest, EvaluateWarnsAboutGaps) {
  auto f = visor::testing::HandFixture();
  f.detections.pop_back();
  Write("corpus.jsonl", visor::testing::CorpusText(f));
  Write("detections.jsonl", visor::testing::DetectionsText(f));
  ASSERT_EQ(Visor({"evaluate", "--corpus", Path("corpus.jsonl"),
                   "--detections", Path("detections.jsonl"), "--out",
                   Path("r")}),
            0);
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  EXPECT_NE(Read("r/report.json").find("\"missing_images\": 1"),
            std::string::npos);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  WriteHandFixture();
  Write("run.conf", "# defaults\nthreshold = 0.5\nformat=markdown\n");
  ASSERT_EQ(Visor({"evaluate", "--config", Path("run.conf"), "--corpus",
                   Path("corpus.jsonl"), "--detections",
                   Path("detections.jsonl"), "--format", "csv", "--out",
                   Path("r")}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(Path("r/benchmark.csv")));
  EXPECT_NE(Read("r/report.json").find("\"threshold\": 0.5"),
            std::string::npos);
  Write("bad.conf", "colour=red\n");
  EXPECT_EQ(Visor({"evaluate", "--config", Path("bad.conf"), "--corpus",
                   Path("corpus.jsonl"), "--detections",
                   Path("detections.jsonl"), "--out", Path("r")}),
            1);
  EXPECT_NE(err_.str().find("colour"), std::string::npos);
}

TEST_F(CliTest, ConsistencyOnPerfectFixture) {
  const Vocabulary& coco = Vocabulary::Coco();
  std::vector<Prompt> corpus;
  for (const auto& p : EnumeratePredicates(
           std::vector<ObjectCategory>{*coco.Find("cat"), *coco.Find("dog")})) {
    corpus.push_back(MakePrompt(p, {}));
  }
  std::string dets;
  for (const Prompt& p : corpus) {
    // Place A where the relation holds strictly on both axes.
    double ax = 200, ay = 200, bx = 200, by = 200;
    switch (*p.relation) {
      case Relation::kLeft: ax = 100; bx = 300; break;
      case Relation::kRight: ax = 300; bx = 100; break;
      case Relation::kAbove: ay = 100; by = 300; break;
      case Relation::kBelow: ay = 300; by = 100; break;
    }
    for (int i = 0; i < 4; ++i) {
      ImageDetections r{p.id, i,
                        {visor::testing::Place(p.object_a.name, 0.9, ax, ay),
                         visor::testing::Place(p.object_b->name, 0.9, bx, by)},
                        {}, {}};
      dets += DetectionsToJsonLine(r) + "\n";
    }
  }
  std::ostringstream c;
  WriteCorpus(c, corpus);
  Write("corpus.jsonl", c.str());
  Write("detections.jsonl", dets);
  ASSERT_EQ(Visor({"evaluate", "--corpus", Path("corpus.jsonl"),
                   "--detections", Path("detections.jsonl"), "--out",
                   Path("r")}),
            0);
  ASSERT_EQ(Visor({"consistency", "--evaluations",
                   Path("r/evaluations.jsonl")}),
            0)
      << err_.str();
  EXPECT_EQ(out_.str(),
            "left,right,above,below,average\n"
            "100.00,100.00,100.00,100.00,100.00\n");
}

TEST_F(CliTest, DeltaSOnConstantScores) {
  std::string scores;
  for (int i = 0; i < 8; ++i) {
    scores += R"({"prompt_id":"cat__dog__left__phrase","image_index":)" +
              std::to_string(i % 4) + R"(,"score":0.25,"score_flipped":0.25})" +
              "\n";
  }
  Write("scores.jsonl", scores);
  ASSERT_EQ(Visor({"delta-s", "--scores", Path("scores.jsonl")}), 0)
      << err_.str();
  EXPECT_NE(out_.str().find("0.000000"), std::string::npos) << out_.str();
}

TEST_F(CliTest, ReportAndCorrelate) {
  WriteHandFixture();
  ASSERT_EQ(Visor({"evaluate", "--corpus", Path("corpus.jsonl"),
                   "--detections", Path("detections.jsonl"), "--out",
                   Path("r")}),
            0);
  Write("cooc.csv", "total_images,10\ncat,dog,3\n");
  ASSERT_EQ(Visor({"report", "--evaluations", Path("r/evaluations.jsonl"),
                   "--out", Path("again")}),
            0)
      << err_.str();
  EXPECT_EQ(Read("again/benchmark.csv"), Read("r/benchmark.csv"));
  // A single object pair has no spread: correlation is undefined.
  EXPECT_EQ(Visor({"correlate", "--evaluations", Path("r/evaluations.jsonl"),
                   "--annotations", Path("cooc.csv")}),
            1);
}

TEST_F(CliTest, CorrelateTracksCooccurrence) {
  const char* names[] = {"cat", "dog", "horse", "sheep"};
  std::vector<ObjectCategory> cats;
  for (const char* n : names) cats.push_back(*Vocabulary::Coco().Find(n));
  std::vector<Prompt> corpus;
  for (const auto& p : EnumeratePredicates(cats)) {
    corpus.push_back(MakePrompt(p, {}));
  }
  // OA per unordered pair equals its co-occurrence rank.
  std::map<std::string, int> rank;
  std::string cooc = "total_images,100\n";
  int level = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j, ++level) {
      rank[std::string(names[i]) + names[j]] = level;
      cooc += std::string(names[i]) + "," + names[j] + "," +
              std::to_string(level * 10 + 1) + "\n";
    }
  }
  std::string dets;
  for (const Prompt& p : corpus) {
    auto key = std::minmax(p.object_a.name, p.object_b->name);
    const int have = rank.at(key.first + key.second);
    for (int i = 0; i < 6; ++i) {
      ImageDetections r{p.id, i, {}, {}, {}};
      if (i < have) {
        r.detections = {visor::testing::Place(p.object_a.name, 0.9, 100, 100),
                        visor::testing::Place(p.object_b->name, 0.9, 300, 300)};
      }
      dets += DetectionsToJsonLine(r) + "\n";
    }
  }
  std::ostringstream c;
  WriteCorpus(c, corpus);
  Write("corpus.jsonl", c.str());
  Write("detections.jsonl", dets);
  Write("cooc.csv", cooc);
  ASSERT_EQ(Visor({"evaluate", "--corpus", Path("corpus.jsonl"),
                   "--detections", Path("detections.jsonl"),
                   "--images-per-prompt", "6", "--out", Path("r")}),
            0)
      << err_.str();
  ASSERT_EQ(Visor({"correlate", "--evaluations", Path("r/evaluations.jsonl"),
                   "--annotations", Path("cooc.csv")}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("oa,6,1.0000"), std::string::npos) << out_.str();
}

TEST_F(CliTest, SweepTable) {
  WriteHandFixture();
  ASSERT_EQ(Visor({"sweep", "--corpus", Path("corpus.jsonl"), "--detections",
                   Path("detections.jsonl")}),
            0)
      << err_.str();
  std::istringstream in(out_.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[1].rfind("0.1,8,32,65.62,40.62,", 0), 0u) << lines[1];
  EXPECT_NE(Visor({"sweep", "--corpus", Path("corpus.jsonl"), "--detections",
                   Path("detections.jsonl"), "--thresholds", "0.4,0.1"}),
            0);
}

}  // namespace
}  // namespace visor::cli
