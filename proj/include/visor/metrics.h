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
#ifndef VISOR_METRICS_H_
#define VISOR_METRICS_H_

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "visor/detection.h"
#include "visor/evaluation.h"
#include "visor/sr2d.h"

namespace visor {

// Fractions in [0, 1]. Each throws ValidationError on empty input.
double ObjectAccuracy(std::span<const ImageEvaluation> evals);
double VisorUncond(std::span<const ImageEvaluation> evals);
// P(visor | oa). Throws UndefinedValueError when no image has oa.
double VisorCond(std::span<const ImageEvaluation> evals);

// Fraction of prompts with at least n VISOR-correct images out of N. Accepts
// the boundary values n = 0 (always 1) and n = N + 1 (always 0).
double VisorN(std::span<const PromptGroup> groups, int n);

// Unconditional VISOR recovered from VISOR_1..VISOR_N:
//   (1/N) * sum_{n=1..N} n * (V_n - V_{n+1}),  V_{N+1} = 0.
// Works in whatever unit the inputs use (fraction or percent).
double VisorFromVisorN(std::span<const double> visor_n);

std::vector<ImageEvaluation> FlattenEvaluations(
    std::span<const PromptGroup> groups);

struct MetricsSummary {
  std::size_t prompts = 0;
  std::size_t images = 0;
  double oa_pct = 0;
  double visor_uncond_pct = 0;
  std::optional<double> visor_cond_pct;  // absent when no image has oa
  std::vector<double> visor_n_pct;       // index n-1 for n = 1..N
};

// Requires a nonempty list of groups sharing the same N.
MetricsSummary Summarize(std::span<const PromptGroup> groups);

enum class SplitKey { kRelation, kSupercategoryPair, kVariant };

// Partitions prompts by key and summarizes each bucket. Prompts without a
// relation (single-object, conjunction) are left out of relation and
// supercategory splits; single-object prompts are left out of the
// supercategory split.
std::map<std::string, MetricsSummary> SplitMetrics(
    std::span<const PromptGroup> groups, SplitKey key,
    const Vocabulary& vocabulary);

// Unordered supercategory pair key "x|y", members ordered by their position
// in the vocabulary's supercategory list.
std::string SupercategoryPairKey(const std::string& a, const std::string& b,
                                 const Vocabulary& vocabulary);

// Presence rates of the first-mentioned object (A), the second (B) and both,
// over every image of two-object prompts.
struct ObjectPresence {
  std::size_t images = 0;
  double a_pct = 0;
  double b_pct = 0;
  double both_pct = 0;
};
ObjectPresence ObjectPositionPresence(std::span<const PromptGroup> groups);

// Agreement rate between two prompts that describe the same geometry
// (q = EquivalentPredicate(p)), over every cross pair of images with both
// objects detected. nullopt when either side has no such image.
std::optional<double> PairAgreement(const PromptGroup& p, const PromptGroup& q);

struct ConsistencyResult {
  std::map<Relation, double> pct;          // relations with >= 1 scored pair
  std::map<Relation, std::size_t> pairs;   // scored pairs per relation
  std::optional<double> average_pct;       // mean of the per-relation values
};

// Averages PairAgreement per relation of p over every prompt p whose
// equivalent partner is also present (same variant).
ConsistencyResult Consistency(std::span<const PromptGroup> groups);

struct ScoreRecord {
  std::string prompt_id;
  int image_index = 0;
  double score = 0;
  double score_flipped = 0;
};

// Line-delimited records with prompt_id, image_index, score, score_flipped.
std::vector<ScoreRecord> ParseScores(std::istream& in);

// Mean of (score - score_flipped). Throws ValidationError when empty.
double DeltaS(std::span<const ScoreRecord> scores);

// Unordered category pair, members in lexicographic order.
using CategoryPair = std::pair<std::string, std::string>;
CategoryPair MakeCategoryPair(std::string a, std::string b);

using CooccurrenceTable = std::map<CategoryPair, double>;

// P(A, B) = (#images containing both) / (#images). Only pairs that co-occur
// at least once are listed; absent pairs have probability 0.
CooccurrenceTable CooccurrenceProbability(
    const std::map<std::string, std::set<std::string>>& image_categories);

struct PairCounts {
  std::size_t total_images = 0;
  std::map<CategoryPair, std::size_t> counts;
};
CooccurrenceTable CooccurrenceProbability(const PairCounts& counts);

// Reads either a per-image listing (JSON lines {"image_id", "categories"}) or
// a pair-count table ("total_images,<n>" header then "a,b,count" rows).
CooccurrenceTable LoadCooccurrence(std::istream& in);

// Pearson product-moment correlation. Throws ValidationError on mismatched
// or too-short input and UndefinedValueError on zero variance.
double Pearson(std::span<const double> xs, std::span<const double> ys);

struct CorrelationResult {
  std::size_t pairs = 0;        // object pairs used for OA
  double oa_r = 0;
  std::size_t cond_pairs = 0;   // pairs with a defined VISOR_cond
  std::optional<double> visor_cond_r;  // absent when undefined
};

// Per unordered object pair: OA and VISOR_cond over all its prompts,
// correlated with the pair's co-occurrence probability. Throws
// UndefinedValueError when OA or co-occurrence has no variance; a VISOR_cond
// coefficient that is undefined is left empty instead.
CorrelationResult CorrelateWithCooccurrence(std::span<const PromptGroup> groups,
                                            const CooccurrenceTable& table);

}  // namespace visor

#endif  // VISOR_METRICS_H_
