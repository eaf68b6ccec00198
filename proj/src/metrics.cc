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
#include "visor/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "json.hpp"
#include "visor/error.h"

namespace visor {
namespace {

using Json = nlohmann::json;

void RequireNonEmpty(std::size_t n, const char* what) {
  if (n == 0) throw ValidationError(std::string(what) + ": empty input");
}

std::string Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

std::vector<std::string> SplitCsvRow(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(Trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::size_t ParseCount(const std::string& cell, std::size_t line,
                       const char* field) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(cell, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, field, "expected a non-negative integer");
  }
  if (pos != cell.size() || (!cell.empty() && cell.front() == '-')) {
    throw ParseError(line, field, "expected a non-negative integer");
  }
  return static_cast<std::size_t>(value);
}

// Key of the prompt describing the same geometry as `prompt`, or empty when
// the prompt carries no relation.
std::string PartnerId(const Prompt& prompt) {
  auto predicate = prompt.predicate();
  if (!predicate) return {};
  PromptVariant variant = prompt.variant;
  Attributes& attr = variant.attributes;
  std::swap(attr.size_a, attr.size_b);
  std::swap(attr.color_a, attr.color_b);
  return PromptId(EquivalentPredicate(*predicate), variant);
}

}  // namespace

double ObjectAccuracy(std::span<const ImageEvaluation> evals) {
  RequireNonEmpty(evals.size(), "object accuracy");
  const auto hits = std::count_if(evals.begin(), evals.end(),
                                  [](const ImageEvaluation& e) { return e.oa; });
  return static_cast<double>(hits) / static_cast<double>(evals.size());
}

double VisorUncond(std::span<const ImageEvaluation> evals) {
  RequireNonEmpty(evals.size(), "VISOR");
  const auto hits = std::count_if(
      evals.begin(), evals.end(), [](const ImageEvaluation& e) { return e.visor; });
  return static_cast<double>(hits) / static_cast<double>(evals.size());
}

double VisorCond(std::span<const ImageEvaluation> evals) {
  std::size_t both = 0;
  std::size_t correct = 0;
  for (const ImageEvaluation& e : evals) {
    if (!e.oa) continue;
    ++both;
    correct += e.visor ? 1 : 0;
  }
  if (both == 0) {
    throw UndefinedValueError(
        "conditional VISOR is undefined: no image contains both objects");
  }
  return static_cast<double>(correct) / static_cast<double>(both);
}

double VisorN(std::span<const PromptGroup> groups, int n) {
  const int images = ImagesPerPrompt(groups);
  if (n < 0 || n > images + 1) {
    throw ValidationError("n must be in [0, " + std::to_string(images + 1) +
                          "]");
  }
  std::size_t hits = 0;
  for (const PromptGroup& g : groups) {
    const auto correct =
        std::count_if(g.evaluations.begin(), g.evaluations.end(),
                      [](const ImageEvaluation& e) { return e.visor; });
    hits += correct >= n ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(groups.size());
}

double VisorFromVisorN(std::span<const double> visor_n) {
  RequireNonEmpty(visor_n.size(), "VISOR_n identity");
  const std::size_t n_images = visor_n.size();
  double sum = 0.0;
  for (std::size_t n = 1; n <= n_images; ++n) {
    const double next = n < n_images ? visor_n[n] : 0.0;
    sum += static_cast<double>(n) * (visor_n[n - 1] - next);
  }
  return sum / static_cast<double>(n_images);
}

std::vector<ImageEvaluation> FlattenEvaluations(
    std::span<const PromptGroup> groups) {
  std::vector<ImageEvaluation> out;
  for (const PromptGroup& g : groups) {
    out.insert(out.end(), g.evaluations.begin(), g.evaluations.end());
  }
  return out;
}

MetricsSummary Summarize(std::span<const PromptGroup> groups) {
  const int n_images = ImagesPerPrompt(groups);
  MetricsSummary s;
  s.prompts = groups.size();

  std::size_t oa = 0;
  std::size_t visor = 0;
  // prompts_with[k] = number of prompts with exactly k correct images.
  std::vector<std::size_t> prompts_with(n_images + 1, 0);
  for (const PromptGroup& g : groups) {
    int correct = 0;
    for (const ImageEvaluation& e : g.evaluations) {
      oa += e.oa ? 1 : 0;
      correct += e.visor ? 1 : 0;
    }
    visor += correct;
    ++prompts_with[correct];
  }
  s.images = s.prompts * static_cast<std::size_t>(n_images);
  s.oa_pct = 100.0 * static_cast<double>(oa) / static_cast<double>(s.images);
  s.visor_uncond_pct =
      100.0 * static_cast<double>(visor) / static_cast<double>(s.images);
  if (oa > 0) {
    s.visor_cond_pct =
        100.0 * static_cast<double>(visor) / static_cast<double>(oa);
  }
  std::size_t at_least = 0;
  s.visor_n_pct.assign(n_images, 0.0);
  for (int n = n_images; n >= 1; --n) {
    at_least += prompts_with[n];
    s.visor_n_pct[n - 1] =
        100.0 * static_cast<double>(at_least) / static_cast<double>(s.prompts);
  }
  return s;
}

std::string SupercategoryPairKey(const std::string& a, const std::string& b,
                                 const Vocabulary& vocabulary) {
  const auto& order = vocabulary.supercategories();
  auto rank = [&](const std::string& s) {
    return std::find(order.begin(), order.end(), s) - order.begin();
  };
  const bool swap = rank(b) < rank(a) || (rank(a) == rank(b) && b < a);
  return swap ? b + "|" + a : a + "|" + b;
}

std::map<std::string, MetricsSummary> SplitMetrics(
    std::span<const PromptGroup> groups, SplitKey key,
    const Vocabulary& vocabulary) {
  RequireNonEmpty(groups.size(), "split");
  std::map<std::string, std::vector<PromptGroup>> buckets;
  for (const PromptGroup& g : groups) {
    const Prompt& p = g.prompt;
    switch (key) {
      case SplitKey::kRelation:
        if (!p.relation) continue;
        buckets[std::string(RelationName(*p.relation))].push_back(g);
        break;
      case SplitKey::kSupercategoryPair:
        if (!p.object_b) continue;
        buckets[SupercategoryPairKey(p.object_a.supercategory,
                                     p.object_b->supercategory, vocabulary)]
            .push_back(g);
        break;
      case SplitKey::kVariant:
        buckets[std::string(VariantName(p.variant.kind))].push_back(g);
        break;
    }
  }
  std::map<std::string, MetricsSummary> out;
  for (const auto& [k, bucket] : buckets) out.emplace(k, Summarize(bucket));
  return out;
}

ObjectPresence ObjectPositionPresence(std::span<const PromptGroup> groups) {
  ObjectPresence out;
  std::size_t a = 0, b = 0, both = 0;
  for (const PromptGroup& g : groups) {
    if (!g.prompt.object_b) continue;
    for (const ImageEvaluation& e : g.evaluations) {
      ++out.images;
      a += e.object_a_present ? 1 : 0;
      b += e.object_b_present ? 1 : 0;
      both += e.oa ? 1 : 0;
    }
  }
  if (out.images == 0) return out;
  const double total = static_cast<double>(out.images);
  out.a_pct = 100.0 * static_cast<double>(a) / total;
  out.b_pct = 100.0 * static_cast<double>(b) / total;
  out.both_pct = 100.0 * static_cast<double>(both) / total;
  return out;
}

std::optional<double> PairAgreement(const PromptGroup& p,
                                    const PromptGroup& q) {
  if (!p.prompt.relation) {
    throw ValidationError("prompt '" + p.prompt.id + "' has no relation");
  }
  const Relation axis = *p.prompt.relation;
  std::size_t total = 0;
  std::size_t agree = 0;
  for (const ImageEvaluation& pi : p.evaluations) {
    if (!pi.oa) continue;
    // p's subject is q's object, so p's relations read flipped from q's side.
    const RelationSet expected = pi.relations_satisfied.OnAxisOf(axis).Flipped();
    for (const ImageEvaluation& qj : q.evaluations) {
      if (!qj.oa) continue;
      ++total;
      agree += qj.relations_satisfied.OnAxisOf(axis) == expected ? 1 : 0;
    }
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(agree) / static_cast<double>(total);
}

ConsistencyResult Consistency(std::span<const PromptGroup> groups) {
  std::unordered_map<std::string, const PromptGroup*> by_id;
  for (const PromptGroup& g : groups) by_id.emplace(g.prompt.id, &g);

  std::map<Relation, double> sums;
  ConsistencyResult out;
  for (const PromptGroup& g : groups) {
    const std::string partner = PartnerId(g.prompt);
    if (partner.empty()) continue;
    auto it = by_id.find(partner);
    if (it == by_id.end()) continue;
    auto rate = PairAgreement(g, *it->second);
    if (!rate) continue;
    sums[*g.prompt.relation] += *rate;
    ++out.pairs[*g.prompt.relation];
  }
  if (sums.empty()) return out;
  double total = 0.0;
  for (const auto& [r, sum] : sums) {
    const double pct = 100.0 * sum / static_cast<double>(out.pairs[r]);
    out.pct[r] = pct;
    total += pct;
  }
  out.average_pct = total / static_cast<double>(out.pct.size());
  return out;
}

std::vector<ScoreRecord> ParseScores(std::istream& in) {
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(line_no, "", "expected an object");
    ScoreRecord s;
    auto id = record.find("prompt_id");
    if (id == record.end() || !id->is_string()) {
      throw ParseError(line_no, "prompt_id", "expected a string");
    }
    s.prompt_id = id->get<std::string>();
    auto index = record.find("image_index");
    if (index == record.end() || !index->is_number_integer() ||
        index->get<long long>() < 0) {
      throw ParseError(line_no, "image_index",
                       "expected a non-negative integer");
    }
    s.image_index = index->get<int>();
    for (auto [field, dst] : {std::pair{"score", &s.score},
                              std::pair{"score_flipped", &s.score_flipped}}) {
      auto it = record.find(field);
      if (it == record.end() || !it->is_number()) {
        throw ParseError(line_no, field, "expected a number");
      }
      *dst = it->get<double>();
      if (!std::isfinite(*dst)) throw ParseError(line_no, field, "not finite");
    }
    out.push_back(std::move(s));
  }
  return out;
}

double DeltaS(std::span<const ScoreRecord> scores) {
  RequireNonEmpty(scores.size(), "delta_s");
  double sum = 0.0;
  for (const ScoreRecord& s : scores) sum += s.score - s.score_flipped;
  return sum / static_cast<double>(scores.size());
}

CategoryPair MakeCategoryPair(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

CooccurrenceTable CooccurrenceProbability(
    const std::map<std::string, std::set<std::string>>& image_categories) {
  RequireNonEmpty(image_categories.size(), "co-occurrence");
  PairCounts counts;
  counts.total_images = image_categories.size();
  for (const auto& [image, names] : image_categories) {
    for (auto a = names.begin(); a != names.end(); ++a) {
      for (auto b = std::next(a); b != names.end(); ++b) {
        ++counts.counts[MakeCategoryPair(*a, *b)];
      }
    }
  }
  return CooccurrenceProbability(counts);
}

CooccurrenceTable CooccurrenceProbability(const PairCounts& counts) {
  if (counts.total_images == 0) {
    throw ValidationError("co-occurrence: total image count is zero");
  }
  CooccurrenceTable out;
  for (const auto& [pair, count] : counts.counts) {
    if (count > counts.total_images) {
      throw ValidationError("co-occurrence count for (" + pair.first + ", " +
                            pair.second + ") exceeds the image total");
    }
    out[pair] = static_cast<double>(count) /
                static_cast<double>(counts.total_images);
  }
  return out;
}

CooccurrenceTable LoadCooccurrence(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    lines.emplace_back(line_no, std::move(trimmed));
  }
  if (lines.empty()) throw ValidationError("co-occurrence file is empty");

  if (lines.front().second.front() == '{') {
    std::map<std::string, std::set<std::string>> images;
    for (const auto& [no, text] : lines) {
      Json record;
      try {
        record = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw ParseError(no, "", std::string("invalid JSON: ") + e.what());
      }
      auto id = record.find("image_id");
      if (id == record.end() || !(id->is_string() || id->is_number_integer())) {
        throw ParseError(no, "image_id", "expected a string or integer");
      }
      const std::string key =
          id->is_string() ? id->get<std::string>() : id->dump();
      auto cats = record.find("categories");
      if (cats == record.end() || !cats->is_array()) {
        throw ParseError(no, "categories", "expected an array");
      }
      auto [slot, inserted] = images.try_emplace(key);
      if (!inserted) throw ParseError(no, "image_id", "duplicate '" + key + "'");
      for (const auto& c : *cats) {
        if (!c.is_string()) throw ParseError(no, "categories", "expected strings");
        slot->second.insert(NormalizeLabel(c.get<std::string>()));
      }
    }
    return CooccurrenceProbability(images);
  }

  PairCounts counts;
  const auto header = SplitCsvRow(lines.front().second);
  if (header.size() != 2 || header[0] != "total_images") {
    throw ParseError(lines.front().first, "total_images",
                     "expected header 'total_images,<n>'");
  }
  counts.total_images =
      ParseCount(header[1], lines.front().first, "total_images");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, text] = lines[i];
    const auto cells = SplitCsvRow(text);
    if (cells.size() != 3) throw ParseError(no, "", "expected 'a,b,count'");
    if (cells[0].empty() || cells[1].empty() || cells[0] == cells[1]) {
      throw ParseError(no, "name", "need two distinct category names");
    }
    auto [slot, inserted] = counts.counts.emplace(
        MakeCategoryPair(NormalizeLabel(cells[0]), NormalizeLabel(cells[1])),
        ParseCount(cells[2], no, "count"));
    if (!inserted) throw ParseError(no, "name", "duplicate pair");
  }
  return CooccurrenceProbability(counts);
}

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw ValidationError("pearson: inputs differ in length");
  }
  if (xs.size() < 2) throw ValidationError("pearson: need at least 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedValueError("pearson: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult CorrelateWithCooccurrence(std::span<const PromptGroup> groups,
                                            const CooccurrenceTable& table) {
  std::map<CategoryPair, std::vector<ImageEvaluation>> by_pair;
  for (const PromptGroup& g : groups) {
    if (!g.prompt.relation || !g.prompt.object_b) continue;
    auto& evals = by_pair[MakeCategoryPair(g.prompt.object_a.name,
                                           g.prompt.object_b->name)];
    evals.insert(evals.end(), g.evaluations.begin(), g.evaluations.end());
  }
  std::vector<double> p_all, oa, p_cond, cond;
  for (const auto& [pair, evals] : by_pair) {
    auto it = table.find(pair);
    const double p = it == table.end() ? 0.0 : it->second;
    p_all.push_back(p);
    oa.push_back(ObjectAccuracy(evals));
    if (std::any_of(evals.begin(), evals.end(),
                    [](const ImageEvaluation& e) { return e.oa; })) {
      p_cond.push_back(p);
      cond.push_back(VisorCond(evals));
    }
  }
  CorrelationResult out;
  out.pairs = p_all.size();
  out.oa_r = Pearson(p_all, oa);
  out.cond_pairs = p_cond.size();
  // A constant VISOR_cond column leaves the coefficient undefined; OA still
  // carries a result.
  if (p_cond.size() >= 2) {
    try {
      out.visor_cond_r = Pearson(p_cond, cond);
    } catch (const UndefinedValueError&) {
    }
  }
  return out;
}

}  // namespace visor
