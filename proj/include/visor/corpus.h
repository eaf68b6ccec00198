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
#ifndef VISOR_CORPUS_H_
#define VISOR_CORPUS_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "visor/sr2d.h"

namespace visor {

struct AttributeVocabulary {
  std::vector<std::string> sizes;
  std::vector<std::string> colors;

  // 4 sizes and 8 colors.
  static AttributeVocabulary Default();
};

// Throws ValidationError if any attribute value is outside `vocabulary`.
void ValidateAttributes(const Attributes& attributes,
                        const AttributeVocabulary& vocabulary);

// One category per supercategory (person excluded), used for attribute
// prompts: car, bench, dog, suitcase, sports ball, cup, cake, chair, laptop,
// microwave, book.
Vocabulary RepresentativeVocabulary();

struct CorpusConfig {
  std::vector<VariantKind> variants = {VariantKind::kPhrase};
  // Number of sampled prompts for the attributed variant.
  std::size_t attributed_count = 1000;
  std::uint64_t seed = 0;
  AttributeVocabulary attributes = AttributeVocabulary::Default();
};

// Prompts for each configured variant, in config order. Two-object variants
// follow EnumeratePredicates order; conjunctions cover every ordered pair;
// single-object prompts follow vocabulary order; attributed prompts are a
// seeded sample without duplicate ids.
std::vector<Prompt> GenerateCorpus(const Vocabulary& vocabulary,
                                   const CorpusConfig& config);

// One JSON object per line: id, text, object_a, object_b, relation, variant,
// attributes (the last three only when applicable).
void WriteCorpus(std::ostream& out, std::span<const Prompt> prompts);
std::string PromptToJsonLine(const Prompt& prompt);

// Parses a prompt file. Category names must exist in `vocabulary`; ids must
// be unique. Throws ParseError naming the line and field.
std::vector<Prompt> ReadCorpus(std::istream& in, const Vocabulary& vocabulary);

}  // namespace visor

#endif  // VISOR_CORPUS_H_
