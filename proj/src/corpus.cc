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
#include "visor/corpus.h"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <string_view>
#include <unordered_set>

#include "json.hpp"
#include "prompt_json.h"
#include "visor/error.h"

namespace visor {
namespace {

using OrderedJson = nlohmann::ordered_json;

// Uniform index in [0, n). std::uniform_int_distribution is not specified
// bit-exactly across standard libraries, so reject-sample the raw engine.
std::size_t UniformIndex(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % bound);
}

// Bit 0: size present, bit 1: color present.
std::size_t ChoicesFor(unsigned mask, const AttributeVocabulary& vocab) {
  std::size_t n = 1;
  if (mask & 1u) n *= vocab.sizes.size();
  if (mask & 2u) n *= vocab.colors.size();
  return n;
}

std::vector<Prompt> SampleAttributed(const Vocabulary& vocabulary,
                                     const CorpusConfig& config) {
  const AttributeVocabulary& vocab = config.attributes;
  const std::vector<Predicate> predicates =
      EnumeratePredicates(vocabulary.categories());

  // The 15 combination types: every (mask_a, mask_b) except (none, none).
  std::vector<std::pair<unsigned, unsigned>> combos;
  std::size_t space = 0;
  for (unsigned ma = 0; ma < 4; ++ma) {
    for (unsigned mb = 0; mb < 4; ++mb) {
      if (ma == 0 && mb == 0) continue;
      const std::size_t choices = ChoicesFor(ma, vocab) * ChoicesFor(mb, vocab);
      if (choices == 0) continue;
      combos.emplace_back(ma, mb);
      space += choices;
    }
  }
  space *= predicates.size();
  if (config.attributed_count > space) {
    throw ValidationError("attributed_count " +
                          std::to_string(config.attributed_count) +
                          " exceeds the " + std::to_string(space) +
                          " distinct attributed prompts available");
  }

  std::mt19937_64 rng(config.seed);
  auto pick = [&](const std::vector<std::string>& values) {
    return values[UniformIndex(rng, values.size())];
  };
  std::set<std::string> seen;
  std::vector<Prompt> prompts;
  prompts.reserve(config.attributed_count);
  while (prompts.size() < config.attributed_count) {
    const Predicate& p = predicates[UniformIndex(rng, predicates.size())];
    const auto [ma, mb] = combos[UniformIndex(rng, combos.size())];
    PromptVariant variant{VariantKind::kAttributed, {}};
    Attributes& attr = variant.attributes;
    if (ma & 1u) attr.size_a = pick(vocab.sizes);
    if (ma & 2u) attr.color_a = pick(vocab.colors);
    if (mb & 1u) attr.size_b = pick(vocab.sizes);
    if (mb & 2u) attr.color_b = pick(vocab.colors);
    Prompt prompt = MakePrompt(p, variant);
    if (seen.insert(prompt.id).second) prompts.push_back(std::move(prompt));
  }
  std::sort(prompts.begin(), prompts.end(),
            [](const Prompt& a, const Prompt& b) { return a.id < b.id; });
  return prompts;
}

std::string RequireString(const OrderedJson& record, const char* field,
                          std::size_t line) {
  auto it = record.find(field);
  if (it == record.end()) throw ParseError(line, field, "missing");
  if (!it->is_string()) throw ParseError(line, field, "expected a string");
  return it->get<std::string>();
}

std::optional<std::string> OptionalString(const OrderedJson& object,
                                          const char* field,
                                          std::size_t line) {
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(line, field, "expected a string");
  return it->get<std::string>();
}

}  // namespace

AttributeVocabulary AttributeVocabulary::Default() {
  return {{"tiny", "small", "big", "huge"},
          {"red", "orange", "yellow", "green", "blue", "purple", "black",
           "white"}};
}

void ValidateAttributes(const Attributes& attributes,
                        const AttributeVocabulary& vocabulary) {
  auto check = [](const std::optional<std::string>& value,
                  const std::vector<std::string>& allowed, const char* field) {
    if (value && std::find(allowed.begin(), allowed.end(), *value) ==
                     allowed.end()) {
      throw ValidationError(std::string(field) + " '" + *value +
                            "' is not in the attribute vocabulary");
    }
  };
  check(attributes.size_a, vocabulary.sizes, "size_a");
  check(attributes.color_a, vocabulary.colors, "color_a");
  check(attributes.size_b, vocabulary.sizes, "size_b");
  check(attributes.color_b, vocabulary.colors, "color_b");
}

Vocabulary RepresentativeVocabulary() {
  const Vocabulary& coco = Vocabulary::Coco();
  std::vector<ObjectCategory> categories;
  for (const char* name :
       {"car", "bench", "dog", "suitcase", "sports ball", "cup", "cake",
        "chair", "laptop", "microwave", "book"}) {
    categories.push_back(*coco.Find(name));
  }
  return Vocabulary(std::move(categories));
}

std::vector<Prompt> GenerateCorpus(const Vocabulary& vocabulary,
                                   const CorpusConfig& config) {
  std::vector<Prompt> corpus;
  for (VariantKind kind : config.variants) {
    switch (kind) {
      case VariantKind::kPhrase:
      case VariantKind::kSentence:
      case VariantKind::kSplitSentence:
        for (const Predicate& p : EnumeratePredicates(vocabulary.categories())) {
          corpus.push_back(MakePrompt(p, {kind, {}}));
        }
        break;
      case VariantKind::kConjunction:
        for (const Predicate& p : EnumeratePredicates(vocabulary.categories())) {
          if (p.relation != Relation::kLeft) continue;
          corpus.push_back(MakePrompt(p, {kind, {}}));
        }
        break;
      case VariantKind::kSingleObject:
        for (const ObjectCategory& c : vocabulary.categories()) {
          corpus.push_back(MakeSingleObjectPrompt(c));
        }
        break;
      case VariantKind::kAttributed:
        for (Prompt& p : SampleAttributed(vocabulary, config)) {
          ValidateAttributes(p.variant.attributes, config.attributes);
          corpus.push_back(std::move(p));
        }
        break;
    }
  }
  return corpus;
}

void AppendPromptFields(const Prompt& prompt, nlohmann::ordered_json& record) {
  record["text"] = prompt.text;
  record["object_a"] = prompt.object_a.name;
  if (prompt.object_b) record["object_b"] = prompt.object_b->name;
  if (prompt.relation) record["relation"] = RelationName(*prompt.relation);
  record["variant"] = VariantName(prompt.variant.kind);
  if (prompt.variant.kind == VariantKind::kAttributed) {
    OrderedJson attributes = OrderedJson::object();
    const Attributes& attr = prompt.variant.attributes;
    if (attr.size_a) attributes["size_a"] = *attr.size_a;
    if (attr.color_a) attributes["color_a"] = *attr.color_a;
    if (attr.size_b) attributes["size_b"] = *attr.size_b;
    if (attr.color_b) attributes["color_b"] = *attr.color_b;
    record["attributes"] = std::move(attributes);
  }
}

std::string PromptToJsonLine(const Prompt& prompt) {
  OrderedJson record;
  record["id"] = prompt.id;
  AppendPromptFields(prompt, record);
  return record.dump();
}

void WriteCorpus(std::ostream& out, std::span<const Prompt> prompts) {
  for (const Prompt& prompt : prompts) out << PromptToJsonLine(prompt) << '\n';
  if (!out) throw IoError("failed writing prompt file");
}

Prompt PromptFromJson(const nlohmann::ordered_json& record,
                      std::size_t line_no, const Vocabulary& vocabulary,
                      const char* id_field) {
  if (!record.is_object()) throw ParseError(line_no, "", "expected an object");
  Prompt prompt;
  prompt.id = RequireString(record, id_field, line_no);
  prompt.text = RequireString(record, "text", line_no);
  auto lookup = [&](const std::string& name, const char* field) {
    const ObjectCategory* c = vocabulary.Find(name);
    if (c == nullptr) {
      throw ParseError(line_no, field, "unknown category '" + name + "'");
    }
    return *c;
  };
  prompt.object_a = lookup(RequireString(record, "object_a", line_no),
                           "object_a");
  if (auto b = OptionalString(record, "object_b", line_no)) {
    prompt.object_b = lookup(*b, "object_b");
  }
  if (auto r = OptionalString(record, "relation", line_no)) {
    prompt.relation = ParseRelation(*r);
    if (!prompt.relation) {
      throw ParseError(line_no, "relation", "unknown relation '" + *r + "'");
    }
  }
  const std::string variant = RequireString(record, "variant", line_no);
  auto kind = ParseVariantKind(variant);
  if (!kind) {
    throw ParseError(line_no, "variant", "unknown variant '" + variant + "'");
  }
  prompt.variant.kind = *kind;
  if (auto it = record.find("attributes");
      it != record.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw ParseError(line_no, "attributes", "expected an object");
    }
    Attributes& attr = prompt.variant.attributes;
    attr.size_a = OptionalString(*it, "size_a", line_no);
    attr.color_a = OptionalString(*it, "color_a", line_no);
    attr.size_b = OptionalString(*it, "size_b", line_no);
    attr.color_b = OptionalString(*it, "color_b", line_no);
  }

  const bool two_objects = *kind != VariantKind::kSingleObject;
  if (two_objects && !prompt.object_b) {
    throw ParseError(line_no, "object_b", "missing");
  }
  if (two_objects && *kind != VariantKind::kConjunction && !prompt.relation) {
    throw ParseError(line_no, "relation", "missing");
  }
  if (prompt.object_b && prompt.object_b->name == prompt.object_a.name) {
    throw ParseError(line_no, "object_b", "must differ from object_a");
  }
  return prompt;
}

std::vector<Prompt> ReadCorpus(std::istream& in, const Vocabulary& vocabulary) {
  std::vector<Prompt> prompts;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    OrderedJson record;
    try {
      record = OrderedJson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    Prompt prompt = PromptFromJson(record, line_no, vocabulary, "id");
    if (!ids.insert(prompt.id).second) {
      throw ParseError(line_no, "id", "duplicate prompt id '" + prompt.id + "'");
    }
    prompts.push_back(std::move(prompt));
  }
  return prompts;
}

}  // namespace visor
