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
#include "visor/sr2d.h"

#include <algorithm>
#include <cctype>
#include <unordered_set>
#include <utility>

#include "visor/error.h"

namespace visor {
namespace {

constexpr std::array<std::string_view, 4> kRelationNames = {"left", "right",
                                                            "above", "below"};

constexpr std::array<std::string_view, 6> kVariantNames = {
    "phrase",       "sentence",      "split-sentence",
    "attributed",   "single-object", "conjunction"};

std::string Trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string Capitalize(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

// "a red dog", "an orange car", "a small cat".
std::string NounPhrase(const ObjectCategory& category,
                       const std::optional<std::string>& size,
                       const std::optional<std::string>& color) {
  std::string words;
  if (size) words += *size + " ";
  if (color) words += *color + " ";
  words += category.name;
  return std::string(IndefiniteArticle(words)) + " " + words;
}

std::string_view RelationPhrase(Relation r) {
  switch (r) {
    case Relation::kLeft:
      return "to the left of";
    case Relation::kRight:
      return "to the right of";
    case Relation::kAbove:
      return "above";
    case Relation::kBelow:
      return "below";
  }
  return "";
}

// Where the subject sits in a split-sentence rendering.
std::string_view Placement(Relation r) {
  switch (r) {
    case Relation::kLeft:
      return "on the left";
    case Relation::kRight:
      return "on the right";
    case Relation::kAbove:
      return "at the top";
    case Relation::kBelow:
      return "at the bottom";
  }
  return "";
}

std::string IdToken(std::string_view name) {
  std::string token(name);
  std::replace(token.begin(), token.end(), ' ', '-');
  return token;
}

}  // namespace

std::string_view RelationName(Relation r) {
  return kRelationNames[static_cast<std::size_t>(r)];
}

std::optional<Relation> ParseRelation(std::string_view name) {
  for (Relation r : kAllRelations) {
    if (RelationName(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view IndefiniteArticle(std::string_view word) {
  if (word.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(word.front()))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

Vocabulary::Vocabulary(std::vector<ObjectCategory> categories)
    : categories_(std::move(categories)) {
  if (categories_.empty()) {
    throw ValidationError("category vocabulary is empty");
  }
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    const ObjectCategory& c = categories_[i];
    if (c.name.empty()) {
      throw ValidationError("category " + std::to_string(i) +
                            " has an empty name");
    }
    if (!index_.emplace(c.name, i).second) {
      throw ValidationError("duplicate category name '" + c.name + "'");
    }
    if (std::find(supercategories_.begin(), supercategories_.end(),
                  c.supercategory) == supercategories_.end()) {
      supercategories_.push_back(c.supercategory);
    }
  }
}

const Vocabulary& Vocabulary::Coco() {
  static const Vocabulary coco([] {
    struct Group {
      const char* supercategory;
      std::vector<const char*> names;
    };
    const std::vector<Group> groups = {
        {"person", {"person"}},
        {"vehicle",
         {"bicycle", "car", "motorcycle", "airplane", "bus", "train", "truck",
          "boat"}},
        {"outdoor",
         {"traffic light", "fire hydrant", "stop sign", "parking meter",
          "bench"}},
        {"animal",
         {"bird", "cat", "dog", "horse", "sheep", "cow", "elephant", "bear",
          "zebra", "giraffe"}},
        {"accessory", {"backpack", "umbrella", "handbag", "tie", "suitcase"}},
        {"sports",
         {"frisbee", "skis", "snowboard", "sports ball", "kite",
          "baseball bat", "baseball glove", "skateboard", "surfboard",
          "tennis racket"}},
        {"kitchen",
         {"bottle", "wine glass", "cup", "fork", "knife", "spoon", "bowl"}},
        {"food",
         {"banana", "apple", "sandwich", "orange", "broccoli", "carrot",
          "hot dog", "pizza", "donut", "cake"}},
        {"furniture",
         {"chair", "couch", "potted plant", "bed", "dining table", "toilet"}},
        {"electronic",
         {"tv", "laptop", "mouse", "remote", "keyboard", "cell phone"}},
        {"appliance",
         {"microwave", "oven", "toaster", "sink", "refrigerator"}},
        {"indoor",
         {"book", "clock", "vase", "scissors", "teddy bear", "hair drier",
          "toothbrush"}},
    };
    std::vector<ObjectCategory> categories;
    for (const Group& g : groups) {
      for (const char* name : g.names) {
        categories.push_back({name, g.supercategory});
      }
    }
    return Vocabulary(std::move(categories));
  }());
  return coco;
}

Vocabulary Vocabulary::Load(std::istream& in) {
  std::vector<ObjectCategory> categories;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const std::size_t sep = trimmed.find_first_of(",\t");
    if (sep == std::string::npos) {
      throw ParseError(line_no, "supercategory",
                       "expected 'name,supercategory'");
    }
    ObjectCategory c{Trim(std::string_view(trimmed).substr(0, sep)),
                     Trim(std::string_view(trimmed).substr(sep + 1))};
    if (c.name.empty()) throw ParseError(line_no, "name", "empty name");
    if (c.supercategory.empty()) {
      throw ParseError(line_no, "supercategory", "empty supercategory");
    }
    categories.push_back(std::move(c));
  }
  return Vocabulary(std::move(categories));
}

const ObjectCategory* Vocabulary::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &categories_[it->second];
}

Predicate EquivalentPredicate(const Predicate& p) {
  return {p.object, p.subject, FlipRelation(p.relation)};
}

std::vector<Predicate> EnumeratePredicates(
    std::span<const ObjectCategory> categories) {
  std::unordered_set<std::string> seen;
  for (const ObjectCategory& c : categories) {
    if (!seen.insert(c.name).second) {
      throw ValidationError("duplicate category name '" + c.name + "'");
    }
  }
  std::vector<const ObjectCategory*> sorted;
  sorted.reserve(categories.size());
  for (const ObjectCategory& c : categories) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const ObjectCategory* a, const ObjectCategory* b) {
              return a->name < b->name;
            });

  std::vector<Predicate> predicates;
  const std::size_t n = sorted.size();
  predicates.reserve(n * (n - 1) * 4);
  // Ordered pairs (A, B), A != B, in (A.name, B.name) order cover both
  // orderings of every unordered pair.
  for (const ObjectCategory* a : sorted) {
    for (const ObjectCategory* b : sorted) {
      if (a == b) continue;
      for (Relation r : kAllRelations) predicates.push_back({*a, *b, r});
    }
  }
  return predicates;
}

std::string_view VariantName(VariantKind kind) {
  return kVariantNames[static_cast<std::size_t>(kind)];
}

std::optional<VariantKind> ParseVariantKind(std::string_view name) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == name) return static_cast<VariantKind>(i);
  }
  return std::nullopt;
}

std::string RenderPrompt(const Predicate& p, const PromptVariant& variant) {
  const std::string a = NounPhrase(p.subject, std::nullopt, std::nullopt);
  const std::string b = NounPhrase(p.object, std::nullopt, std::nullopt);
  switch (variant.kind) {
    case VariantKind::kPhrase:
      return Capitalize(a + " " + std::string(RelationPhrase(p.relation)) +
                        " " + b);
    case VariantKind::kSentence:
      return "There is " + a + " " + std::string(RelationPhrase(p.relation)) +
             " " + b;
    case VariantKind::kSplitSentence:
      return "There is " + a + " " + std::string(Placement(p.relation)) +
             ". There is " + b + " " +
             std::string(Placement(FlipRelation(p.relation))) + ".";
    case VariantKind::kAttributed: {
      const Attributes& attr = variant.attributes;
      return Capitalize(NounPhrase(p.subject, attr.size_a, attr.color_a) +
                        " " + std::string(RelationPhrase(p.relation)) + " " +
                        NounPhrase(p.object, attr.size_b, attr.color_b));
    }
    case VariantKind::kConjunction:
      return Capitalize(a + " and " + b);
    case VariantKind::kSingleObject:
      break;
  }
  throw ValidationError("single-object variant takes one category");
}

std::string RenderSingleObject(const ObjectCategory& category) {
  return Capitalize(NounPhrase(category, std::nullopt, std::nullopt));
}

std::optional<Predicate> ParsePhrase(std::string_view text,
                                     const Vocabulary& vocabulary) {
  // "<Article> <A> <relation phrase> <article> <B>"; A and B may contain
  // spaces, so try each relation phrase as the split point.
  auto strip_article = [](std::string_view s) -> std::optional<std::string_view> {
    for (std::string_view art : {"A ", "An ", "a ", "an "}) {
      if (s.substr(0, art.size()) == art) return s.substr(art.size());
    }
    return std::nullopt;
  };
  for (Relation r : kAllRelations) {
    const std::string sep = " " + std::string(RelationPhrase(r)) + " ";
    const std::size_t pos = text.find(sep);
    if (pos == std::string_view::npos) continue;
    auto lhs = strip_article(text.substr(0, pos));
    auto rhs = strip_article(text.substr(pos + sep.size()));
    if (!lhs || !rhs) continue;
    const ObjectCategory* a = vocabulary.Find(*lhs);
    const ObjectCategory* b = vocabulary.Find(*rhs);
    if (a == nullptr || b == nullptr || a == b) continue;
    Predicate p{*a, *b, r};
    if (RenderPrompt(p, {}) != text) continue;
    return p;
  }
  return std::nullopt;
}

std::optional<Predicate> Prompt::predicate() const {
  if (!object_b || !relation) return std::nullopt;
  return Predicate{object_a, *object_b, *relation};
}

std::string PromptId(const Predicate& p, const PromptVariant& variant) {
  std::string id = IdToken(p.subject.name) + "__" + IdToken(p.object.name);
  if (variant.kind == VariantKind::kConjunction) {
    return id + "__conjunction";
  }
  if (variant.kind == VariantKind::kSingleObject) {
    throw ValidationError("single-object variant takes one category");
  }
  id += "__" + std::string(RelationName(p.relation)) + "__" +
        std::string(VariantName(variant.kind));
  if (variant.kind == VariantKind::kAttributed) {
    const Attributes& attr = variant.attributes;
    for (const auto* value :
         {&attr.size_a, &attr.color_a, &attr.size_b, &attr.color_b}) {
      id += "-" + (value->has_value() ? IdToken(**value) : "none");
    }
  }
  return id;
}

std::string SingleObjectPromptId(const ObjectCategory& category) {
  return IdToken(category.name) + "__single-object";
}

Prompt MakePrompt(const Predicate& p, const PromptVariant& variant) {
  if (variant.kind == VariantKind::kSingleObject) {
    return MakeSingleObjectPrompt(p.subject);
  }
  Prompt prompt;
  prompt.id = PromptId(p, variant);
  prompt.text = RenderPrompt(p, variant);
  prompt.variant = variant;
  if (variant.kind != VariantKind::kAttributed) prompt.variant.attributes = {};
  prompt.object_a = p.subject;
  prompt.object_b = p.object;
  if (variant.kind != VariantKind::kConjunction) prompt.relation = p.relation;
  return prompt;
}

Prompt MakeSingleObjectPrompt(const ObjectCategory& category) {
  Prompt prompt;
  prompt.id = SingleObjectPromptId(category);
  prompt.text = RenderSingleObject(category);
  prompt.variant.kind = VariantKind::kSingleObject;
  prompt.object_a = category;
  return prompt;
}

}  // namespace visor
