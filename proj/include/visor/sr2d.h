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
#ifndef VISOR_SR2D_H_
#define VISOR_SR2D_H_

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace visor {

// Two-dimensional spatial relation of a subject A with respect to an object B.
// Image coordinates: x grows rightward, y grows downward.
enum class Relation : std::uint8_t { kLeft, kRight, kAbove, kBelow };

inline constexpr std::array<Relation, 4> kAllRelations = {
    Relation::kLeft, Relation::kRight, Relation::kAbove, Relation::kBelow};

std::string_view RelationName(Relation r);
std::optional<Relation> ParseRelation(std::string_view name);

// Left <-> Right, Above <-> Below. An involution that never crosses axes.
constexpr Relation FlipRelation(Relation r) {
  switch (r) {
    case Relation::kLeft:
      return Relation::kRight;
    case Relation::kRight:
      return Relation::kLeft;
    case Relation::kAbove:
      return Relation::kBelow;
    case Relation::kBelow:
      return Relation::kAbove;
  }
  return r;
}

constexpr bool IsHorizontal(Relation r) {
  return r == Relation::kLeft || r == Relation::kRight;
}

// "an" iff the word starts with a vowel letter.
std::string_view IndefiniteArticle(std::string_view word);

struct ObjectCategory {
  std::string name;
  std::string supercategory;

  std::string_view article() const { return IndefiniteArticle(name); }

  bool operator==(const ObjectCategory&) const = default;
};

// An ordered category list with name lookup. Names are unique.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws ValidationError on empty or duplicate names.
  explicit Vocabulary(std::vector<ObjectCategory> categories);

  // The 80 MS-COCO categories with their COCO supercategories, in COCO order.
  static const Vocabulary& Coco();

  // Reads "name,supercategory" rows (comma or tab separated). Blank lines
  // and lines starting with '#' are skipped.
  static Vocabulary Load(std::istream& in);

  const std::vector<ObjectCategory>& categories() const { return categories_; }
  std::size_t size() const { return categories_.size(); }

  // Exact name lookup; nullptr when absent.
  const ObjectCategory* Find(std::string_view name) const;

  // Distinct supercategories in order of first appearance.
  const std::vector<std::string>& supercategories() const {
    return supercategories_;
  }

 private:
  std::vector<ObjectCategory> categories_;
  std::vector<std::string> supercategories_;
  std::unordered_map<std::string, std::size_t> index_;
};

// R(A, B): relation R holds between subject A and object B.
struct Predicate {
  ObjectCategory subject;
  ObjectCategory object;
  Relation relation;

  bool operator==(const Predicate&) const = default;
};

// left(A, B) <-> right(B, A); describes the same geometry with swapped roles.
Predicate EquivalentPredicate(const Predicate& p);

// All 8 predicates (4 relations x 2 orderings) for every unordered pair, sorted
// by (subject, object, relation). Throws ValidationError on duplicate names.
std::vector<Predicate> EnumeratePredicates(
    std::span<const ObjectCategory> categories);

enum class VariantKind : std::uint8_t {
  kPhrase,
  kSentence,
  kSplitSentence,
  kAttributed,
  kSingleObject,
  kConjunction,
};

std::string_view VariantName(VariantKind kind);
std::optional<VariantKind> ParseVariantKind(std::string_view name);

struct Attributes {
  std::optional<std::string> size_a;
  std::optional<std::string> color_a;
  std::optional<std::string> size_b;
  std::optional<std::string> color_b;

  bool empty() const { return !size_a && !color_a && !size_b && !color_b; }
  bool operator==(const Attributes&) const = default;
};

struct PromptVariant {
  VariantKind kind = VariantKind::kPhrase;
  Attributes attributes;  // only meaningful for kAttributed

  bool operator==(const PromptVariant&) const = default;
};

// Renders a two-object prompt. Throws ValidationError for kSingleObject.
std::string RenderPrompt(const Predicate& p, const PromptVariant& variant);
std::string RenderSingleObject(const ObjectCategory& category);

// Recovers (A, B, R) from a rendered Phrase prompt. Returns nullopt when the
// text does not match one of the four phrase templates over `vocabulary`.
std::optional<Predicate> ParsePhrase(std::string_view text,
                                     const Vocabulary& vocabulary);

struct Prompt {
  std::string id;
  std::string text;
  PromptVariant variant;
  ObjectCategory object_a;
  std::optional<ObjectCategory> object_b;
  std::optional<Relation> relation;

  // Present for every variant that carries a relation.
  std::optional<Predicate> predicate() const;
};

// `<A>__<B>__<relation>__<variant>`, spaces in names replaced by hyphens.
std::string PromptId(const Predicate& p, const PromptVariant& variant);
std::string SingleObjectPromptId(const ObjectCategory& category);

Prompt MakePrompt(const Predicate& p, const PromptVariant& variant);
Prompt MakeSingleObjectPrompt(const ObjectCategory& category);

}  // namespace visor

#endif  // VISOR_SR2D_H_
