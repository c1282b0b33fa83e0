#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfprobe/color.hpp"
#include "cfprobe/wordnet.hpp"

namespace cfprobe {

enum class Category {
  ColorMaximal,
  ColorMinimal,
  SynonymAdjective,
  SynonymVerb,
  HypernymNoun,
  HyponymNoun,
  SiblingNoun,
  DeletionNoun,
};

/// One perturbation experiment. Color categories always carry a scope and
/// the others never do; the constructor enforces it.
class PerturbationKind {
 public:
  PerturbationKind() : PerturbationKind(Category::DeletionNoun) {}
  PerturbationKind(Category category, std::optional<CandidateScope> scope = std::nullopt);

  Category category() const { return category_; }
  std::optional<CandidateScope> scope() const { return scope_; }

  bool is_color() const;
  bool is_noun() const;
  /// The POS whose tokens are targeted. Colors have none.
  std::optional<PartOfSpeech> target_pos() const;

  /// "color-maximal:common", "synonym-verb", ...
  std::string id() const;
  /// "Color Maximal (common)", "Synonym Verbs", ...
  std::string label() const;

  bool operator==(const PerturbationKind&) const = default;
  bool operator<(const PerturbationKind& other) const { return id() < other.id(); }

 private:
  Category category_;
  std::optional<CandidateScope> scope_;
};

/// Inverse of PerturbationKind::id(). Throws std::invalid_argument.
PerturbationKind parse_kind(std::string_view text);

/// The eight categories, colors expanded to both scopes (ten kinds).
std::vector<PerturbationKind> all_kinds();

}  // namespace cfprobe
