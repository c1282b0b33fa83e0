#include "cfprobe/kinds.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace cfprobe {

namespace {

struct CategoryInfo {
  Category category;
  std::string_view id;
  std::string_view label;
};

constexpr std::array<CategoryInfo, 8> kCategories{{
    {Category::ColorMaximal, "color-maximal", "Color Maximal"},
    {Category::ColorMinimal, "color-minimal", "Color Minimal"},
    {Category::SynonymAdjective, "synonym-adjective", "Synonym Adjectives"},
    {Category::SynonymVerb, "synonym-verb", "Synonym Verbs"},
    {Category::HypernymNoun, "hypernym-noun", "Hypernym Noun"},
    {Category::HyponymNoun, "hyponym-noun", "Hyponym Noun"},
    {Category::SiblingNoun, "sibling-noun", "Sibling Noun"},
    {Category::DeletionNoun, "deletion-noun", "Deletion Noun"},
}};

const CategoryInfo& info(Category c) {
  for (const auto& i : kCategories) {
    if (i.category == c) return i;
  }
  throw std::logic_error("unknown category");
}

}  // namespace

PerturbationKind::PerturbationKind(Category category, std::optional<CandidateScope> scope)
    : category_(category), scope_(scope) {
  if (is_color() != scope.has_value())
    throw std::invalid_argument(is_color() ? "color perturbations need a candidate scope"
                                           : "only color perturbations take a scope");
}

bool PerturbationKind::is_color() const {
  return category_ == Category::ColorMaximal || category_ == Category::ColorMinimal;
}

bool PerturbationKind::is_noun() const {
  return category_ == Category::HypernymNoun || category_ == Category::HyponymNoun ||
         category_ == Category::SiblingNoun || category_ == Category::DeletionNoun;
}

std::optional<PartOfSpeech> PerturbationKind::target_pos() const {
  if (is_noun()) return PartOfSpeech::Noun;
  if (category_ == Category::SynonymVerb) return PartOfSpeech::Verb;
  if (category_ == Category::SynonymAdjective) return PartOfSpeech::Adjective;
  return std::nullopt;
}

std::string PerturbationKind::id() const {
  std::string out(info(category_).id);
  if (scope_) out += ":" + std::string(scope_name(*scope_));
  return out;
}

std::string PerturbationKind::label() const {
  std::string out(info(category_).label);
  if (scope_) out += " (" + std::string(scope_name(*scope_)) + ")";
  return out;
}

PerturbationKind parse_kind(std::string_view text) {
  auto colon = text.find(':');
  auto head = text.substr(0, colon);
  for (const auto& i : kCategories) {
    if (i.id != head) continue;
    std::optional<CandidateScope> scope;
    if (colon != std::string_view::npos) {
      scope = parse_scope(text.substr(colon + 1));
      if (!scope) throw std::invalid_argument("unknown candidate scope in '" + std::string(text) + "'");
    }
    return PerturbationKind(i.category, scope);
  }
  throw std::invalid_argument("unknown perturbation kind '" + std::string(text) + "'");
}

std::vector<PerturbationKind> all_kinds() {
  std::vector<PerturbationKind> out;
  for (const auto& i : kCategories) {
    if (i.category == Category::ColorMaximal || i.category == Category::ColorMinimal) {
      out.emplace_back(i.category, CandidateScope::Common);
      out.emplace_back(i.category, CandidateScope::Uncommon);
    } else {
      out.emplace_back(i.category);
    }
  }
  return out;
}

}  // namespace cfprobe
