#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cfprobe/color.hpp"
#include "cfprobe/dataset.hpp"
#include "cfprobe/kinds.hpp"
#include "cfprobe/lingproc.hpp"
#include "cfprobe/wordnet.hpp"

namespace cfprobe {

/// Everything a perturbation may consult. Borrowed, must outlive its users.
struct KnowledgeBases {
  const WordNetGraph& wordnet;
  const ColorTable& colors;
  const Stoplist& stoplist;
  /// Question vocabulary of the dataset being perturbed; splits the palette
  /// into common and uncommon colors.
  Vocabulary vocabulary;
};

/// A synset visited while deriving a replacement, or a color name.
using TraceStep = std::variant<SynsetId, std::string>;

struct SubstitutionRecord {
  std::string question_id;
  PerturbationKind kind{Category::DeletionNoun};
  std::size_t token_index = 0;
  std::string original;                    // X, as it appeared in the question
  std::optional<std::string> replacement;  // Y; absent for deletions
  std::vector<TraceStep> relation_trace;

  bool operator==(const SubstitutionRecord&) const = default;
};

struct CounterfactualQuestion {
  std::string question_id;
  PerturbationKind kind{Category::DeletionNoun};
  std::string text;
  SubstitutionRecord record;
  std::uint64_t seed = 0;

  bool operator==(const CounterfactualQuestion&) const = default;
};

enum class SkipReason { NoTarget, NoReplacement };
std::string_view skip_reason_name(SkipReason reason);

struct PerturbOutcome {
  std::optional<CounterfactualQuestion> question;
  std::optional<SkipReason> skip;  // set iff question is empty
};

/// A possible Y for one target token, with the relation path that justifies it.
struct Replacement {
  std::string text;
  std::vector<TraceStep> trace;
};

/// Every admissible replacement for `word` under `kind`, most preferred first.
/// WordNet kinds work on the first sense of the word's base form; colors are
/// ordered by distance (ascending for minimal, descending for maximal).
/// Deletions have no replacements and yield an empty list.
std::vector<Replacement> replacement_candidates(std::string_view word, const PerturbationKind& kind,
                                                const KnowledgeBases& kbs);

/// Applies `kind` at a fixed token. The question must already be tagged.
PerturbOutcome perturb_at(const TokenizedQuestion& tq, std::size_t token_index,
                          const PerturbationKind& kind, const KnowledgeBases& kbs,
                          std::string_view question_id = {}, std::uint64_t seed = 0);

/// Picks one eligible target uniformly at random (seeded) among those that
/// admit a replacement, then applies `kind` there.
PerturbOutcome perturb_question(const TokenizedQuestion& tq, const PerturbationKind& kind,
                                const KnowledgeBases& kbs, std::uint64_t seed,
                                std::string_view question_id = {});

/// Per-question seed, independent of dataset order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view question_id);

struct SkipStats {
  std::size_t no_target = 0;
  std::size_t no_replacement = 0;
  std::size_t total() const { return no_target + no_replacement; }
};

struct PerturbSetResult {
  std::vector<CounterfactualQuestion> questions;  // input order
  SkipStats skips;
};

PerturbSetResult perturb_set(const Dataset& dataset, const PerturbationKind& kind,
                             const KnowledgeBases& kbs, std::uint64_t seed);

}  // namespace cfprobe
