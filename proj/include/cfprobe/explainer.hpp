#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfprobe/evaluator.hpp"
#include "cfprobe/kinds.hpp"
#include "cfprobe/perturber.hpp"
#include "cfprobe/wordnet.hpp"

namespace cfprobe {

class ExplainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "concept X became Y in the question; the answer did / did not change".
struct LocalExplanation {
  std::string question_id;
  PerturbationKind kind{Category::DeletionNoun};
  std::string concept_word;                // X
  std::optional<std::string> replacement;  // Y, absent for deletions
  std::string answer_original;
  std::string answer_counterfactual;
  bool changed = false;
  std::string anchor;  // grouping concept for rule mining

  bool operator==(const LocalExplanation&) const = default;
};

enum class Verdict { StableUnderPerturbation, VolatileUnderPerturbation };
std::string_view verdict_name(Verdict verdict);

struct GlobalRule {
  PerturbationKind kind{Category::DeletionNoun};
  std::string anchor;
  std::size_t support = 0;
  std::size_t change_count = 0;
  double change_rate = 0.0;
  Verdict verdict = Verdict::StableUnderPerturbation;
  std::vector<std::string> exemplar_ids;

  bool operator==(const GlobalRule&) const = default;
};

struct MiningParams {
  std::size_t min_support = 5;
  double stable_threshold = 0.2;
  double volatile_threshold = 0.8;
};

/// Joins outcomes with the substitution records that produced them, one
/// local per outcome. Color anchors are the original color name; WordNet
/// anchors are the base form of X when a graph is given, else X lowercased.
/// Throws ExplainError for an outcome without a matching record.
std::vector<LocalExplanation> collect_locals(std::span<const PairedOutcome> outcomes,
                                             std::span<const SubstitutionRecord> records,
                                             const WordNetGraph* graph = nullptr);

/// Second grouping pass for noun kinds: anchor becomes the first lemma of the
/// first immediate hypernym of X's first sense. Other locals are unchanged.
std::vector<LocalExplanation> anchor_by_hypernym(std::vector<LocalExplanation> locals,
                                                 const WordNetGraph& graph);

/// Groups by (kind, anchor) and keeps groups with enough support whose change
/// rate clears a threshold. Sorted by support descending, then anchor, then
/// kind. Throws ExplainError for inconsistent parameters.
std::vector<GlobalRule> mine_rules(std::span<const LocalExplanation> locals, const MiningParams& params);

/// What the kind is expected to do to a robust model's answer.
std::string_view expected_direction(const PerturbationKind& kind);

/// "IF <kind> perturbs <anchor> THEN answer <stays|changes> (rate r, support s)"
std::string rule_line(const GlobalRule& rule);

struct ExplanationReport {
  std::vector<GlobalRule> rules;
  std::vector<LocalExplanation> locals;

  bool operator==(const ExplanationReport&) const = default;
};

std::string report_to_json(const ExplanationReport& report);
/// Throws ExplainError on malformed input.
ExplanationReport report_from_json(std::string_view text);

/// Writes rules.json and rules.md into out_dir. Throws ExplainError when the
/// directory cannot be written.
void render_report(std::span<const GlobalRule> rules, std::span<const LocalExplanation> locals,
                   const std::filesystem::path& out_dir);

}  // namespace cfprobe
