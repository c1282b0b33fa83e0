#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfprobe/kinds.hpp"

namespace cfprobe {

/// Case-fold, strip punctuation, drop articles, spell-out numbers zero..ten
/// as digits, collapse whitespace. Idempotent.
std::string normalize_answer(std::string_view raw);

enum class CorrectnessRule {
  ExactAny,  // 1 if the answer equals any ground truth, else 0
  VqaSoft,   // min(1, matching annotators / 3)
};

std::string_view rule_name(CorrectnessRule rule);
std::optional<CorrectnessRule> parse_rule(std::string_view text);

class EvaluationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Credit in [0,1] for an already normalized answer against normalized
/// ground truths. Throws EvaluationError for an empty ground-truth list.
double score_answer(std::string_view normalized, std::span<const std::string> ground_truths,
                    CorrectnessRule rule);

/// True iff the answer matches at least one ground truth.
bool is_correct(std::string_view normalized, std::span<const std::string> ground_truths);

struct AnswerRecord {
  std::string question_id;
  std::optional<PerturbationKind> kind;  // empty for the original question
  std::string question;
  std::string raw_answer;
  std::string normalized_answer;
  std::vector<std::string> ground_truths;  // normalized
  bool correct = false;
  double score = 0.0;
  std::optional<std::string> error;  // set when the model call failed

  bool operator==(const AnswerRecord&) const = default;
};

/// Builds a scored record; ground truths are normalized here.
AnswerRecord make_record(std::string question_id, std::optional<PerturbationKind> kind,
                         std::string question, std::string raw_answer,
                         std::span<const std::string> ground_truths, CorrectnessRule rule);

/// Mean per-record score. Throws EvaluationError on an empty list.
double compute_accuracy(std::span<const AnswerRecord> records);

/// 100 * (acc_q - acc_star_q) / acc_q, or 0 when acc_q is 0.
double relative_reduction_pct(double acc_q, double acc_star_q);

struct PairedOutcome {
  std::string question_id;
  PerturbationKind kind{Category::DeletionNoun};
  std::string answer_original;        // normalized
  std::string answer_counterfactual;  // normalized
  bool changed = false;
  bool correct_original = false;
  bool correct_counterfactual = false;

  bool operator==(const PairedOutcome&) const = default;
};

struct AccuracyReport {
  PerturbationKind kind{Category::DeletionNoun};
  std::size_t n_questions = 0;
  double acc_q = 0.0;
  double acc_star_q = 0.0;
  double relative_reduction_pct = 0.0;
  std::size_t n_changed = 0;
  std::size_t n_failed = 0;  // pairs dropped because a model call failed

  bool operator==(const AccuracyReport&) const = default;
};

/// Joins counterfactual records to their originals by question id and
/// scores only the questions that have a counterfactual. Pairs where either
/// call failed are dropped and counted. Throws EvaluationError when a
/// counterfactual has no original, or when nothing is left to score.
std::pair<std::vector<PairedOutcome>, AccuracyReport> compare_runs(
    std::span<const AnswerRecord> original_records, std::span<const AnswerRecord> cf_records);

}  // namespace cfprobe
