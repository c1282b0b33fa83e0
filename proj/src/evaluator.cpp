#include "cfprobe/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "cfprobe/strings.hpp"

namespace cfprobe {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 11> kNumbers{{
    {"zero", "0"},
    {"one", "1"},
    {"two", "2"},
    {"three", "3"},
    {"four", "4"},
    {"five", "5"},
    {"six", "6"},
    {"seven", "7"},
    {"eight", "8"},
    {"nine", "9"},
    {"ten", "10"},
}};

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    cleaned.push_back(static_cast<char>(std::tolower(u)));
  }
  std::string out;
  for (auto word : split_ws(cleaned)) {
    if (word == "a" || word == "an" || word == "the") continue;
    for (const auto& [spelled, digits] : kNumbers) {
      if (word == spelled) {
        word = digits;
        break;
      }
    }
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::string_view rule_name(CorrectnessRule rule) {
  return rule == CorrectnessRule::ExactAny ? "exact-any" : "vqa-soft";
}

std::optional<CorrectnessRule> parse_rule(std::string_view text) {
  if (text == "exact-any") return CorrectnessRule::ExactAny;
  if (text == "vqa-soft") return CorrectnessRule::VqaSoft;
  return std::nullopt;
}

double score_answer(std::string_view normalized, std::span<const std::string> ground_truths,
                    CorrectnessRule rule) {
  if (ground_truths.empty()) throw EvaluationError("cannot score against an empty ground-truth list");
  const auto matches = static_cast<double>(std::count(ground_truths.begin(), ground_truths.end(), normalized));
  if (rule == CorrectnessRule::ExactAny) return matches > 0 ? 1.0 : 0.0;
  return std::min(1.0, matches / 3.0);
}

bool is_correct(std::string_view normalized, std::span<const std::string> ground_truths) {
  if (ground_truths.empty()) throw EvaluationError("cannot score against an empty ground-truth list");
  return std::find(ground_truths.begin(), ground_truths.end(), normalized) != ground_truths.end();
}

AnswerRecord make_record(std::string question_id, std::optional<PerturbationKind> kind,
                         std::string question, std::string raw_answer,
                         std::span<const std::string> ground_truths, CorrectnessRule rule) {
  AnswerRecord r;
  r.question_id = std::move(question_id);
  r.kind = kind;
  r.question = std::move(question);
  r.normalized_answer = normalize_answer(raw_answer);
  r.raw_answer = std::move(raw_answer);
  for (const auto& gt : ground_truths) r.ground_truths.push_back(normalize_answer(gt));
  r.score = score_answer(r.normalized_answer, r.ground_truths, rule);
  r.correct = is_correct(r.normalized_answer, r.ground_truths);
  return r;
}

double compute_accuracy(std::span<const AnswerRecord> records) {
  if (records.empty()) throw EvaluationError("accuracy of an empty record list is undefined");
  double sum = 0.0;
  for (const auto& r : records) sum += r.score;
  return sum / static_cast<double>(records.size());
}

double relative_reduction_pct(double acc_q, double acc_star_q) {
  if (acc_q <= 0.0) return 0.0;
  return 100.0 * (acc_q - acc_star_q) / acc_q;
}

std::pair<std::vector<PairedOutcome>, AccuracyReport> compare_runs(
    std::span<const AnswerRecord> original_records, std::span<const AnswerRecord> cf_records) {
  std::map<std::string, const AnswerRecord*> originals;
  for (const auto& r : original_records) originals[r.question_id] = &r;

  std::vector<PairedOutcome> outcomes;
  std::vector<AnswerRecord> scored_original;
  std::vector<AnswerRecord> scored_cf;
  AccuracyReport report;
  if (!cf_records.empty() && cf_records.front().kind) report.kind = *cf_records.front().kind;

  for (const auto& cf : cf_records) {
    auto it = originals.find(cf.question_id);
    if (it == originals.end())
      throw EvaluationError("counterfactual record '" + cf.question_id + "' has no original record");
    if (!cf.kind) throw EvaluationError("record '" + cf.question_id + "' is not a counterfactual");
    if (*cf.kind != report.kind) throw EvaluationError("counterfactual records mix perturbation kinds");
    const AnswerRecord& orig = *it->second;
    if (orig.error || cf.error) {
      ++report.n_failed;
      continue;
    }
    PairedOutcome o;
    o.question_id = cf.question_id;
    o.kind = *cf.kind;
    o.answer_original = orig.normalized_answer;
    o.answer_counterfactual = cf.normalized_answer;
    o.changed = o.answer_original != o.answer_counterfactual;
    o.correct_original = orig.correct;
    o.correct_counterfactual = cf.correct;
    if (o.changed) ++report.n_changed;
    outcomes.push_back(std::move(o));
    scored_original.push_back(orig);
    scored_cf.push_back(cf);
  }

  if (scored_cf.empty()) throw EvaluationError("no answered counterfactual pairs to compare");
  report.n_questions = scored_cf.size();
  report.acc_q = compute_accuracy(scored_original);
  report.acc_star_q = compute_accuracy(scored_cf);
  report.relative_reduction_pct = relative_reduction_pct(report.acc_q, report.acc_star_q);
  return {std::move(outcomes), report};
}

}  // namespace cfprobe
