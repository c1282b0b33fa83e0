#include "cfprobe/serialize.hpp"

namespace cfprobe {

using nlohmann::json;

void to_json(json& j, const PerturbationKind& kind) { j = kind.id(); }

void from_json(const json& j, PerturbationKind& kind) { kind = parse_kind(j.get<std::string>()); }

namespace {

json trace_to_json(const std::vector<TraceStep>& trace) {
  json out = json::array();
  for (const auto& step : trace) {
    if (const auto* id = std::get_if<SynsetId>(&step)) {
      out.push_back({{"synset", to_string(*id)}});
    } else {
      out.push_back({{"color", std::get<std::string>(step)}});
    }
  }
  return out;
}

std::vector<TraceStep> trace_from_json(const json& j) {
  std::vector<TraceStep> out;
  for (const auto& step : j) {
    if (step.contains("synset")) {
      auto id = parse_synset_id(step.at("synset").get<std::string>());
      if (!id) throw std::runtime_error("bad synset id in relation trace");
      out.emplace_back(*id);
    } else {
      out.emplace_back(step.at("color").get<std::string>());
    }
  }
  return out;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const SubstitutionRecord& r) {
  j = json{{"question_id", r.question_id},
           {"kind", r.kind},
           {"token_index", r.token_index},
           {"original", r.original},
           {"replacement", optional_json(r.replacement)},
           {"relation_trace", trace_to_json(r.relation_trace)}};
}

void from_json(const json& j, SubstitutionRecord& r) {
  r.question_id = j.at("question_id").get<std::string>();
  r.kind = j.at("kind").get<PerturbationKind>();
  r.token_index = j.at("token_index").get<std::size_t>();
  r.original = j.at("original").get<std::string>();
  r.replacement = optional_from<std::string>(j, "replacement");
  r.relation_trace = trace_from_json(j.at("relation_trace"));
}

void to_json(json& j, const CounterfactualQuestion& q) {
  j = json{{"question_id", q.question_id}, {"kind", q.kind}, {"text", q.text}, {"record", q.record},
           {"seed", q.seed}};
}

void from_json(const json& j, CounterfactualQuestion& q) {
  q.question_id = j.at("question_id").get<std::string>();
  q.kind = j.at("kind").get<PerturbationKind>();
  q.text = j.at("text").get<std::string>();
  q.record = j.at("record").get<SubstitutionRecord>();
  q.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const AnswerRecord& r) {
  j = json{{"question_id", r.question_id},
           {"variant", r.kind ? json(r.kind->id()) : json("original")},
           {"question", r.question},
           {"raw_answer", r.raw_answer},
           {"normalized_answer", r.normalized_answer},
           {"ground_truths", r.ground_truths},
           {"correct", r.correct},
           {"score", r.score},
           {"error", optional_json(r.error)}};
}

void from_json(const json& j, AnswerRecord& r) {
  r.question_id = j.at("question_id").get<std::string>();
  const auto variant = j.at("variant").get<std::string>();
  r.kind = variant == "original" ? std::nullopt : std::optional<PerturbationKind>(parse_kind(variant));
  r.question = j.at("question").get<std::string>();
  r.raw_answer = j.at("raw_answer").get<std::string>();
  r.normalized_answer = j.at("normalized_answer").get<std::string>();
  r.ground_truths = j.at("ground_truths").get<std::vector<std::string>>();
  r.correct = j.at("correct").get<bool>();
  r.score = j.at("score").get<double>();
  r.error = optional_from<std::string>(j, "error");
}

void to_json(json& j, const PairedOutcome& o) {
  j = json{{"question_id", o.question_id},
           {"kind", o.kind},
           {"answer_original", o.answer_original},
           {"answer_counterfactual", o.answer_counterfactual},
           {"changed", o.changed},
           {"correct_original", o.correct_original},
           {"correct_counterfactual", o.correct_counterfactual}};
}

void to_json(json& j, const AccuracyReport& r) {
  j = json{{"kind", r.kind},
           {"n_questions", r.n_questions},
           {"acc_q", r.acc_q},
           {"acc_star_q", r.acc_star_q},
           {"relative_reduction_pct", r.relative_reduction_pct},
           {"n_changed", r.n_changed},
           {"n_failed", r.n_failed}};
}

void from_json(const json& j, AccuracyReport& r) {
  r.kind = j.at("kind").get<PerturbationKind>();
  r.n_questions = j.at("n_questions").get<std::size_t>();
  r.acc_q = j.at("acc_q").get<double>();
  r.acc_star_q = j.at("acc_star_q").get<double>();
  r.relative_reduction_pct = j.at("relative_reduction_pct").get<double>();
  r.n_changed = j.at("n_changed").get<std::size_t>();
  r.n_failed = j.value("n_failed", std::size_t{0});
}

void to_json(json& j, const LocalExplanation& l) {
  j = json{{"question_id", l.question_id},
           {"kind", l.kind},
           {"concept", l.concept_word},
           {"replacement", optional_json(l.replacement)},
           {"answer_original", l.answer_original},
           {"answer_counterfactual", l.answer_counterfactual},
           {"changed", l.changed},
           {"anchor", l.anchor}};
}

void from_json(const json& j, LocalExplanation& l) {
  l.question_id = j.at("question_id").get<std::string>();
  l.kind = j.at("kind").get<PerturbationKind>();
  l.concept_word = j.at("concept").get<std::string>();
  l.replacement = optional_from<std::string>(j, "replacement");
  l.answer_original = j.at("answer_original").get<std::string>();
  l.answer_counterfactual = j.at("answer_counterfactual").get<std::string>();
  l.changed = j.at("changed").get<bool>();
  l.anchor = j.at("anchor").get<std::string>();
}

void to_json(json& j, const GlobalRule& r) {
  j = json{{"kind", r.kind},
           {"anchor", r.anchor},
           {"support", r.support},
           {"change_count", r.change_count},
           {"change_rate", r.change_rate},
           {"verdict", verdict_name(r.verdict)},
           {"exemplar_ids", r.exemplar_ids}};
}

void from_json(const json& j, GlobalRule& r) {
  r.kind = j.at("kind").get<PerturbationKind>();
  r.anchor = j.at("anchor").get<std::string>();
  r.support = j.at("support").get<std::size_t>();
  r.change_count = j.at("change_count").get<std::size_t>();
  r.change_rate = j.at("change_rate").get<double>();
  const auto verdict = j.at("verdict").get<std::string>();
  if (verdict == verdict_name(Verdict::StableUnderPerturbation)) {
    r.verdict = Verdict::StableUnderPerturbation;
  } else if (verdict == verdict_name(Verdict::VolatileUnderPerturbation)) {
    r.verdict = Verdict::VolatileUnderPerturbation;
  } else {
    throw std::runtime_error("unknown verdict '" + verdict + "'");
  }
  r.exemplar_ids = j.at("exemplar_ids").get<std::vector<std::string>>();
}

}  // namespace cfprobe
