#include "cfprobe/explainer.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "cfprobe/serialize.hpp"
#include "cfprobe/strings.hpp"

namespace cfprobe {

using nlohmann::json;

std::string_view verdict_name(Verdict verdict) {
  return verdict == Verdict::StableUnderPerturbation ? "stable" : "volatile";
}

std::vector<LocalExplanation> collect_locals(std::span<const PairedOutcome> outcomes,
                                             std::span<const SubstitutionRecord> records,
                                             const WordNetGraph* graph) {
  std::map<std::pair<std::string, std::string>, const SubstitutionRecord*> by_key;
  for (const auto& r : records) by_key[{r.question_id, r.kind.id()}] = &r;

  std::vector<LocalExplanation> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    auto it = by_key.find({o.question_id, o.kind.id()});
    if (it == by_key.end())
      throw ExplainError("no substitution record for question '" + o.question_id + "' under " + o.kind.id());
    const SubstitutionRecord& r = *it->second;

    LocalExplanation l;
    l.question_id = o.question_id;
    l.kind = o.kind;
    l.concept_word = r.original;
    l.replacement = r.replacement;
    l.answer_original = o.answer_original;
    l.answer_counterfactual = o.answer_counterfactual;
    l.changed = o.changed;
    l.anchor = to_lower(r.original);
    if (graph && !o.kind.is_color()) {
      auto forms = graph->lemmatize(l.anchor, *o.kind.target_pos());
      if (!forms.empty()) l.anchor = display_lemma(forms.front());
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<LocalExplanation> anchor_by_hypernym(std::vector<LocalExplanation> locals,
                                                 const WordNetGraph& graph) {
  for (auto& l : locals) {
    if (!l.kind.is_noun()) continue;
    auto forms = graph.lemmatize(to_lower(l.concept_word), PartOfSpeech::Noun);
    if (forms.empty()) continue;
    auto senses = graph.lookup(forms.front(), PartOfSpeech::Noun);
    if (senses.empty()) continue;
    auto parents = graph.hypernyms(senses.front());
    if (parents.empty()) continue;
    l.anchor = display_lemma(graph.synset(parents.front()).lemmas.front());
  }
  return locals;
}

std::vector<GlobalRule> mine_rules(std::span<const LocalExplanation> locals, const MiningParams& params) {
  if (params.min_support < 1) throw ExplainError("min_support must be at least 1");
  if (params.stable_threshold < 0.0 || params.stable_threshold > 1.0 || params.volatile_threshold < 0.0 ||
      params.volatile_threshold > 1.0)
    throw ExplainError("thresholds must lie in [0, 1]");
  if (params.stable_threshold >= params.volatile_threshold)
    throw ExplainError("stable_threshold must be below volatile_threshold");

  struct Group {
    PerturbationKind kind;
    std::string anchor;
    std::size_t changed = 0;
    std::vector<std::string> ids;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& l : locals) {
    auto& g = groups[{l.kind.id(), l.anchor}];
    g.kind = l.kind;
    g.anchor = l.anchor;
    if (l.changed) ++g.changed;
    g.ids.push_back(l.question_id);
  }

  std::vector<GlobalRule> rules;
  for (auto& [key, g] : groups) {
    const std::size_t support = g.ids.size();
    if (support < params.min_support) continue;
    const double rate = static_cast<double>(g.changed) / static_cast<double>(support);
    GlobalRule r;
    if (rate <= params.stable_threshold) {
      r.verdict = Verdict::StableUnderPerturbation;
    } else if (rate >= params.volatile_threshold) {
      r.verdict = Verdict::VolatileUnderPerturbation;
    } else {
      continue;
    }
    r.kind = g.kind;
    r.anchor = g.anchor;
    r.support = support;
    r.change_count = g.changed;
    r.change_rate = rate;
    r.exemplar_ids = std::move(g.ids);
    rules.push_back(std::move(r));
  }
  std::sort(rules.begin(), rules.end(), [](const GlobalRule& a, const GlobalRule& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.anchor != b.anchor) return a.anchor < b.anchor;
    return a.kind.id() < b.kind.id();
  });
  return rules;
}

std::string_view expected_direction(const PerturbationKind& kind) {
  switch (kind.category()) {
    case Category::ColorMaximal: return "a robust model should change its answer";
    case Category::ColorMinimal: return "a robust model should keep its answer";
    case Category::SynonymAdjective:
    case Category::SynonymVerb: return "a robust model should keep its answer";
    case Category::HypernymNoun: return "a robust model should mostly keep its answer";
    case Category::HyponymNoun: return "the answer may justifiably change with the narrower concept";
    case Category::SiblingNoun: return "keeping or changing the answer depends on the image";
    case Category::DeletionNoun: return "accuracy should degrade with the importance of the deleted noun";
  }
  return "";
}

std::string rule_line(const GlobalRule& rule) {
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.2f", rule.change_rate);
  return "IF " + rule.kind.label() + " perturbs " + rule.anchor + " THEN answer " +
         (rule.verdict == Verdict::StableUnderPerturbation ? "stays" : "changes") + " (rate " + rate +
         ", support " + std::to_string(rule.support) + ")";
}

std::string report_to_json(const ExplanationReport& report) {
  json doc{{"schema", "cfprobe.explanations/1"}, {"rules", report.rules}, {"locals", report.locals}};
  return doc.dump(2) + "\n";
}

ExplanationReport report_from_json(std::string_view text) {
  try {
    auto doc = json::parse(text);
    ExplanationReport report;
    report.rules = doc.at("rules").get<std::vector<GlobalRule>>();
    report.locals = doc.at("locals").get<std::vector<LocalExplanation>>();
    return report;
  } catch (const std::exception& e) {
    throw ExplainError(std::string("malformed explanation report: ") + e.what());
  }
}

void render_report(std::span<const GlobalRule> rules, std::span<const LocalExplanation> locals,
                   const std::filesystem::path& out_dir) {
  ExplanationReport report{{rules.begin(), rules.end()}, {locals.begin(), locals.end()}};

  std::ostringstream md;
  md << "# Global rules\n\n";
  if (rules.empty()) md << "No rule reached the support and rate thresholds.\n";
  std::vector<std::string> seen_kinds;
  for (const auto& rule : rules) {
    md << "- " << rule_line(rule) << "\n";
  }
  md << "\n## Expected behaviour per perturbation\n\n";
  for (const auto& rule : rules) {
    const auto id = rule.kind.id();
    if (std::find(seen_kinds.begin(), seen_kinds.end(), id) != seen_kinds.end()) continue;
    seen_kinds.push_back(id);
    md << "- " << rule.kind.label() << ": " << expected_direction(rule.kind) << "\n";
  }
  md << "\n" << locals.size() << " local explanations, "
     << std::count_if(locals.begin(), locals.end(), [](const auto& l) { return l.changed; })
     << " with a changed answer.\n";

  try {
    write_file(out_dir / "rules.json", report_to_json(report));
    write_file(out_dir / "rules.md", md.str());
  } catch (const std::exception& e) {
    throw ExplainError("cannot write explanation report to " + out_dir.string() + ": " + e.what());
  }
}

}  // namespace cfprobe
