#include "cfprobe/perturber.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "cfprobe/strings.hpp"

namespace cfprobe {

std::string_view skip_reason_name(SkipReason reason) {
  return reason == SkipReason::NoTarget ? "no-target" : "no-replacement";
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view question_id) {
  // FNV-1a over the id, folded with the run seed through a splitmix64 finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : question_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string capitalize(std::string text) {
  if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

bool has_lemma(const Synset& s, std::string_view shown) {
  return std::any_of(s.lemmas.begin(), s.lemmas.end(),
                     [&](const std::string& l) { return display_lemma(l) == shown; });
}

std::vector<Replacement> color_candidates(std::string_view word, const PerturbationKind& kind,
                                          const KnowledgeBases& kbs) {
  const NamedColor* from = kbs.colors.find(word);
  if (!from) return {};
  const auto scopes = build_scopes(kbs.colors, kbs.vocabulary);
  const auto& pool = *kind.scope() == CandidateScope::Common ? scopes.common : scopes.uncommon;
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& name : pool) {
    const NamedColor& to = kbs.colors.at(name);
    if (to.name == from->name || to.rgb == from->rgb) continue;
    ranked.emplace_back(distance(*from, to, kbs.colors.metric()), name);
  }
  const bool maximal = kind.category() == Category::ColorMaximal;
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return maximal ? a.first > b.first : a.first < b.first;
    return a.second < b.second;
  });
  std::vector<Replacement> out;
  for (auto& [d, name] : ranked) out.push_back({name, {from->name, name}});
  return out;
}

std::vector<Replacement> synonym_candidates(const std::string& base, std::string_view lower,
                                            PartOfSpeech pos, const WordNetGraph& g) {
  const auto senses = g.lookup(base, pos);
  std::vector<Replacement> out;
  for (auto& y : g.synonyms(base, pos)) {
    if (y == lower) continue;
    std::vector<TraceStep> trace;
    for (const auto& id : senses) {
      if (has_lemma(g.synset(id), y)) {
        trace = {id};
        break;
      }
    }
    for (auto it = senses.begin(); trace.empty() && it != senses.end(); ++it) {
      for (const auto& p : g.synset(*it).pointers) {
        if (p.symbol == "&" && has_lemma(g.synset(p.target), y)) {
          trace = {*it, p.target};
          break;
        }
      }
    }
    out.push_back({std::move(y), std::move(trace)});
  }
  return out;
}

std::vector<Replacement> noun_candidates(const std::string& base, std::string_view lower,
                                         Category category, const WordNetGraph& g) {
  const auto senses = g.lookup(base, PartOfSpeech::Noun);
  if (senses.empty()) return {};
  const SynsetId& sense = senses.front();

  std::vector<Replacement> out;
  std::set<std::string> seen{base, std::string(lower)};
  auto take = [&](const SynsetId& target, std::vector<TraceStep> trace) {
    for (const auto& lemma : g.synset(target).lemmas) {
      auto y = display_lemma(lemma);
      if (seen.insert(y).second) out.push_back({std::move(y), trace});
    }
  };

  if (category == Category::HypernymNoun) {
    for (const auto& h : g.hypernyms(sense)) take(h, {sense, h});
  } else if (category == Category::HyponymNoun) {
    for (const auto& h : g.hyponyms(sense)) take(h, {sense, h});
  } else {
    const auto parents = g.hypernyms(sense);
    for (const auto& sib : g.siblings(sense)) {
      for (const auto& parent : parents) {
        const auto children = g.hyponyms(parent);
        if (std::find(children.begin(), children.end(), sib) != children.end()) {
          take(sib, {sense, parent, sib});
          break;
        }
      }
    }
  }
  return out;
}

std::string splice_replacement(const TokenizedQuestion& tq, std::size_t i, std::string replacement) {
  const Token& t = tq.tokens[i];
  if (i == 0) replacement = capitalize(std::move(replacement));
  return tq.source.substr(0, t.start) + replacement + tq.source.substr(t.end);
}

std::string splice_deletion(const TokenizedQuestion& tq, std::size_t i) {
  const Token& t = tq.tokens[i];
  std::string prefix = tq.source.substr(0, t.start);
  std::string suffix = tq.source.substr(t.end);
  if (i == 0) {
    auto first = std::find_if_not(suffix.begin(), suffix.end(), is_ws);
    suffix.erase(suffix.begin(), first);
    const bool was_capital = !t.surface.empty() && std::isupper(static_cast<unsigned char>(t.surface[0]));
    return was_capital ? capitalize(std::move(suffix)) : suffix;
  }
  const bool prefix_ws = !prefix.empty() && is_ws(prefix.back());
  if (prefix_ws && (suffix.empty() || std::all_of(suffix.begin(), suffix.end(), is_ws))) {
    while (!prefix.empty() && is_ws(prefix.back())) prefix.pop_back();
    return prefix + suffix;
  }
  if (prefix_ws) {
    auto first = std::find_if_not(suffix.begin(), suffix.end(), is_ws);
    suffix.erase(suffix.begin(), first);
  }
  return prefix + suffix;
}

PerturbOutcome skipped(SkipReason reason) { return PerturbOutcome{std::nullopt, reason}; }

}  // namespace

std::vector<Replacement> replacement_candidates(std::string_view word, const PerturbationKind& kind,
                                                const KnowledgeBases& kbs) {
  const std::string lower = to_lower(word);
  if (kind.is_color()) return color_candidates(lower, kind, kbs);
  if (kind.category() == Category::DeletionNoun) return {};

  const PartOfSpeech pos = *kind.target_pos();
  const auto forms = kbs.wordnet.lemmatize(lower, pos);
  if (forms.empty()) return {};
  const std::string& base = forms.front();
  if (kind.is_noun()) return noun_candidates(base, lower, kind.category(), kbs.wordnet);
  return synonym_candidates(base, lower, pos, kbs.wordnet);
}

PerturbOutcome perturb_at(const TokenizedQuestion& tq, std::size_t token_index,
                          const PerturbationKind& kind, const KnowledgeBases& kbs,
                          std::string_view question_id, std::uint64_t seed) {
  if (token_index >= tq.tokens.size()) return skipped(SkipReason::NoTarget);
  const Token& target = tq.tokens[token_index];

  SubstitutionRecord record;
  record.question_id = std::string(question_id);
  record.kind = kind;
  record.token_index = token_index;
  record.original = target.surface;

  std::string text;
  if (kind.category() == Category::DeletionNoun) {
    if (auto forms = kbs.wordnet.lemmatize(target.lower, PartOfSpeech::Noun); !forms.empty()) {
      if (auto senses = kbs.wordnet.lookup(forms.front(), PartOfSpeech::Noun); !senses.empty())
        record.relation_trace = {senses.front()};
    }
    text = splice_deletion(tq, token_index);
  } else {
    auto candidates = replacement_candidates(target.lower, kind, kbs);
    if (candidates.empty()) return skipped(SkipReason::NoReplacement);
    Replacement chosen = std::move(candidates.front());
    if (kind.is_color()) {
      // The ranked list and the direct argmin/argmax must agree.
      chosen.text = kind.category() == Category::ColorMinimal
                        ? minimal_substitute(target.lower, *kind.scope(), kbs.colors, kbs.vocabulary)
                        : maximal_substitute(target.lower, *kind.scope(), kbs.colors, kbs.vocabulary);
      chosen.trace = {kbs.colors.at(target.lower).name, chosen.text};
    }
    record.replacement = chosen.text;
    record.relation_trace = std::move(chosen.trace);
    text = splice_replacement(tq, token_index, std::move(chosen.text));
  }

  CounterfactualQuestion cf;
  cf.question_id = record.question_id;
  cf.kind = kind;
  cf.text = std::move(text);
  cf.record = std::move(record);
  cf.seed = seed;
  return PerturbOutcome{std::move(cf), std::nullopt};
}

PerturbOutcome perturb_question(const TokenizedQuestion& tq, const PerturbationKind& kind,
                                const KnowledgeBases& kbs, std::uint64_t seed,
                                std::string_view question_id) {
  const auto targets = eligible_targets(tq, kind, kbs.colors);
  if (targets.empty()) return skipped(SkipReason::NoTarget);

  std::vector<std::size_t> viable;
  for (auto i : targets) {
    if (kind.category() == Category::DeletionNoun ||
        !replacement_candidates(tq.tokens[i].lower, kind, kbs).empty())
      viable.push_back(i);
  }
  if (viable.empty()) return skipped(SkipReason::NoReplacement);

  // mt19937_64's output sequence is fixed by the standard, unlike the
  // distribution adaptors, so the choice is portable across toolchains.
  std::mt19937_64 rng(seed);
  const std::size_t pick = viable[rng() % viable.size()];
  return perturb_at(tq, pick, kind, kbs, question_id, seed);
}

PerturbSetResult perturb_set(const Dataset& dataset, const PerturbationKind& kind,
                             const KnowledgeBases& kbs, std::uint64_t seed) {
  PerturbSetResult result;
  for (const auto& q : dataset.questions()) {
    const auto tq = tag_candidates(tokenize(q.text), kbs.wordnet, kbs.stoplist);
    auto outcome = perturb_question(tq, kind, kbs, derive_seed(seed, q.id), q.id);
    if (outcome.question) {
      result.questions.push_back(std::move(*outcome.question));
    } else if (outcome.skip == SkipReason::NoTarget) {
      ++result.skips.no_target;
    } else {
      ++result.skips.no_replacement;
    }
  }
  return result;
}

}  // namespace cfprobe
