#include "cfprobe/lingproc.hpp"

#include <array>
#include <cctype>
#include <string_view>

#include "cfprobe/strings.hpp"

namespace cfprobe {

namespace {

bool is_terminal_punct(char c) { return c == '?' || c == '!' || c == '.' || c == ','; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

template <std::size_t N>
bool one_of(std::string_view word, const std::array<std::string_view, N>& words) {
  for (auto w : words) {
    if (w == word) return true;
  }
  return false;
}

// Word classes used by the priority heuristic. These only steer ambiguous
// tokens; whether a word is perturbable at all is decided by the stoplist.
constexpr std::array<std::string_view, 24> kDeterminers{
    "the", "a",   "an",   "this", "that", "these", "those", "some", "any",  "my",  "your", "his",
    "her", "its", "our",  "their", "each", "every", "no",   "another", "many", "much", "several", "both"};
constexpr std::array<std::string_view, 25> kAuxiliaries{
    "is",   "are",  "was",   "were",  "be",  "been", "being", "am",   "do",
    "does", "did",  "can",   "could", "will", "would", "shall", "should", "may",
    "might", "must", "has",  "have",  "had", "'s",   "'re"};
constexpr std::array<std::string_view, 8> kCopulas{"is", "are", "was", "were", "be", "been", "being", "am"};
constexpr std::array<std::string_view, 8> kSubjectPronouns{"i", "you", "he", "she", "it", "we", "they", "one"};

bool has(const Token& t, PartOfSpeech pos) { return t.pos_candidates.count(pos) != 0; }

std::optional<PartOfSpeech> default_priority(const Token& t) {
  for (auto pos : {PartOfSpeech::Noun, PartOfSpeech::Verb, PartOfSpeech::Adjective, PartOfSpeech::Adverb}) {
    if (has(t, pos)) return pos;
  }
  return std::nullopt;
}

// A verb reading forced by the left context alone.
std::optional<PartOfSpeech> context_priority(const TokenizedQuestion& tq, std::size_t i) {
  const Token& t = tq.tokens[i];
  const std::string_view prev = i > 0 ? std::string_view(tq.tokens[i - 1].lower) : std::string_view{};
  if (prev == "to" || one_of(prev, kAuxiliaries) || one_of(prev, kSubjectPronouns)) {
    if (has(t, PartOfSpeech::Verb)) return PartOfSpeech::Verb;
    if (one_of(prev, kCopulas) && has(t, PartOfSpeech::Adjective)) return PartOfSpeech::Adjective;
  }
  if (t.lower.size() > 4 && t.lower.ends_with("ing") && has(t, PartOfSpeech::Verb) &&
      !one_of(prev, kDeterminers))
    return PartOfSpeech::Verb;
  return std::nullopt;
}

}  // namespace

std::string_view TokenizedQuestion::gap_before(std::size_t i) const {
  const std::size_t from = i == 0 ? 0 : tokens[i - 1].end;
  const std::size_t to = i < tokens.size() ? tokens[i].start : source.size();
  return std::string_view(source).substr(from, to - from);
}

std::string TokenizedQuestion::reconstruct() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out += gap_before(i);
    out += tokens[i].surface;
  }
  out += gap_before(tokens.size());
  return out;
}

Stoplist Stoplist::load(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::set<std::string> words;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    auto line = trim(std::string_view(content).substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    words.insert(to_lower(line));
  }
  return Stoplist(std::move(words));
}

TokenizedQuestion tokenize(std::string_view text) {
  if (trim(text).empty()) throw std::invalid_argument("cannot tokenize an empty question");
  TokenizedQuestion tq;
  tq.source = std::string(text);
  auto push = [&](std::size_t start, std::size_t end) {
    Token t;
    t.surface = tq.source.substr(start, end - start);
    t.lower = to_lower(t.surface);
    t.start = start;
    t.end = end;
    tq.tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    std::size_t word_end = i;
    while (word_end > start && is_terminal_punct(text[word_end - 1])) --word_end;
    if (word_end > start) push(start, word_end);
    for (std::size_t p = word_end; p < i; ++p) push(p, p + 1);
  }
  return tq;
}

TokenizedQuestion tag_candidates(TokenizedQuestion tq, const WordNetGraph& g, const Stoplist& stoplist) {
  for (auto& t : tq.tokens) {
    t.pos_candidates.clear();
    t.priority.reset();
    if (stoplist.contains(t.lower)) continue;
    for (auto pos : {PartOfSpeech::Noun, PartOfSpeech::Verb, PartOfSpeech::Adjective, PartOfSpeech::Adverb}) {
      if (!g.lemmatize(t.lower, pos).empty()) t.pos_candidates.insert(pos);
    }
  }

  // Left-to-right. A run is a maximal stretch of content tokens that no
  // context rule claims as a verb; inside a run that follows a determiner or
  // spans more than one token, the last token is read as the head noun and
  // the ones before it as modifiers.
  const std::size_t n = tq.tokens.size();
  std::size_t i = 0;
  while (i < n) {
    Token& t = tq.tokens[i];
    if (t.pos_candidates.empty()) {
      ++i;
      continue;
    }
    if (auto forced = context_priority(tq, i)) {
      t.priority = forced;
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < n && !tq.tokens[end].pos_candidates.empty() && !context_priority(tq, end)) ++end;
    const bool after_det = i > 0 && one_of(std::string_view(tq.tokens[i - 1].lower), kDeterminers);
    if (end - i == 1 && !after_det) {
      t.priority = default_priority(t);
      ++i;
      continue;
    }
    // "Is the sky blue?": in a copular question a run that closes the
    // sentence ends in a predicate adjective and the noun before it is the head.
    const bool closes =
        end == n || (tq.tokens[end].lower.size() == 1 && is_terminal_punct(tq.tokens[end].lower[0]));
    const bool predicate = after_det && closes && end - i >= 2 &&
                           one_of(std::string_view(tq.tokens[0].lower), kCopulas) &&
                           has(tq.tokens[end - 1], PartOfSpeech::Adjective) &&
                           has(tq.tokens[end - 2], PartOfSpeech::Noun);
    if (predicate) {
      tq.tokens[end - 1].priority = PartOfSpeech::Adjective;
      --end;
    }
    for (std::size_t j = i; j < end; ++j) {
      Token& u = tq.tokens[j];
      const bool head = j + 1 == end;
      const auto first = head ? PartOfSpeech::Noun : PartOfSpeech::Adjective;
      const auto second = head ? PartOfSpeech::Adjective : PartOfSpeech::Noun;
      if (has(u, first))
        u.priority = first;
      else if (has(u, second))
        u.priority = second;
      else
        u.priority = default_priority(u);
    }
    i = predicate ? end + 1 : end;
  }
  return tq;
}

std::vector<std::size_t> eligible_targets(const TokenizedQuestion& tq, const PerturbationKind& kind,
                                          const ColorTable& table) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tq.tokens.size(); ++i) {
    const Token& t = tq.tokens[i];
    const bool color = table.contains(t.lower);
    if (kind.is_color()) {
      if (color) out.push_back(i);
      continue;
    }
    if (color || t.pos_candidates.empty()) continue;
    if (t.priority == kind.target_pos()) out.push_back(i);
  }
  return out;
}

}  // namespace cfprobe
