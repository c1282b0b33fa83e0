#include "cfprobe/wordnet.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <set>
#include <utility>

#include "cfprobe/strings.hpp"

namespace cfprobe {

namespace fs = std::filesystem;

char pos_code(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::Noun: return 'n';
    case PartOfSpeech::Verb: return 'v';
    case PartOfSpeech::Adjective: return 'a';
    case PartOfSpeech::AdjectiveSatellite: return 's';
    case PartOfSpeech::Adverb: return 'r';
  }
  return '?';
}

std::optional<PartOfSpeech> pos_from_code(char code) {
  switch (code) {
    case 'n': return PartOfSpeech::Noun;
    case 'v': return PartOfSpeech::Verb;
    case 'a': return PartOfSpeech::Adjective;
    case 's': return PartOfSpeech::AdjectiveSatellite;
    case 'r': return PartOfSpeech::Adverb;
    default: return std::nullopt;
  }
}

std::string_view pos_name(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::Noun: return "noun";
    case PartOfSpeech::Verb: return "verb";
    case PartOfSpeech::Adjective: return "adjective";
    case PartOfSpeech::AdjectiveSatellite: return "adjective-satellite";
    case PartOfSpeech::Adverb: return "adverb";
  }
  return "?";
}

std::string to_string(const SynsetId& id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08u-%c", id.offset, pos_code(id.pos));
  return buf;
}

std::optional<SynsetId> parse_synset_id(std::string_view text) {
  if (text.size() != 10 || text[8] != '-') return std::nullopt;
  const std::size_t dash = 8;
  std::uint32_t offset = 0;
  auto digits = text.substr(0, dash);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), offset);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  auto pos = pos_from_code(text[dash + 1]);
  if (!pos || *pos == PartOfSpeech::AdjectiveSatellite) return std::nullopt;
  return SynsetId{*pos, offset};
}

std::string display_lemma(std::string_view lemma) {
  std::string out = to_lower(lemma);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

WordNetError::WordNetError(Kind kind, const std::string& message, std::string file,
                           std::size_t line)
    : std::runtime_error(message), kind_(kind), file_(std::move(file)), line_(line) {}

namespace {

struct PosFiles {
  PartOfSpeech pos;
  const char* suffix;
};

constexpr std::array<PosFiles, 4> kPosFiles{{{PartOfSpeech::Noun, "noun"},
                                              {PartOfSpeech::Verb, "verb"},
                                              {PartOfSpeech::Adjective, "adj"},
                                              {PartOfSpeech::Adverb, "adv"}}};

PartOfSpeech file_pos(PartOfSpeech pos) {
  return pos == PartOfSpeech::AdjectiveSatellite ? PartOfSpeech::Adjective : pos;
}

std::string index_form(std::string_view word) {
  std::string out = to_lower(trim(word));
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

// Tokenizer over one database line that reports failures with file/line context.
class FieldReader {
 public:
  FieldReader(std::string_view line, const std::string& file, std::size_t line_no)
      : line_(line), file_(file), line_no_(line_no) {}

  std::string_view next() {
    while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
    if (pos_ >= line_.size()) fail("unexpected end of line");
    std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
    return line_.substr(start, pos_ - start);
  }

  template <typename T>
  T number(int base = 10) {
    auto field = next();
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value, base);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      fail("expected a number, got '" + std::string(field) + "'");
    return value;
  }

  std::string_view rest() const { return pos_ < line_.size() ? line_.substr(pos_) : std::string_view{}; }

  [[noreturn]] void fail(const std::string& what) const {
    throw WordNetError(WordNetError::Kind::MalformedLine,
                       file_ + ":" + std::to_string(line_no_) + ": " + what, file_, line_no_);
  }

 private:
  std::string_view line_;
  std::size_t pos_ = 0;
  const std::string& file_;
  std::size_t line_no_;
};

std::string read_required(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw WordNetError(WordNetError::Kind::MissingFile, "missing WordNet file: " + path.string(),
                       path.string());
  return read_file(path);
}

// Calls fn(line, line_no, byte_offset) for every non-header line.
template <typename Fn>
void for_each_line(const std::string& content, Fn&& fn) {
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (offset < content.size()) {
    auto end = content.find('\n', offset);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + offset, end - offset);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    bool header = line.size() >= 2 && line[0] == ' ' && line[1] == ' ';
    if (!header && !trim(line).empty()) fn(line, line_no, offset);
    offset = end + 1;
  }
}

std::string strip_adj_marker(std::string_view word) {
  // data.adj lemmas may carry a syntactic marker: "(a)", "(p)" or "(ip)".
  if (!word.empty() && word.back() == ')') {
    auto open = word.rfind('(');
    if (open != std::string_view::npos) word = word.substr(0, open);
  }
  return std::string(word);
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

constexpr std::array<Rule, 8> kNounRules{{{"s", ""},
                                          {"ses", "s"},
                                          {"xes", "x"},
                                          {"zes", "z"},
                                          {"ches", "ch"},
                                          {"shes", "sh"},
                                          {"men", "man"},
                                          {"ies", "y"}}};
constexpr std::array<Rule, 8> kVerbRules{{{"s", ""},
                                          {"ies", "y"},
                                          {"es", "e"},
                                          {"es", ""},
                                          {"ed", "e"},
                                          {"ed", ""},
                                          {"ing", "e"},
                                          {"ing", ""}}};
constexpr std::array<Rule, 4> kAdjRules{{{"er", ""}, {"est", ""}, {"er", "e"}, {"est", "e"}}};

std::vector<Rule> rules_for(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::Noun: return {kNounRules.begin(), kNounRules.end()};
    case PartOfSpeech::Verb: return {kVerbRules.begin(), kVerbRules.end()};
    case PartOfSpeech::Adjective: return {kAdjRules.begin(), kAdjRules.end()};
    default: return {};
  }
}

}  // namespace

WordNetGraph WordNetGraph::load(const fs::path& dir) {
  WordNetGraph g;

  for (const auto& pf : kPosFiles) {
    auto data_path = dir / ("data." + std::string(pf.suffix));
    auto index_path = dir / ("index." + std::string(pf.suffix));
    auto exc_path = dir / (std::string(pf.suffix) + ".exc");
    // Check all three first so a missing file is reported before any parse work.
    std::string data = read_required(data_path);
    std::string index = read_required(index_path);
    std::string exc = read_required(exc_path);

    const std::string data_name = data_path.string();
    for_each_line(data, [&](std::string_view line, std::size_t line_no, std::size_t byte_offset) {
      FieldReader r(line, data_name, line_no);
      Synset s;
      auto offset = r.number<std::uint32_t>();
      if (offset != byte_offset)
        r.fail("synset offset " + std::to_string(offset) + " does not match byte position " +
               std::to_string(byte_offset));
      s.id = SynsetId{pf.pos, offset};
      r.next();  // lex_filenum
      auto ss_type = r.next();
      auto type = ss_type.size() == 1 ? pos_from_code(ss_type[0]) : std::nullopt;
      if (!type || file_pos(*type) != pf.pos) r.fail("bad ss_type '" + std::string(ss_type) + "'");
      s.type = *type;
      auto w_cnt = r.number<unsigned>(16);
      if (w_cnt == 0) r.fail("synset without lemmas");
      for (unsigned i = 0; i < w_cnt; ++i) {
        auto word = r.next();
        s.lemmas.push_back(pf.pos == PartOfSpeech::Adjective ? strip_adj_marker(word)
                                                             : std::string(word));
        r.next();  // lex_id
      }
      auto p_cnt = r.number<unsigned>();
      for (unsigned i = 0; i < p_cnt; ++i) {
        Pointer p;
        p.symbol = std::string(r.next());
        auto target_offset = r.number<std::uint32_t>();
        auto target_pos = r.next();
        auto tp = target_pos.size() == 1 ? pos_from_code(target_pos[0]) : std::nullopt;
        if (!tp) r.fail("bad pointer pos '" + std::string(target_pos) + "'");
        p.target = SynsetId{file_pos(*tp), target_offset};
        r.next();  // source/target
        s.pointers.push_back(std::move(p));
      }
      auto rest = r.rest();
      auto bar = rest.find('|');
      if (bar != std::string_view::npos) s.gloss = std::string(trim(rest.substr(bar + 1)));
      g.synsets_.emplace(s.id, std::move(s));
    });

    const std::string index_name = index_path.string();
    for_each_line(index, [&](std::string_view line, std::size_t line_no, std::size_t) {
      FieldReader r(line, index_name, line_no);
      std::string lemma(r.next());
      auto pos_field = r.next();
      auto pos = pos_field.size() == 1 ? pos_from_code(pos_field[0]) : std::nullopt;
      if (!pos || file_pos(*pos) != pf.pos) r.fail("bad pos '" + std::string(pos_field) + "'");
      auto synset_cnt = r.number<unsigned>();
      auto p_cnt = r.number<unsigned>();
      for (unsigned i = 0; i < p_cnt; ++i) r.next();
      r.next();  // sense_cnt
      r.next();  // tagsense_cnt
      std::vector<SynsetId> ids;
      ids.reserve(synset_cnt);
      for (unsigned i = 0; i < synset_cnt; ++i) ids.push_back({pf.pos, r.number<std::uint32_t>()});
      g.index_[{std::move(lemma), pf.pos}] = std::move(ids);
    });

    const std::string exc_name = exc_path.string();
    for_each_line(exc, [&](std::string_view line, std::size_t line_no, std::size_t) {
      auto fields = split_ws(line);
      if (fields.size() < 2) {
        throw WordNetError(WordNetError::Kind::MalformedLine,
                           exc_name + ":" + std::to_string(line_no) + ": expected inflected form and base",
                           exc_name, line_no);
      }
      auto& bases = g.exceptions_[{std::string(fields[0]), pf.pos}];
      for (std::size_t i = 1; i < fields.size(); ++i) bases.emplace_back(fields[i]);
    });
  }

  for (const auto& [key, ids] : g.index_) {
    for (const auto& id : ids) {
      if (!g.contains(id))
        throw WordNetError(WordNetError::Kind::DanglingPointer,
                           "index entry '" + key.word + "' refers to missing synset " + to_string(id));
    }
  }
  for (const auto& [id, s] : g.synsets_) {
    for (const auto& p : s.pointers) {
      if (!g.contains(p.target))
        throw WordNetError(WordNetError::Kind::DanglingPointer,
                           "synset " + to_string(id) + " pointer '" + p.symbol +
                               "' refers to missing synset " + to_string(p.target));
    }
  }
  return g;
}

std::vector<SynsetId> WordNetGraph::lookup(std::string_view word, PartOfSpeech pos) const {
  auto it = index_.find({index_form(word), file_pos(pos)});
  if (it == index_.end()) return {};
  return it->second;
}

bool WordNetGraph::indexed(std::string_view word, PartOfSpeech pos) const {
  return index_.count({std::string(word), file_pos(pos)}) != 0;
}

std::vector<std::string> WordNetGraph::lemmatize(std::string_view word, PartOfSpeech pos) const {
  const PartOfSpeech fp = file_pos(pos);
  const std::string form = index_form(word);
  if (form.empty()) return {};

  std::vector<std::string> result;
  std::set<std::string> seen;
  auto keep_indexed = [&](const std::vector<std::string>& forms) {
    for (const auto& f : forms) {
      if (indexed(f, fp) && seen.insert(f).second) result.push_back(f);
    }
  };

  if (auto exc = exceptions_.find({form, fp}); exc != exceptions_.end()) {
    std::vector<std::string> forms{form};
    forms.insert(forms.end(), exc->second.begin(), exc->second.end());
    keep_indexed(forms);
    return result;
  }

  const auto rules = rules_for(fp);
  auto detach = [&](const std::vector<std::string>& forms) {
    std::vector<std::string> out;
    std::set<std::string> pass;
    for (const auto& f : forms) {
      for (const auto& rule : rules) {
        if (f.size() <= rule.suffix.size() || !f.ends_with(rule.suffix)) continue;
        auto base = f.substr(0, f.size() - rule.suffix.size()) + std::string(rule.replacement);
        if (pass.insert(base).second) out.push_back(std::move(base));
      }
    }
    return out;
  };

  auto forms = detach({form});
  std::vector<std::string> first{form};
  first.insert(first.end(), forms.begin(), forms.end());
  keep_indexed(first);
  // Keep detaching until something is indexed; each pass shortens every form.
  while (result.empty() && !forms.empty()) {
    forms = detach(forms);
    keep_indexed(forms);
  }
  return result;
}

const Synset* WordNetGraph::find(const SynsetId& id) const {
  auto it = synsets_.find(id);
  return it == synsets_.end() ? nullptr : &it->second;
}

const Synset& WordNetGraph::synset(const SynsetId& id) const {
  if (const auto* s = find(id)) return *s;
  throw WordNetError(WordNetError::Kind::UnknownSynset, "unknown synset " + to_string(id));
}

std::vector<SynsetId> WordNetGraph::targets(const SynsetId& id, std::string_view plain,
                                            std::string_view instance) const {
  std::vector<SynsetId> out;
  for (const auto& p : synset(id).pointers) {
    if (p.symbol == plain || p.symbol == instance) out.push_back(p.target);
  }
  return out;
}

std::vector<SynsetId> WordNetGraph::hypernyms(const SynsetId& id) const {
  return targets(id, "@", "@i");
}

std::vector<SynsetId> WordNetGraph::hyponyms(const SynsetId& id) const {
  return targets(id, "~", "~i");
}

std::vector<SynsetId> WordNetGraph::siblings(const SynsetId& id) const {
  std::vector<SynsetId> out;
  std::set<SynsetId> seen{id};
  for (const auto& parent : hypernyms(id)) {
    for (const auto& child : hyponyms(parent)) {
      if (seen.insert(child).second) out.push_back(child);
    }
  }
  return out;
}

std::vector<std::string> WordNetGraph::synonyms(std::string_view word, PartOfSpeech pos) const {
  const PartOfSpeech fp = file_pos(pos);
  if (fp != PartOfSpeech::Verb && fp != PartOfSpeech::Adjective)
    throw WordNetError(WordNetError::Kind::UnsupportedPos,
                       "synonyms are defined for verbs and adjectives, not " +
                           std::string(pos_name(pos)));

  const std::string self = display_lemma(index_form(word));
  std::vector<std::string> out;
  std::set<std::string> seen{self};
  auto take = [&](const Synset& s) {
    for (const auto& lemma : s.lemmas) {
      auto shown = display_lemma(lemma);
      if (seen.insert(shown).second) out.push_back(std::move(shown));
    }
  };

  const auto senses = lookup(word, fp);
  for (const auto& id : senses) take(synset(id));
  if (fp == PartOfSpeech::Adjective) {
    for (const auto& id : senses) {
      for (const auto& p : synset(id).pointers) {
        if (p.symbol == "&") take(synset(p.target));
      }
    }
  }
  return out;
}

std::vector<SynsetId> WordNetGraph::synset_ids(PartOfSpeech pos) const {
  std::vector<SynsetId> out;
  for (const auto& [id, s] : synsets_) {
    if (id.pos == file_pos(pos)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cfprobe
