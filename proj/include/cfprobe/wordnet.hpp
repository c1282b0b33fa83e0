#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cfprobe {

enum class PartOfSpeech { Noun, Verb, Adjective, AdjectiveSatellite, Adverb };

/// Single-letter WordNet code: n, v, a, s, r.
char pos_code(PartOfSpeech pos);
std::optional<PartOfSpeech> pos_from_code(char code);
std::string_view pos_name(PartOfSpeech pos);

/// Identifies a synset by the data file it lives in and its byte offset there.
/// Satellite adjectives share data.adj with head adjectives, so ids always
/// carry the file POS (never AdjectiveSatellite).
struct SynsetId {
  PartOfSpeech pos = PartOfSpeech::Noun;
  std::uint32_t offset = 0;

  auto operator<=>(const SynsetId&) const = default;
};

/// "02084071-n"
std::string to_string(const SynsetId& id);
std::optional<SynsetId> parse_synset_id(std::string_view text);

struct SynsetIdHash {
  std::size_t operator()(const SynsetId& id) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(id.pos) << 32) | id.offset);
  }
};

struct Pointer {
  std::string symbol;
  SynsetId target;
};

struct Synset {
  SynsetId id;
  PartOfSpeech type = PartOfSpeech::Noun;  // AdjectiveSatellite for 's' records
  std::vector<std::string> lemmas;         // as in the data file, underscores kept
  std::vector<Pointer> pointers;
  std::string gloss;
};

class WordNetError : public std::runtime_error {
 public:
  enum class Kind { MissingFile, MalformedLine, DanglingPointer, UnknownSynset, UnsupportedPos };

  WordNetError(Kind kind, const std::string& message, std::string file = {}, std::size_t line = 0);

  Kind kind() const noexcept { return kind_; }
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::string file_;
  std::size_t line_;
};

/// Parsed WordNet 3.x database. Immutable once loaded.
class WordNetGraph {
 public:
  /// Reads index.*, data.* and *.exc for noun, verb, adj and adv from `dir`.
  /// Throws WordNetError on a missing file, a malformed line (with file and
  /// 1-based line number) or a pointer whose target does not exist.
  static WordNetGraph load(const std::filesystem::path& dir);

  /// Sense-ordered synsets for `word`. Case-folded, spaces read as underscores.
  /// AdjectiveSatellite is looked up in the adjective index.
  std::vector<SynsetId> lookup(std::string_view word, PartOfSpeech pos) const;

  /// Morphy: exception list first, then suffix detachment. Only forms that
  /// are indexed for `pos` are returned; the word itself comes first when it
  /// is already a base form.
  std::vector<std::string> lemmatize(std::string_view word, PartOfSpeech pos) const;

  const Synset& synset(const SynsetId& id) const;
  const Synset* find(const SynsetId& id) const;
  bool contains(const SynsetId& id) const { return find(id) != nullptr; }

  /// Targets of "@" and "@i", file order.
  std::vector<SynsetId> hypernyms(const SynsetId& id) const;
  /// Targets of "~" and "~i", file order.
  std::vector<SynsetId> hyponyms(const SynsetId& id) const;
  /// Children of every immediate parent, minus `id`, first-seen order.
  std::vector<SynsetId> siblings(const SynsetId& id) const;

  /// Lemmas sharing a synset with `word`, sense order, `word` excluded,
  /// underscores rendered as spaces. For adjectives the lemmas of the
  /// similar-to satellite cluster follow the direct co-members. Throws
  /// UnsupportedPos unless pos is Verb or Adjective.
  std::vector<std::string> synonyms(std::string_view word, PartOfSpeech pos) const;

  /// All synset ids of a given file POS in offset order.
  std::vector<SynsetId> synset_ids(PartOfSpeech pos) const;

  std::size_t synset_count() const { return synsets_.size(); }

 private:
  struct IndexKey {
    std::string word;
    PartOfSpeech pos;
    auto operator<=>(const IndexKey&) const = default;
  };

  std::vector<SynsetId> targets(const SynsetId& id, std::string_view plain,
                                std::string_view instance) const;
  bool indexed(std::string_view word, PartOfSpeech pos) const;

  std::map<IndexKey, std::vector<SynsetId>> index_;
  std::unordered_map<SynsetId, Synset, SynsetIdHash> synsets_;
  std::map<IndexKey, std::vector<std::string>> exceptions_;
};

/// Lowercase, underscores to spaces. Used wherever a lemma surfaces as text.
std::string display_lemma(std::string_view lemma);

}  // namespace cfprobe
