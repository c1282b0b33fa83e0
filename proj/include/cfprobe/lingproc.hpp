#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfprobe/color.hpp"
#include "cfprobe/kinds.hpp"
#include "cfprobe/wordnet.hpp"

namespace cfprobe {

struct Token {
  std::string surface;
  std::string lower;
  std::size_t start = 0;  // byte offsets into the source text, [start, end)
  std::size_t end = 0;
  std::set<PartOfSpeech> pos_candidates;
  /// Resolved part of speech for ambiguous tokens; empty when untagged or
  /// when the token has no candidates.
  std::optional<PartOfSpeech> priority;
};

struct TokenizedQuestion {
  std::string source;
  std::vector<Token> tokens;

  /// Source bytes between token i-1 and token i (i == tokens.size() gives the tail).
  std::string_view gap_before(std::size_t i) const;
  /// Rebuilds the text from tokens and the recorded gaps.
  std::string reconstruct() const;
};

/// Word-per-line list of function words that never receive POS candidates.
/// '#' starts a comment line.
class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(std::set<std::string> words) : words_(std::move(words)) {}
  static Stoplist load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

/// Whitespace split with trailing ?!., peeled off into their own tokens.
/// Throws std::invalid_argument for empty or all-whitespace text.
TokenizedQuestion tokenize(std::string_view text);

/// Fills pos_candidates from WordNet (a POS is a candidate when the token
/// lemmatizes under it) and resolves each token's priority POS.
TokenizedQuestion tag_candidates(TokenizedQuestion tq, const WordNetGraph& g, const Stoplist& stoplist);

/// Token indices a perturbation of `kind` may target, strictly increasing.
std::vector<std::size_t> eligible_targets(const TokenizedQuestion& tq, const PerturbationKind& kind,
                                          const ColorTable& table);

}  // namespace cfprobe
