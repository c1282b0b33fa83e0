#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cfprobe {

using Rgb = std::array<std::uint8_t, 3>;

struct NamedColor {
  std::string name;
  Rgb rgb{};
};

enum class ColorMetric { EuclideanRgb, DeltaE76Lab };

std::string_view metric_name(ColorMetric metric);
std::optional<ColorMetric> parse_metric(std::string_view text);

/// Which palette colors a substitution may draw from, relative to the
/// dataset's question vocabulary.
enum class CandidateScope { Common, Uncommon };

std::string_view scope_name(CandidateScope scope);
std::optional<CandidateScope> parse_scope(std::string_view text);

class ColorError : public std::runtime_error {
 public:
  enum class Kind { MalformedLine, MalformedHex, DuplicateName, UnknownColor, EmptyCandidates };
  ColorError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Parses "#RRGGBB" (case-insensitive). Throws ColorError::MalformedHex.
Rgb parse_hex(std::string_view hex);

class ColorTable {
 public:
  ColorTable() = default;
  /// Throws on duplicate names. Names are stored lowercased.
  explicit ColorTable(std::vector<NamedColor> entries, ColorMetric metric = ColorMetric::EuclideanRgb);

  const std::vector<NamedColor>& entries() const { return entries_; }
  ColorMetric metric() const { return metric_; }
  const NamedColor* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const NamedColor& at(std::string_view name) const;

 private:
  std::vector<NamedColor> entries_;
  ColorMetric metric_ = ColorMetric::EuclideanRgb;
};

/// Lines "name,#RRGGBB"; blank lines and lines starting with '#' are skipped.
ColorTable load_colors(const std::filesystem::path& path,
                       ColorMetric metric = ColorMetric::EuclideanRgb);

/// CIE L*a*b* (D65) of an sRGB triple.
std::array<double, 3> rgb_to_lab(const Rgb& rgb);

double distance(const NamedColor& a, const NamedColor& b, ColorMetric metric);

struct ColorScopes {
  std::vector<std::string> common;    // palette names present in the vocabulary
  std::vector<std::string> uncommon;  // palette names absent from it
};

using Vocabulary = std::set<std::string>;

/// Partitions the palette by vocabulary membership, table order preserved.
ColorScopes build_scopes(const ColorTable& table, const Vocabulary& vocab);

enum class Extremum { Minimal, Maximal };

/// Picks the candidate nearest (Minimal) or farthest (Maximal) from `original`
/// under the table's metric. The original itself and any candidate with
/// identical RGB are never chosen. Ties go to the lexicographically smallest
/// name. Throws UnknownColor or EmptyCandidates.
std::string select_substitute(std::string_view original, std::span<const std::string> candidates,
                              const ColorTable& table, Extremum extremum);

std::string minimal_substitute(std::string_view original, CandidateScope scope,
                               const ColorTable& table, const Vocabulary& vocab);
std::string maximal_substitute(std::string_view original, CandidateScope scope,
                               const ColorTable& table, const Vocabulary& vocab);

}  // namespace cfprobe
