#include "cfprobe/color.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "cfprobe/strings.hpp"

namespace cfprobe {

std::string_view metric_name(ColorMetric metric) {
  return metric == ColorMetric::EuclideanRgb ? "euclidean-rgb" : "delta-e76-lab";
}

std::optional<ColorMetric> parse_metric(std::string_view text) {
  if (text == "euclidean-rgb") return ColorMetric::EuclideanRgb;
  if (text == "delta-e76-lab") return ColorMetric::DeltaE76Lab;
  return std::nullopt;
}

std::string_view scope_name(CandidateScope scope) {
  return scope == CandidateScope::Common ? "common" : "uncommon";
}

std::optional<CandidateScope> parse_scope(std::string_view text) {
  if (text == "common") return CandidateScope::Common;
  if (text == "uncommon") return CandidateScope::Uncommon;
  return std::nullopt;
}

Rgb parse_hex(std::string_view hex) {
  auto bad = [&] { return ColorError(ColorError::Kind::MalformedHex, "malformed hex color '" + std::string(hex) + "'"); };
  if (hex.size() != 7 || hex[0] != '#') throw bad();
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw bad();
  };
  Rgb rgb{};
  for (int i = 0; i < 3; ++i)
    rgb[i] = static_cast<std::uint8_t>(nibble(hex[1 + 2 * i]) * 16 + nibble(hex[2 + 2 * i]));
  return rgb;
}

ColorTable::ColorTable(std::vector<NamedColor> entries, ColorMetric metric)
    : metric_(metric) {
  for (auto& e : entries) {
    e.name = to_lower(trim(e.name));
    if (find(e.name))
      throw ColorError(ColorError::Kind::DuplicateName, "duplicate color name '" + e.name + "'");
    entries_.push_back(std::move(e));
  }
}

const NamedColor* ColorTable::find(std::string_view name) const {
  const std::string key = to_lower(name);
  for (const auto& e : entries_) {
    if (e.name == key) return &e;
  }
  return nullptr;
}

const NamedColor& ColorTable::at(std::string_view name) const {
  if (const auto* c = find(name)) return *c;
  throw ColorError(ColorError::Kind::UnknownColor, "unknown color '" + std::string(name) + "'");
}

ColorTable load_colors(const std::filesystem::path& path, ColorMetric metric) {
  const std::string content = read_file(path);
  std::vector<NamedColor> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    auto line = trim(std::string_view(content).substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw ColorError(ColorError::Kind::MalformedLine,
                       path.string() + ":" + std::to_string(line_no) + ": expected name,#RRGGBB");
    auto name = trim(line.substr(0, comma));
    if (name.empty())
      throw ColorError(ColorError::Kind::MalformedLine,
                       path.string() + ":" + std::to_string(line_no) + ": empty color name");
    entries.push_back({std::string(name), parse_hex(trim(line.substr(comma + 1)))});
  }
  return ColorTable(std::move(entries), metric);
}

std::array<double, 3> rgb_to_lab(const Rgb& rgb) {
  auto linear = [](std::uint8_t v) {
    double c = v / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  };
  const double r = linear(rgb[0]), g = linear(rgb[1]), b = linear(rgb[2]);
  // sRGB -> XYZ, D65 white normalised to Y = 1.
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b) / 1.00000;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  auto f = [](double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
  };
  const double fx = f(x), fy = f(y), fz = f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double distance(const NamedColor& a, const NamedColor& b, ColorMetric metric) {
  if (metric == ColorMetric::EuclideanRgb) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = static_cast<double>(a.rgb[i]) - static_cast<double>(b.rgb[i]);
      sum += d * d;
    }
    return std::sqrt(sum);
  }
  const auto la = rgb_to_lab(a.rgb);
  const auto lb = rgb_to_lab(b.rgb);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += (la[i] - lb[i]) * (la[i] - lb[i]);
  return std::sqrt(sum);
}

ColorScopes build_scopes(const ColorTable& table, const Vocabulary& vocab) {
  ColorScopes scopes;
  for (const auto& e : table.entries()) {
    (vocab.count(e.name) ? scopes.common : scopes.uncommon).push_back(e.name);
  }
  return scopes;
}

std::string select_substitute(std::string_view original, std::span<const std::string> candidates,
                              const ColorTable& table, Extremum extremum) {
  const NamedColor& from = table.at(original);
  const std::string* best = nullptr;
  double best_distance = 0.0;
  for (const auto& name : candidates) {
    const NamedColor& to = table.at(name);
    if (to.name == from.name || to.rgb == from.rgb) continue;
    const double d = distance(from, to, table.metric());
    const bool better = !best || (extremum == Extremum::Minimal ? d < best_distance : d > best_distance) ||
                        (d == best_distance && name < *best);
    if (better) {
      best = &name;
      best_distance = d;
    }
  }
  if (!best)
    throw ColorError(ColorError::Kind::EmptyCandidates,
                     "no substitute candidates for '" + std::string(original) + "'");
  return *best;
}

namespace {
std::string substitute(std::string_view original, CandidateScope scope, const ColorTable& table,
                       const Vocabulary& vocab, Extremum extremum) {
  table.at(original);
  auto scopes = build_scopes(table, vocab);
  const auto& pool = scope == CandidateScope::Common ? scopes.common : scopes.uncommon;
  return select_substitute(original, pool, table, extremum);
}
}  // namespace

std::string minimal_substitute(std::string_view original, CandidateScope scope,
                               const ColorTable& table, const Vocabulary& vocab) {
  return substitute(original, scope, table, vocab, Extremum::Minimal);
}

std::string maximal_substitute(std::string_view original, CandidateScope scope,
                               const ColorTable& table, const Vocabulary& vocab) {
  return substitute(original, scope, table, vocab, Extremum::Maximal);
}

}  // namespace cfprobe
