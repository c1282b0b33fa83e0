#pragma once

// JSON forms of the records that cross process boundaries: counterfactual
// files, answer records, accuracy and explanation reports.

#include <json.hpp>

#include "cfprobe/evaluator.hpp"
#include "cfprobe/explainer.hpp"
#include "cfprobe/perturber.hpp"

namespace cfprobe {

void to_json(nlohmann::json& j, const PerturbationKind& kind);
void from_json(const nlohmann::json& j, PerturbationKind& kind);

void to_json(nlohmann::json& j, const SubstitutionRecord& r);
void from_json(const nlohmann::json& j, SubstitutionRecord& r);

void to_json(nlohmann::json& j, const CounterfactualQuestion& q);
void from_json(const nlohmann::json& j, CounterfactualQuestion& q);

void to_json(nlohmann::json& j, const AnswerRecord& r);
void from_json(const nlohmann::json& j, AnswerRecord& r);

void to_json(nlohmann::json& j, const PairedOutcome& o);
void to_json(nlohmann::json& j, const AccuracyReport& r);
void from_json(const nlohmann::json& j, AccuracyReport& r);

void to_json(nlohmann::json& j, const LocalExplanation& l);
void from_json(const nlohmann::json& j, LocalExplanation& l);

void to_json(nlohmann::json& j, const GlobalRule& r);
void from_json(const nlohmann::json& j, GlobalRule& r);

/// One compact JSON document per line, each line terminated by '\n'.
template <typename T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += nlohmann::json(item).dump();
    out.push_back('\n');
  }
  return out;
}

/// Inverse of to_jsonl; blank lines are skipped. Throws std::runtime_error
/// naming the 1-based line on parse or schema failure.
template <typename T>
std::vector<T> from_jsonl(std::string_view text) {
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<T>());
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cfprobe
