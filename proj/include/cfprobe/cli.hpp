#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfprobe/color.hpp"
#include "cfprobe/dataset.hpp"
#include "cfprobe/evaluator.hpp"
#include "cfprobe/explainer.hpp"
#include "cfprobe/kinds.hpp"
#include "cfprobe/model.hpp"

namespace cfprobe {

enum class ExitCode : int { Ok = 0, Usage = 1, Config = 2, Io = 3, Endpoint = 4 };

/// Failure of a pipeline command, tagged with the process exit code it maps to.
class CommandError : public std::runtime_error {
 public:
  CommandError(ExitCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

struct EndpointConfig {
  enum class Mode { Http, Mock };
  Mode mode = Mode::Mock;
  std::string url;                 // Http
  std::filesystem::path table;     // Mock
  HttpModelOptions http;
};

struct ExperimentConfig {
  DatasetFormat dataset_format = DatasetFormat::Toy;
  /// toy: [file]; vg: [question_answers.json]; vqa2: [questions, annotations]
  std::vector<std::filesystem::path> dataset_paths;
  std::filesystem::path wordnet_dir;
  std::filesystem::path colors_path;
  std::filesystem::path stoplist_path;
  ColorMetric metric = ColorMetric::EuclideanRgb;
  std::vector<PerturbationKind> kinds;
  std::uint64_t seed = 0;
  std::optional<EndpointConfig> endpoint;
  std::size_t parallelism = 4;
  /// Empty means: vqa-soft for VQA-v2 data, exact-any otherwise.
  std::optional<CorrectnessRule> rule;
  MiningParams mining;
  /// Adds a second rule-mining pass keyed by the noun's immediate hypernym.
  bool hypernym_anchors = false;
  std::filesystem::path output_dir = "out";
};

std::string_view dataset_format_name(DatasetFormat format);
std::optional<DatasetFormat> parse_dataset_format(std::string_view text);

/// Reads a JSON config; relative paths resolve against the file's directory.
/// Throws CommandError(Config).
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws CommandError(Config) naming the offending field.
void validate_config(const ExperimentConfig& config, bool need_endpoint);

CorrectnessRule effective_rule(const ExperimentConfig& config);

/// Output file locations below config.output_dir.
std::filesystem::path perturb_file(const ExperimentConfig& config, const PerturbationKind& kind);
std::filesystem::path skips_file(const ExperimentConfig& config);
std::filesystem::path original_records_file(const ExperimentConfig& config);
std::filesystem::path records_file(const ExperimentConfig& config, const PerturbationKind& kind);
std::filesystem::path report_dir(const ExperimentConfig& config);

Dataset load_dataset(const ExperimentConfig& config);
std::unique_ptr<ModelEndpoint> make_endpoint(const EndpointConfig& config);

/// Writes one counterfactual file per kind plus skips.json.
void cmd_perturb(const ExperimentConfig& config, std::ostream& log);

/// Answers original and counterfactual questions and writes record files.
/// Generates missing perturbation files first. `endpoint` overrides the
/// configured one when given.
void cmd_run(const ExperimentConfig& config, std::ostream& log, const ModelEndpoint* endpoint = nullptr);

struct ReportOutput {
  std::vector<AccuracyReport> accuracy;
  std::vector<std::pair<PerturbationKind, std::string>> omitted;  // kind, reason
  std::vector<GlobalRule> rules;
  std::vector<LocalExplanation> locals;
};

/// Per-kind accuracy table and mined rules, written under report/.
ReportOutput cmd_report(const ExperimentConfig& config, std::ostream& log);

/// Full command-line entry point. Returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cfprobe
