#include "cfprobe/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfprobe/lingproc.hpp"
#include "cfprobe/perturber.hpp"
#include "cfprobe/serialize.hpp"
#include "cfprobe/strings.hpp"
#include "cfprobe/wordnet.hpp"

namespace cfprobe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view dataset_format_name(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::Vqa2: return "vqa2";
    case DatasetFormat::VisualGenome: return "vg";
    case DatasetFormat::Toy: return "toy";
  }
  return "?";
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view text) {
  if (text == "vqa2") return DatasetFormat::Vqa2;
  if (text == "vg") return DatasetFormat::VisualGenome;
  if (text == "toy") return DatasetFormat::Toy;
  return std::nullopt;
}

namespace {

[[noreturn]] void config_error(const std::string& message) { throw CommandError(ExitCode::Config, message); }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string kind_file_stem(const PerturbationKind& kind) {
  std::string stem = kind.id();
  for (auto& c : stem) {
    if (c == ':') c = '.';
  }
  return stem;
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const std::exception& e) {
    config_error("cannot read config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) config_error("config " + path.string() + " must be a JSON object");
  const fs::path base = path.parent_path();
  ExperimentConfig c;
  try {
    if (doc.contains("dataset")) {
      const auto& d = doc.at("dataset");
      auto format = parse_dataset_format(d.value("format", "toy"));
      if (!format) config_error("dataset.format must be one of vqa2, vg, toy");
      c.dataset_format = *format;
      for (const auto& p : d.value("paths", std::vector<std::string>{})) c.dataset_paths.push_back(resolve(base, p));
    }
    if (doc.contains("wordnet_dir")) c.wordnet_dir = resolve(base, doc.at("wordnet_dir").get<std::string>());
    if (doc.contains("colors_path")) c.colors_path = resolve(base, doc.at("colors_path").get<std::string>());
    if (doc.contains("stoplist_path")) c.stoplist_path = resolve(base, doc.at("stoplist_path").get<std::string>());
    if (doc.contains("metric")) {
      auto m = parse_metric(doc.at("metric").get<std::string>());
      if (!m) config_error("metric must be euclidean-rgb or delta-e76-lab");
      c.metric = *m;
    }
    for (const auto& k : doc.value("kinds", std::vector<std::string>{})) {
      try {
        c.kinds.push_back(parse_kind(k));
      } catch (const std::invalid_argument& e) {
        config_error(std::string("kinds: ") + e.what());
      }
    }
    c.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("endpoint")) {
      const auto& e = doc.at("endpoint");
      EndpointConfig ep;
      const auto mode = e.value("mode", "mock");
      if (mode == "http") {
        ep.mode = EndpointConfig::Mode::Http;
        ep.url = e.value("url", "");
      } else if (mode == "mock") {
        ep.mode = EndpointConfig::Mode::Mock;
        if (e.contains("table")) ep.table = resolve(base, e.at("table").get<std::string>());
      } else {
        config_error("endpoint.mode must be http or mock");
      }
      ep.http.timeout = std::chrono::milliseconds(e.value("timeout_ms", 30000));
      ep.http.max_retries = e.value("max_retries", 2);
      ep.http.backoff = std::chrono::milliseconds(e.value("backoff_ms", 200));
      c.endpoint = ep;
    }
    c.parallelism = doc.value("parallelism", std::size_t{4});
    if (doc.contains("correctness_rule")) {
      const auto r = doc.at("correctness_rule").get<std::string>();
      if (r != "auto") {
        c.rule = parse_rule(r);
        if (!c.rule) config_error("correctness_rule must be auto, exact-any or vqa-soft");
      }
    }
    if (doc.contains("mining")) {
      const auto& m = doc.at("mining");
      c.mining.min_support = m.value("min_support", c.mining.min_support);
      c.mining.stable_threshold = m.value("stable_threshold", c.mining.stable_threshold);
      c.mining.volatile_threshold = m.value("volatile_threshold", c.mining.volatile_threshold);
      c.hypernym_anchors = m.value("hypernym_anchors", false);
    }
    if (doc.contains("output_dir")) c.output_dir = resolve(base, doc.at("output_dir").get<std::string>());
  } catch (const json::exception& e) {
    config_error("config " + path.string() + ": " + e.what());
  }
  return c;
}

void validate_config(const ExperimentConfig& c, bool need_endpoint) {
  auto require_dir = [](const fs::path& p, const char* field) {
    if (p.empty()) config_error(std::string(field) + " is not set");
    if (!fs::is_directory(p)) config_error(std::string(field) + ": no such directory " + p.string());
  };
  auto require_file = [](const fs::path& p, const char* field) {
    if (p.empty()) config_error(std::string(field) + " is not set");
    if (!fs::is_regular_file(p)) config_error(std::string(field) + ": no such file " + p.string());
  };
  const std::size_t expected = c.dataset_format == DatasetFormat::Vqa2 ? 2 : 1;
  if (c.dataset_paths.size() != expected)
    config_error("dataset.paths: format " + std::string(dataset_format_name(c.dataset_format)) + " needs " +
                 std::to_string(expected) + " file(s), got " + std::to_string(c.dataset_paths.size()));
  for (const auto& p : c.dataset_paths) require_file(p, "dataset.paths");
  require_dir(c.wordnet_dir, "wordnet_dir");
  require_file(c.colors_path, "colors_path");
  require_file(c.stoplist_path, "stoplist_path");
  if (c.kinds.empty()) config_error("kinds: at least one perturbation kind is required");
  if (c.parallelism == 0) config_error("parallelism must be at least 1");
  if (c.mining.min_support < 1 || c.mining.stable_threshold < 0 || c.mining.volatile_threshold > 1 ||
      c.mining.stable_threshold >= c.mining.volatile_threshold)
    config_error("mining: need min_support >= 1 and 0 <= stable_threshold < volatile_threshold <= 1");
  if (need_endpoint) {
    if (!c.endpoint) config_error("endpoint: set --endpoint-url, --mock-table or CFPROBE_ENDPOINT_URL");
    if (c.endpoint->mode == EndpointConfig::Mode::Http && c.endpoint->url.empty())
      config_error("endpoint.url is empty");
    if (c.endpoint->mode == EndpointConfig::Mode::Mock) require_file(c.endpoint->table, "endpoint.table");
  }
}

CorrectnessRule effective_rule(const ExperimentConfig& c) {
  if (c.rule) return *c.rule;
  return c.dataset_format == DatasetFormat::Vqa2 ? CorrectnessRule::VqaSoft : CorrectnessRule::ExactAny;
}

fs::path perturb_file(const ExperimentConfig& c, const PerturbationKind& kind) {
  return c.output_dir / "perturb" / (kind_file_stem(kind) + ".jsonl");
}
fs::path skips_file(const ExperimentConfig& c) { return c.output_dir / "perturb" / "skips.json"; }
fs::path original_records_file(const ExperimentConfig& c) { return c.output_dir / "records" / "original.jsonl"; }
fs::path records_file(const ExperimentConfig& c, const PerturbationKind& kind) {
  return c.output_dir / "records" / (kind_file_stem(kind) + ".jsonl");
}
fs::path report_dir(const ExperimentConfig& c) { return c.output_dir / "report"; }

Dataset load_dataset(const ExperimentConfig& c) {
  try {
    switch (c.dataset_format) {
      case DatasetFormat::Vqa2: return load_vqa2(c.dataset_paths.at(0), c.dataset_paths.at(1));
      case DatasetFormat::VisualGenome: return load_vg(c.dataset_paths.at(0));
      case DatasetFormat::Toy: return load_toy(c.dataset_paths.at(0));
    }
  } catch (const DatasetError& e) {
    throw CommandError(e.kind() == DatasetError::Kind::Io ? ExitCode::Io : ExitCode::Config, e.what());
  }
  throw CommandError(ExitCode::Config, "unknown dataset format");
}

std::unique_ptr<ModelEndpoint> make_endpoint(const EndpointConfig& config) {
  if (config.mode == EndpointConfig::Mode::Http) {
    try {
      return std::make_unique<HttpModel>(config.url, config.http);
    } catch (const std::invalid_argument& e) {
      throw CommandError(ExitCode::Config, e.what());
    }
  }
  try {
    return std::make_unique<MockModel>(MockModel::load(config.table));
  } catch (const std::exception& e) {
    throw CommandError(ExitCode::Config, std::string("mock table: ") + e.what());
  }
}

namespace {

void write_or_fail(const fs::path& path, std::string_view content) {
  try {
    write_file(path, content);
  } catch (const std::exception& e) {
    throw CommandError(ExitCode::Io, e.what());
  }
}

std::string read_or_fail(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw CommandError(ExitCode::Io, "missing " + what + ": " + path.string());
  try {
    return read_file(path);
  } catch (const std::exception& e) {
    throw CommandError(ExitCode::Io, e.what());
  }
}

template <typename T>
std::vector<T> read_jsonl_or_fail(const fs::path& path, const std::string& what) {
  const auto text = read_or_fail(path, what);
  try {
    return from_jsonl<T>(text);
  } catch (const std::exception& e) {
    throw CommandError(ExitCode::Io, path.string() + ": " + e.what());
  }
}

WordNetGraph load_wordnet(const ExperimentConfig& c) {
  try {
    return WordNetGraph::load(c.wordnet_dir);
  } catch (const WordNetError& e) {
    throw CommandError(e.kind() == WordNetError::Kind::MissingFile ? ExitCode::Config : ExitCode::Io, e.what());
  }
}

template <typename Fn>
auto config_guard(Fn&& fn) {
  try {
    return fn();
  } catch (const ColorError& e) {
    throw CommandError(ExitCode::Config, e.what());
  } catch (const CommandError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw CommandError(ExitCode::Io, e.what());
  }
}

}  // namespace

void cmd_perturb(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, false);
  const Dataset dataset = load_dataset(config);
  const WordNetGraph graph = load_wordnet(config);
  const ColorTable colors = config_guard([&] { return load_colors(config.colors_path, config.metric); });
  const Stoplist stoplist = config_guard([&] { return Stoplist::load(config.stoplist_path); });

  Vocabulary vocab;
  for (const auto& [word, count] : vocabulary(dataset)) vocab.insert(word);
  const KnowledgeBases kbs{graph, colors, stoplist, std::move(vocab)};

  json skips = json::object();
  for (const auto& kind : config.kinds) {
    const auto result = perturb_set(dataset, kind, kbs, config.seed);
    write_or_fail(perturb_file(config, kind), to_jsonl(result.questions));
    skips[kind.id()] = {{"generated", result.questions.size()},
                        {"no_target", result.skips.no_target},
                        {"no_replacement", result.skips.no_replacement}};
    log << kind.id() << ": " << result.questions.size() << " counterfactuals, " << result.skips.no_target
        << " without target, " << result.skips.no_replacement << " without replacement\n";
  }
  write_or_fail(skips_file(config), skips.dump(2) + "\n");
}

void cmd_run(const ExperimentConfig& config, std::ostream& log, const ModelEndpoint* endpoint) {
  validate_config(config, endpoint == nullptr);
  std::unique_ptr<ModelEndpoint> owned;
  if (!endpoint) {
    owned = make_endpoint(*config.endpoint);
    endpoint = owned.get();
  }
  try {
    endpoint->check_health();
  } catch (const ModelError& e) {
    throw CommandError(ExitCode::Endpoint, std::string("endpoint health check failed: ") + e.what());
  }

  bool missing = false;
  for (const auto& kind : config.kinds) missing = missing || !fs::is_regular_file(perturb_file(config, kind));
  if (missing) cmd_perturb(config, log);

  const Dataset dataset = load_dataset(config);
  const CorrectnessRule rule = effective_rule(config);

  auto score = [&](const Question& q, std::optional<PerturbationKind> kind, const std::string& text,
                   const BatchItem& item) {
    if (item.ok()) return make_record(q.id, kind, text, item.response->answer, q.ground_truths, rule);
    AnswerRecord r = make_record(q.id, kind, text, "", q.ground_truths, rule);
    r.correct = false;
    r.score = 0.0;
    r.error = std::string(model_error_name(item.error->kind())) + ": " + item.error->what();
    return r;
  };

  std::vector<VqaRequest> requests;
  for (const auto& q : dataset.questions()) requests.push_back({q.image, q.text});
  auto answers = answer_batch(*endpoint, requests, config.parallelism);
  std::vector<AnswerRecord> originals;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    originals.push_back(score(dataset.questions()[i], std::nullopt, requests[i].question, answers[i]));
    failures += answers[i].ok() ? 0 : 1;
  }
  write_or_fail(original_records_file(config), to_jsonl(originals));
  log << "original: " << originals.size() << " answers, " << failures << " failed\n";

  for (const auto& kind : config.kinds) {
    const auto cfs = read_jsonl_or_fail<CounterfactualQuestion>(perturb_file(config, kind), "perturbation file");
    std::vector<VqaRequest> cf_requests;
    std::vector<const Question*> sources;
    for (const auto& cf : cfs) {
      const Question* q = dataset.find(cf.question_id);
      if (!q) throw CommandError(ExitCode::Io, "counterfactual for unknown question '" + cf.question_id + "'");
      cf_requests.push_back({q->image, cf.text});
      sources.push_back(q);
    }
    auto cf_answers = answer_batch(*endpoint, cf_requests, config.parallelism);
    std::vector<AnswerRecord> records;
    failures = 0;
    for (std::size_t i = 0; i < cf_answers.size(); ++i) {
      records.push_back(score(*sources[i], kind, cf_requests[i].question, cf_answers[i]));
      failures += cf_answers[i].ok() ? 0 : 1;
    }
    write_or_fail(records_file(config, kind), to_jsonl(records));
    log << kind.id() << ": " << records.size() << " answers, " << failures << " failed\n";
  }
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

std::string accuracy_markdown(const ReportOutput& out, CorrectnessRule rule) {
  std::ostringstream md;
  md << "# Accuracy under counterfactual perturbations\n\n";
  md << "Correctness rule: " << rule_name(rule) << "\n\n";
  md << "| Perturbation | n | acc_Q % | acc*_Q % | reduction % | changed | failed |\n";
  md << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : out.accuracy) {
    char red[32];
    std::snprintf(red, sizeof red, "%.1f", r.relative_reduction_pct);
    md << "| " << r.kind.label() << " | " << r.n_questions << " | " << pct(r.acc_q) << " | "
       << pct(r.acc_star_q) << " | " << red << " | " << r.n_changed << " | " << r.n_failed << " |\n";
  }
  for (const auto& [kind, reason] : out.omitted) md << "\n" << kind.label() << " omitted: " << reason << "\n";
  return md.str();
}

}  // namespace

ReportOutput cmd_report(const ExperimentConfig& config, std::ostream& log) {
  if (config.kinds.empty()) config_error("kinds: at least one perturbation kind is required");
  const auto originals = read_jsonl_or_fail<AnswerRecord>(original_records_file(config), "record file");

  std::optional<WordNetGraph> graph;
  if (!config.wordnet_dir.empty() && fs::is_directory(config.wordnet_dir)) graph = load_wordnet(config);

  ReportOutput out;
  for (const auto& kind : config.kinds) {
    const auto cf_records = read_jsonl_or_fail<AnswerRecord>(records_file(config, kind), "record file");
    const auto cfs = read_jsonl_or_fail<CounterfactualQuestion>(perturb_file(config, kind), "perturbation file");
    if (cf_records.empty()) {
      out.omitted.emplace_back(kind, "no counterfactual questions");
      continue;
    }
    std::pair<std::vector<PairedOutcome>, AccuracyReport> compared;
    try {
      compared = compare_runs(originals, cf_records);
    } catch (const EvaluationError& e) {
      out.omitted.emplace_back(kind, e.what());
      continue;
    }
    compared.second.kind = kind;
    out.accuracy.push_back(compared.second);

    std::vector<SubstitutionRecord> subs;
    for (const auto& cf : cfs) subs.push_back(cf.record);
    auto locals = collect_locals(compared.first, subs, graph ? &*graph : nullptr);
    out.locals.insert(out.locals.end(), locals.begin(), locals.end());
  }

  std::vector<GlobalRule> rules;
  try {
    rules = mine_rules(out.locals, config.mining);
    if (config.hypernym_anchors && graph) {
      auto by_parent = anchor_by_hypernym(out.locals, *graph);
      std::vector<LocalExplanation> nouns;
      for (auto& l : by_parent) {
        if (l.kind.is_noun()) nouns.push_back(std::move(l));
      }
      auto family_rules = mine_rules(nouns, config.mining);
      rules.insert(rules.end(), family_rules.begin(), family_rules.end());
    }
  } catch (const ExplainError& e) {
    config_error(e.what());
  }
  out.rules = std::move(rules);

  const CorrectnessRule rule = effective_rule(config);
  json acc{{"schema", "cfprobe.accuracy/1"}, {"correctness_rule", rule_name(rule)}, {"kinds", out.accuracy}};
  acc["omitted"] = json::array();
  for (const auto& [kind, reason] : out.omitted) acc["omitted"].push_back({{"kind", kind}, {"reason", reason}});
  write_or_fail(report_dir(config) / "accuracy.json", acc.dump(2) + "\n");
  write_or_fail(report_dir(config) / "accuracy.md", accuracy_markdown(out, rule));
  try {
    render_report(out.rules, out.locals, report_dir(config));
  } catch (const ExplainError& e) {
    throw CommandError(ExitCode::Io, e.what());
  }
  log << accuracy_markdown(out, rule);
  log << out.rules.size() << " global rules written to " << (report_dir(config) / "rules.md").string() << "\n";
  return out;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cfprobe: knowledge-guided counterfactual probing of black-box VQA models"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> dataset_format, wordnet_dir, colors, stoplist, metric, endpoint_url, mock_table, rule,
      out_dir;
  std::vector<std::string> dataset_paths, kinds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism, min_support;
  std::optional<double> stable_threshold, volatile_threshold;
  std::optional<int> timeout_ms, max_retries;
  bool hypernym_anchors = false;

  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--dataset-format", dataset_format, "vqa2 | vg | toy");
  app.add_option("--dataset", dataset_paths, "dataset file(s); vqa2 takes questions then annotations");
  app.add_option("--wordnet-dir", wordnet_dir, "WordNet 3.x dict directory");
  app.add_option("--colors", colors, "named-color CSV (name,#RRGGBB)");
  app.add_option("--stoplist", stoplist, "word-per-line stoplist");
  app.add_option("--metric", metric, "euclidean-rgb | delta-e76-lab");
  app.add_option("--kind", kinds, "perturbation kind, repeatable (e.g. color-maximal:common, synonym-verb)");
  app.add_option("--seed", seed, "run seed");
  auto* url_opt = app.add_option("--endpoint-url", endpoint_url, "HTTP model base URL");
  app.add_option("--mock-table", mock_table, "mock model answer table (JSON)")->excludes(url_opt);
  app.add_option("--timeout-ms", timeout_ms, "HTTP timeout per request");
  app.add_option("--max-retries", max_retries, "HTTP retries for transient failures");
  app.add_option("--parallelism", parallelism, "requests in flight");
  app.add_option("--rule", rule, "auto | exact-any | vqa-soft");
  app.add_option("--min-support", min_support, "rule mining minimum support");
  app.add_option("--stable-threshold", stable_threshold, "max change rate of a stable rule");
  app.add_option("--volatile-threshold", volatile_threshold, "min change rate of a volatile rule");
  app.add_flag("--hypernym-anchors", hypernym_anchors, "also mine noun rules keyed by immediate hypernym");
  app.add_option("--out", out_dir, "output directory");

  auto* perturb = app.add_subcommand("perturb", "write counterfactual questions per kind");
  auto* run = app.add_subcommand("run", "query the model on original and counterfactual questions");
  auto* report = app.add_subcommand("report", "accuracy table and mined global rules");
  auto* all = app.add_subcommand("all", "perturb, run and report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  try {
    ExperimentConfig c;
    if (!config_path.empty()) c = load_config(config_path);
    if (dataset_format) {
      auto f = parse_dataset_format(*dataset_format);
      if (!f) config_error("--dataset-format must be vqa2, vg or toy");
      c.dataset_format = *f;
    }
    if (!dataset_paths.empty()) c.dataset_paths.assign(dataset_paths.begin(), dataset_paths.end());
    if (wordnet_dir) c.wordnet_dir = *wordnet_dir;
    if (colors) c.colors_path = *colors;
    if (stoplist) c.stoplist_path = *stoplist;
    if (metric) {
      auto m = parse_metric(*metric);
      if (!m) config_error("--metric must be euclidean-rgb or delta-e76-lab");
      c.metric = *m;
    }
    if (!kinds.empty()) {
      c.kinds.clear();
      for (const auto& k : kinds) {
        try {
          c.kinds.push_back(parse_kind(k));
        } catch (const std::invalid_argument& e) {
          config_error(std::string("--kind: ") + e.what());
        }
      }
    }
    if (seed) c.seed = *seed;
    if (endpoint_url) {
      EndpointConfig ep;
      ep.mode = EndpointConfig::Mode::Http;
      ep.url = *endpoint_url;
      c.endpoint = ep;
    } else if (mock_table) {
      EndpointConfig ep;
      ep.mode = EndpointConfig::Mode::Mock;
      ep.table = *mock_table;
      c.endpoint = ep;
    } else if (!c.endpoint) {
      if (const char* env = std::getenv("CFPROBE_ENDPOINT_URL"); env && *env) {
        EndpointConfig ep;
        ep.mode = EndpointConfig::Mode::Http;
        ep.url = env;
        c.endpoint = ep;
      }
    }
    if (c.endpoint && timeout_ms) c.endpoint->http.timeout = std::chrono::milliseconds(*timeout_ms);
    if (c.endpoint && max_retries) c.endpoint->http.max_retries = *max_retries;
    if (parallelism) c.parallelism = *parallelism;
    if (rule) {
      if (*rule == "auto") {
        c.rule.reset();
      } else {
        c.rule = parse_rule(*rule);
        if (!c.rule) config_error("--rule must be auto, exact-any or vqa-soft");
      }
    }
    if (min_support) c.mining.min_support = *min_support;
    if (stable_threshold) c.mining.stable_threshold = *stable_threshold;
    if (volatile_threshold) c.mining.volatile_threshold = *volatile_threshold;
    if (hypernym_anchors) c.hypernym_anchors = true;
    if (out_dir) c.output_dir = *out_dir;

    if (perturb->parsed()) cmd_perturb(c, out);
    if (run->parsed()) cmd_run(c, out);
    if (report->parsed()) cmd_report(c, out);
    if (all->parsed()) {
      cmd_perturb(c, out);
      cmd_run(c, out);
      cmd_report(c, out);
    }
  } catch (const CommandError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Io);
  }
  return 0;
}

}  // namespace cfprobe
