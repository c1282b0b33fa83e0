#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cfprobe/cli.hpp"
#include "support.hpp"
#include "toy_expectations.hpp"

using namespace cfprobe;
using cfprobe::testing::slurp;
using cfprobe::testing::TempDir;
using cfprobe::testing::kToyTable;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cfprobe");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path toy_config() { return cfprobe::testing::data_dir() / "toy" / "config.json"; }

// Every file below root, keyed by relative path.
std::map<std::string, std::string> tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

class Stub {
 public:
  explicit Stub(std::string answer) {
    server_.Post("/answer", [answer](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"answer", answer}}.dump(), "application/json");
    });
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status": "ok"})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Stub() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace

TEST(Config, LoadsToyConfig) {
  auto c = load_config(toy_config());
  EXPECT_EQ(c.dataset_format, DatasetFormat::Toy);
  ASSERT_EQ(c.dataset_paths.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(c.dataset_paths[0]));
  EXPECT_EQ(c.kinds.size(), 10u);
  EXPECT_EQ(c.seed, 2023u);
  ASSERT_TRUE(c.endpoint);
  EXPECT_EQ(c.endpoint->mode, EndpointConfig::Mode::Mock);
  EXPECT_FALSE(c.rule);
  EXPECT_EQ(effective_rule(c), CorrectnessRule::ExactAny);
  EXPECT_EQ(c.mining.min_support, 2u);
  EXPECT_NO_THROW(validate_config(c, true));
  c.dataset_format = DatasetFormat::Vqa2;
  EXPECT_EQ(effective_rule(c), CorrectnessRule::VqaSoft);
}

TEST(Config, ValidationNamesTheField) {
  auto base = load_config(toy_config());
  auto expect_config_error = [](const ExperimentConfig& c, const std::string& needle) {
    try {
      validate_config(c, true);
      ADD_FAILURE() << "accepted config, expected error about " << needle;
    } catch (const CommandError& e) {
      EXPECT_EQ(e.code(), ExitCode::Config);
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  auto c = base;
  c.wordnet_dir = "/nonexistent/dict";
  expect_config_error(c, "wordnet_dir");
  c = base;
  c.kinds.clear();
  expect_config_error(c, "kinds");
  c = base;
  c.parallelism = 0;
  expect_config_error(c, "parallelism");
  c = base;
  c.mining.stable_threshold = 0.9;
  expect_config_error(c, "threshold");
  c = base;
  c.dataset_format = DatasetFormat::Vqa2;
  expect_config_error(c, "dataset");
  c = base;
  c.endpoint.reset();
  expect_config_error(c, "endpoint");
  EXPECT_NO_THROW(validate_config(c, false));
}

TEST(Config, MalformedFiles) {
  TempDir dir("cfg");
  for (const char* text : {"{", R"({"dataset": {"format": "csv", "paths": ["x"]}})", R"({"kinds": ["bogus"]})",
                           R"({"metric": "cie2000"})", R"({"endpoint": {"mode": "grpc"}})"}) {
    try {
      load_config(dir.write("c.json", text));
      ADD_FAILURE() << text;
    } catch (const CommandError& e) {
      EXPECT_EQ(e.code(), ExitCode::Config) << text;
    }
  }
}

TEST(Cli, EndToEndMockMatchesHandCount) {
  TempDir dir("e2e");
  auto r = cli({"all", "--config", toy_config().string(), "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;

  auto doc = json::parse(slurp(dir.path() / "report" / "accuracy.json"));
  EXPECT_EQ(doc.at("correctness_rule"), "exact-any");
  EXPECT_TRUE(doc.at("omitted").empty());
  const auto& kinds = doc.at("kinds");
  ASSERT_EQ(kinds.size(), std::size(kToyTable));
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto& e = kToyTable[i];
    const auto& k = kinds[i];
    SCOPED_TRACE(e.kind);
    EXPECT_EQ(k.at("kind"), e.kind);
    EXPECT_EQ(k.at("n_questions"), e.n);
    EXPECT_EQ(k.at("acc_q").get<double>(), static_cast<double>(e.correct_q) / e.n);
    EXPECT_EQ(k.at("acc_star_q").get<double>(), static_cast<double>(e.correct_star) / e.n);
    EXPECT_NEAR(k.at("relative_reduction_pct").get<double>(),
                100.0 * (static_cast<double>(e.correct_q) - e.correct_star) / e.correct_q, 1e-9);
    EXPECT_EQ(k.at("n_changed"), e.changed);
    EXPECT_EQ(k.at("n_failed"), 0);
  }

  auto md = slurp(dir.path() / "report" / "accuracy.md");
  EXPECT_NE(md.find("| Sibling Noun | 10 | 90.0 | 30.0 | 66.7 | 7 | 0 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| Color Maximal (uncommon) | 4 | 50.0 | 75.0 | -50.0 | 2 | 0 |"), std::string::npos);
}

TEST(Cli, WritesEveryOutputFile) {
  TempDir dir("files");
  ASSERT_EQ(cli({"all", "--config", toy_config().string(), "--out", dir.path().string()}).code, 0);
  auto config = load_config(toy_config());
  config.output_dir = dir.path();
  for (const auto& kind : config.kinds) {
    EXPECT_TRUE(std::filesystem::exists(perturb_file(config, kind))) << kind.id();
    EXPECT_TRUE(std::filesystem::exists(records_file(config, kind))) << kind.id();
  }
  EXPECT_TRUE(std::filesystem::exists(skips_file(config)));
  EXPECT_TRUE(std::filesystem::exists(original_records_file(config)));
  for (const char* f : {"accuracy.json", "accuracy.md", "rules.json", "rules.md"})
    EXPECT_TRUE(std::filesystem::exists(report_dir(config) / f)) << f;
  EXPECT_EQ(tree(dir.path()).size(), 2 * config.kinds.size() + 2 + 4);

  auto skips = json::parse(slurp(skips_file(config)));
  EXPECT_EQ(skips.at("sibling-noun"), (json{{"generated", 10}, {"no_target", 1}, {"no_replacement", 1}}));
  EXPECT_EQ(skips.at("synonym-verb").at("generated"), 5);
}

TEST(Cli, RerunsAreByteIdentical) {
  TempDir a("rerun-a"), b("rerun-b"), c("rerun-c");
  ASSERT_EQ(cli({"all", "--config", toy_config().string(), "--out", a.path().string()}).code, 0);
  ASSERT_EQ(cli({"all", "--config", toy_config().string(), "--out", b.path().string()}).code, 0);
  ASSERT_EQ(cli({"all", "--config", toy_config().string(), "--out", c.path().string(), "--parallelism", "1"}).code, 0);
  auto ta = tree(a.path());
  EXPECT_EQ(ta, tree(b.path()));
  EXPECT_EQ(ta, tree(c.path()));
}

TEST(Cli, StagesCanRunSeparately) {
  TempDir dir("stages");
  const auto cfg = toy_config().string();
  const auto out = dir.path().string();
  EXPECT_EQ(cli({"perturb", "--config", cfg, "--out", out}).code, 0);
  EXPECT_EQ(cli({"report", "--config", cfg, "--out", out}).code, static_cast<int>(ExitCode::Io));
  EXPECT_EQ(cli({"run", "--config", cfg, "--out", out}).code, 0);
  EXPECT_EQ(cli({"report", "--config", cfg, "--out", out}).code, 0);
  TempDir whole("stages-all");
  ASSERT_EQ(cli({"all", "--config", cfg, "--out", whole.path().string()}).code, 0);
  EXPECT_EQ(tree(dir.path()), tree(whole.path()));
}

TEST(Cli, ExitCodes) {
  TempDir dir("codes");
  const auto cfg = toy_config().string();
  const auto out = dir.path().string();
  EXPECT_EQ(cli({}).code, static_cast<int>(ExitCode::Usage));
  EXPECT_EQ(cli({"all", "--config", cfg, "--bogus-flag"}).code, static_cast<int>(ExitCode::Usage));
  auto bad_wn = cli({"all", "--config", cfg, "--out", out, "--wordnet-dir", "/nonexistent"});
  EXPECT_EQ(bad_wn.code, static_cast<int>(ExitCode::Config));
  EXPECT_NE(bad_wn.err.find("wordnet"), std::string::npos) << bad_wn.err;
  EXPECT_EQ(cli({"all", "--config", "/nonexistent/config.json"}).code, static_cast<int>(ExitCode::Config));
  EXPECT_EQ(cli({"perturb", "--config", cfg, "--out", out, "--kind", "nope"}).code, static_cast<int>(ExitCode::Config));
}

TEST(Cli, UnreachableEndpointFailsHealthCheck) {
  TempDir dir("unreach");
  auto r = cli({"run", "--config", toy_config().string(), "--out", dir.path().string(), "--endpoint-url",
                "http://127.0.0.1:9", "--timeout-ms", "300", "--max-retries", "0"});
  EXPECT_EQ(r.code, static_cast<int>(ExitCode::Endpoint)) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "records" / "original.jsonl"));
}

TEST(Cli, HttpEndpointRun) {
  Stub stub("yes");
  TempDir dir("http");
  auto r = cli({"all", "--config", toy_config().string(), "--out", dir.path().string(), "--endpoint-url", stub.url(),
                "--kind", "synonym-verb"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(slurp(dir.path() / "report" / "accuracy.json"));
  ASSERT_EQ(doc.at("kinds").size(), 1u);
  const auto& k = doc.at("kinds")[0];
  // Always "yes": q1 and q10 are right before and after, q4, q7, q11 never.
  EXPECT_EQ(k.at("n_questions"), 5);
  EXPECT_EQ(k.at("acc_q").get<double>(), 0.4);
  EXPECT_EQ(k.at("acc_star_q").get<double>(), 0.4);
  EXPECT_EQ(k.at("n_changed"), 0);
}

TEST(Cli, KindWithoutCounterfactualsIsOmitted) {
  TempDir dir("omit");
  dir.write("d.jsonl", R"({"id": "a", "image_id": "i1", "question": "Why?", "answers": ["x"]})"
                       "\n"
                       R"({"id": "b", "image_id": "i2", "question": "Is the dog asleep?", "answers": ["yes"]})"
                       "\n");
  dir.write("mock.json", R"({"default": "yes"})");
  const auto root = std::filesystem::absolute(cfprobe::testing::data_dir());
  auto cfg = json{{"dataset", {{"format", "toy"}, {"paths", {"d.jsonl"}}}},
                  {"wordnet_dir", std::filesystem::absolute(cfprobe::testing::wordnet_dir()).string()},
                  {"colors_path", (root / "colors_css4.csv").string()},
                  {"stoplist_path", (root / "stoplist.txt").string()},
                  {"kinds", {"color-maximal:common", "deletion-noun"}},
                  {"seed", 1},
                  {"endpoint", {{"mode", "mock"}, {"table", "mock.json"}}},
                  {"mining", {{"min_support", 1}, {"stable_threshold", 0.2}, {"volatile_threshold", 0.8}}}};
  auto path = dir.write("config.json", cfg.dump());
  auto r = cli({"all", "--config", path.string(), "--out", (dir.path() / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(slurp(dir.path() / "out" / "report" / "accuracy.json"));
  ASSERT_EQ(doc.at("kinds").size(), 1u);
  EXPECT_EQ(doc.at("kinds")[0].at("kind"), "deletion-noun");
  ASSERT_EQ(doc.at("omitted").size(), 1u);
  EXPECT_EQ(doc.at("omitted")[0].at("kind"), "color-maximal:common");

  // The one deletion local has support 1 and "yes" -> "yes": a stable rule on "dog".
  auto rules = report_from_json(slurp(dir.path() / "out" / "report" / "rules.json")).rules;
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].anchor, "dog");
  EXPECT_EQ(rules[0].verdict, Verdict::StableUnderPerturbation);
}
