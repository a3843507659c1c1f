#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedpref/cli/commands.hpp"
#include "fedpref/cli/config_io.hpp"
#include "fedpref/cli/output.hpp"

namespace fedpref::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kConfig = R"({
  "federation": {
    "algorithm": "fedpref", "rounds": 8, "local_steps": 2, "learning_rate": 0.1,
    "clients": 8, "seed": 3, "clustering_threshold": 0.05, "patience": 1, "top_r": 0.5
  },
  "problem": {
    "kind": "conflicting_groups", "objectives": 2, "layers": [4, 4],
    "group_preferences": [[0.9, 0.1], [0.1, 0.9]], "group_sizes": [4, 4],
    "gradient_noise": 0.01
  }
})";

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    configure_logging();
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("fedpref_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

RunOptions options(const fs::path& config, const fs::path& out) {
  RunOptions o;
  o.config = config;
  o.out = out;
  return o;
}

json with_config(const std::function<void(json&)>& edit) {
  json j = json::parse(kConfig);
  edit(j);
  return j;
}

TEST(ConfigIo, MissingFieldIsNamed) {
  auto j = with_config([](json& c) { c["federation"].erase("learning_rate"); });
  try {
    parse_experiment(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("federation.learning_rate"), std::string::npos);
  }
}

TEST(ConfigIo, UnknownFieldIsNamed) {
  auto j = with_config([](json& c) { c["problem"]["separaton"] = 2.0; });
  try {
    parse_experiment(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("problem.separaton"), std::string::npos);
  }
}

TEST(ConfigIo, SyntaxErrorHasPosition) {
  try {
    parse_experiment_text("{\n  \"federation\": {,\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ConfigIo, PatienceAcceptsNever) {
  auto j = with_config([](json& c) { c["federation"]["patience"] = "never"; });
  EXPECT_EQ(parse_experiment(j).base.patience, kNeverSplit);
}

TEST(ConfigIo, HashIgnoresThreadsButNotSeed) {
  auto spec = parse_experiment(json::parse(kConfig));
  auto other = spec.base;
  other.threads = 8;
  EXPECT_EQ(config_hash(spec.base), config_hash(other));
  other.seed = 4;
  EXPECT_NE(config_hash(spec.base), config_hash(other));
  EXPECT_EQ(problem_hash(spec.base), problem_hash(other));
  EXPECT_EQ(config_hash(spec.base).size(), 16u);
}

TEST(ConfigIo, RoundTripThroughEffectiveConfig) {
  auto spec = parse_experiment(json::parse(kConfig));
  json effective = {{"federation", to_json(spec.base)["federation"]},
                    {"problem", to_json(spec.base)["problem"]},
                    {"preferences", to_json(spec.base)["preferences"]}};
  EXPECT_EQ(config_hash(parse_experiment(effective).base), config_hash(spec.base));
}

TEST(Output, FormatDoubleRoundTrips) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 12345.678}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Commands, MeanStdPopulation) {
  std::vector<double> v{1.0, 3.0};
  auto s = mean_std(v);
  EXPECT_EQ(s.mean, 2.0);
  EXPECT_EQ(s.stddev, 1.0);
  std::vector<double> one{5.0};
  EXPECT_EQ(mean_std(one).stddev, 0.0);
}

TEST_F(Workspace, MissingFieldExitsWithConfigError) {
  auto cfg = write("bad.json", with_config([](json& c) { c["federation"].erase("rounds"); }).dump());
  std::ostringstream err;
  EXPECT_EQ(run(options(cfg, dir_ / "out"), err), kExitConfig);
  EXPECT_NE(err.str().find("federation.rounds"), std::string::npos);
}

TEST_F(Workspace, RunWritesAllFilesWithHash) {
  auto cfg = write("c.json", kConfig);
  std::ostringstream err;
  ASSERT_EQ(run(options(cfg, dir_ / "out"), err), kExitOk) << err.str();
  for (const char* f : {"manifest.json", "rounds.jsonl", "solutions.csv", "metrics.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const std::string hash = read_json(dir_ / "out" / "manifest.json").at("config_hash");
  EXPECT_EQ(read_json(dir_ / "out" / "metrics.json").at("config_hash"), hash);
  auto csv = slurp(dir_ / "out" / "solutions.csv");
  EXPECT_EQ(csv.rfind("# config_hash=" + hash + "\nclient_id,w_1,w_2,f_1,f_2,scalarised\n", 0), 0u);

  std::ifstream rounds(dir_ / "out" / "rounds.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(rounds, line)) {
    auto r = json::parse(line);
    EXPECT_EQ(r.at("config_hash"), hash);
    EXPECT_EQ(r.at("round"), ++n);
    EXPECT_EQ(r.at("cluster_assignment").size(), 8u);
  }
  EXPECT_EQ(n, 8u);
}

TEST_F(Workspace, RerunIsByteIdentical) {
  auto cfg = write("c.json", kConfig);
  std::ostringstream err;
  ASSERT_EQ(run(options(cfg, dir_ / "a"), err), kExitOk);
  auto threaded = options(cfg, dir_ / "b");
  threaded.threads = 3;
  ASSERT_EQ(run(threaded, err), kExitOk);
  EXPECT_EQ(slurp(dir_ / "a" / "solutions.csv"), slurp(dir_ / "b" / "solutions.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "rounds.jsonl"), slurp(dir_ / "b" / "rounds.jsonl"));
}

TEST_F(Workspace, SeedAndAlgorithmOverrides) {
  auto cfg = write("c.json", kConfig);
  std::ostringstream err;
  auto opts = options(cfg, dir_ / "o");
  opts.seed = 11;
  opts.algorithm = "fedavg";
  ASSERT_EQ(run(opts, err), kExitOk);
  auto m = read_json(dir_ / "o" / "metrics.json");
  EXPECT_EQ(m.at("seed"), 11);
  EXPECT_EQ(m.at("algorithm"), "fedavg");
  EXPECT_EQ(m.at("cardinality"), 1);
  opts.algorithm = "nope";
  EXPECT_EQ(run(opts, err), kExitConfig);
}

TEST_F(Workspace, NumericFailureExitsWithRound) {
  auto cfg = write("c.json", with_config([](json& c) {
                     c["federation"]["learning_rate"] = 50.0;
                     c["federation"]["local_steps"] = 300;
                   }).dump());
  std::ostringstream err;
  EXPECT_EQ(run(options(cfg, dir_ / "o"), err), kExitNumeric);
  EXPECT_NE(err.str().find("round 1"), std::string::npos) << err.str();
}

TEST_F(Workspace, CampaignWritesRunsAndSharedFront) {
  auto cfg = write("camp.json", with_config([](json& c) {
                     c["campaign"] = {{"algorithms", {"fedpref", "fedavg", "local"}},
                                      {"seeds", {1}}};
                   }).dump());
  std::ostringstream err;
  ASSERT_EQ(run(options(cfg, dir_ / "camp"), err), kExitOk) << err.str();
  std::size_t manifests = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "camp")) {
    if (e.is_directory()) {
      EXPECT_TRUE(fs::exists(e.path() / "manifest.json"));
      EXPECT_TRUE(read_json(e.path() / "metrics.json").contains("igd_campaign"));
      ++manifests;
    }
  }
  EXPECT_EQ(manifests, 3u);
  EXPECT_TRUE(fs::exists(dir_ / "camp" / "reference_front.csv"));
  auto campaign = read_json(dir_ / "camp" / "campaign.json");
  EXPECT_EQ(campaign.at("runs").size(), 3u);
  EXPECT_FALSE(read_objectives_csv(dir_ / "camp" / "reference_front.csv").empty());

  std::ostringstream out;
  std::vector<fs::path> dirs{dir_ / "camp"};
  EXPECT_EQ(summarize(dirs, dir_ / "summary.json", out, err), kExitOk);
  auto summary = read_json(dir_ / "summary.json");
  EXPECT_EQ(summary.at("algorithms").size(), 3u);
  EXPECT_EQ(summary["algorithms"]["fedavg"]["mean_scalarised"]["std"], 0.0);
}

TEST_F(Workspace, SummarizePoolsWithPopulationStd) {
  for (int v : {1, 3}) {
    auto d = dir_ / ("r" + std::to_string(v));
    fs::create_directories(d);
    write_json(d / "metrics.json", {{"problem_hash", "abc"},
                                    {"algorithm", "fedpref"},
                                    {"mean_scalarised", v},
                                    {"hypervolume", 0},
                                    {"sparsity", 0},
                                    {"igd", 0},
                                    {"cardinality", 1}});
  }
  std::ostringstream out, err;
  std::vector<fs::path> dirs{dir_ / "r1", dir_ / "r3"};
  ASSERT_EQ(summarize(dirs, dir_ / "s.json", out, err), kExitOk) << err.str();
  auto s = read_json(dir_ / "s.json");
  EXPECT_EQ(s["algorithms"]["fedpref"]["mean_scalarised"]["mean"], 2.0);
  EXPECT_EQ(s["algorithms"]["fedpref"]["mean_scalarised"]["std"], 1.0);
}

TEST_F(Workspace, SummarizeRejectsMissingAndMixedRuns) {
  std::ostringstream out, err;
  std::vector<fs::path> missing{dir_ / "nope"};
  EXPECT_EQ(summarize(missing, std::nullopt, out, err), kExitConfig);

  for (const char* h : {"aaa", "bbb"}) {
    auto d = dir_ / h;
    fs::create_directories(d);
    write_json(d / "metrics.json", {{"problem_hash", h},
                                    {"algorithm", "fedavg"},
                                    {"mean_scalarised", 0},
                                    {"hypervolume", 0},
                                    {"sparsity", 0},
                                    {"igd", 0},
                                    {"cardinality", 1}});
  }
  std::vector<fs::path> mixed{dir_ / "aaa", dir_ / "bbb"};
  EXPECT_EQ(summarize(mixed, std::nullopt, out, err), kExitConfig);
  EXPECT_NE(err.str().find("different problems"), std::string::npos);
}

TEST_F(Workspace, MetricsCommand) {
  auto sol = write("s.csv", "# x\nclient_id,w_1,w_2,f_1,f_2,scalarised\n0,1,0,1,3,0\n1,0,1,3,1,0\n"
                            "2,.5,.5,2,2,0\n");
  auto front = write("f.csv", "# x\nf_1,f_2\n0,1\n1,0\n");
  std::ostringstream out, err;
  std::vector<double> ref{0.0, 0.0};
  ASSERT_EQ(metrics(sol, ref, front, out, err), kExitOk) << err.str();
  auto j = json::parse(out.str());
  EXPECT_EQ(j.at("hypervolume"), 6.0);
  EXPECT_EQ(j.at("cardinality"), 3);
  EXPECT_TRUE(j.contains("igd"));
  std::vector<double> short_ref{0.0};
  EXPECT_EQ(metrics(sol, short_ref, std::nullopt, out, err), kExitConfig);
}

}  // namespace
}  // namespace fedpref::cli
