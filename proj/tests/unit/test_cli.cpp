#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hpboost/cli.hpp"
#include "hpboost/config.hpp"
#include "json.hpp"

using namespace hpboost;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"hpboost"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(HPBOOST_TEST_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hpboost_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, StrictKeysWithPaths) {
  try {
    const auto t = ConfigTree::parse("experiment:\n  trials: 1\n  problem: {type: paging, k: 2, colour: x}\n");
    experiment_from(t.required_section("experiment"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "experiment.problem.colour");
  }
  EXPECT_THROW(ConfigTree::parse("bogus: 1\n"), ConfigError);
}

TEST(Config, HashIsStable) {
  EXPECT_EQ(config_hash("a: 1\n"), config_hash("a: 1\n"));
  EXPECT_NE(config_hash("a: 1\n"), config_hash("a: 2\n"));
}

TEST(Config, MarkingRatioIsExact) {
  EXPECT_EQ(marking_ratio(1), Rational(1));
  EXPECT_EQ(marking_ratio(2), Rational(2));
  EXPECT_EQ(marking_ratio(3), Rational(8, 3));  // 2 (1 + 1/2 + 1/3) - 1
}

TEST(Cli, ParamsPrintsTableAndFile) {
  const auto dir = scratch("params");
  const auto r = cli({"params", "--config", config("params.yaml"), "--out", dir.string()});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_NE(r.out.find("C=6"), std::string::npos);
  EXPECT_NE(r.out.find("D=144"), std::string::npos);
  EXPECT_NE(r.out.find("mu=144/7"), std::string::npos);
  EXPECT_EQ(slurp(dir / "params.txt"), r.out);
}

TEST(Cli, MissingEpsilonIsConfigError) {
  const auto r = cli({"params", "--config", config("params_missing_epsilon.yaml")});
  EXPECT_EQ(r.code, kExitConfig);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["path"], "params.epsilon");
}

TEST(Cli, UnknownKeyAndUsage) {
  EXPECT_EQ(cli({"run", "--config", config("unknown_key.yaml")}).code, kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(cli({"run"}).code, kExitConfig);
  EXPECT_EQ(cli({"run", "--config", config("does_not_exist.yaml")}).code, kExitConfig);
}

TEST(Cli, RunIsReproducibleAcrossThreads) {
  const auto a = scratch("run_a"), b = scratch("run_b");
  const auto ra = cli({"run", "--config", config("run_paging.yaml"), "--out", a.string(), "--threads", "1"});
  const auto rb = cli({"run", "--config", config("run_paging.yaml"), "--out", b.string(), "--threads", "3"});
  EXPECT_EQ(ra.code, kExitPass) << ra.err;
  EXPECT_EQ(rb.code, kExitPass);
  EXPECT_EQ(slurp(a / "trials.csv"), slurp(b / "trials.csv"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  const auto rep = nlohmann::json::parse(slurp(a / "report.json"));
  EXPECT_EQ(rep["schema_version"], 1);
  EXPECT_TRUE(rep.contains("config_hash"));
  EXPECT_TRUE(rep.contains("lemma1"));
  EXPECT_TRUE(rep.contains("paired"));
  // Overriding the seed changes the trials.
  const auto c = scratch("run_c");
  cli({"run", "--config", config("run_paging.yaml"), "--out", c.string(), "--seed", "99"});
  EXPECT_NE(slurp(a / "trials.csv"), slurp(c / "trials.csv"));
}

TEST(Cli, OracleCheckPassesAndCatchesPerturbation) {
  EXPECT_EQ(cli({"oracle-check", "--config", config("oracle_small.yaml")}).code, kExitPass);
  const auto bad = cli({"oracle-check", "--config", config("oracle_perturbed.yaml")});
  EXPECT_EQ(bad.code, kExitVerdict);
  EXPECT_NE(bad.out.find("minimal"), std::string::npos);
  EXPECT_EQ(cli({"oracle-check", "--config", config("oracle_empty.yaml")}).code, kExitPass);
}

TEST(Cli, JssAndCounterexamples) {
  const auto dir = scratch("jss");
  const auto j = cli({"jss", "--config", config("jss_small.yaml"), "--out", dir.string()});
  EXPECT_EQ(j.code, kExitPass) << j.err;
  EXPECT_TRUE(fs::exists(dir / "trials.csv"));
  EXPECT_EQ(cli({"counterexample", "--config", config("counterexample_doubling.yaml")}).code, kExitPass);
  EXPECT_EQ(cli({"counterexample", "--config", config("counterexample_bitguess.yaml")}).code, kExitPass);
}
