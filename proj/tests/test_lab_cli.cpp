#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>
#include <string>

#include "qflab/lab/registry.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("qflab_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

CliResult cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = scratch();
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + QFLAB_CLI_PATH + "\" " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

double stderr_number(const std::string& err, const std::string& key) {
  const std::regex re(key + ": ([0-9.eE+-]+)");
  std::smatch m;
  if (!std::regex_search(err, m, re)) return -1;
  return std::stod(m[1].str());
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST(Cli, ListsEveryExperimentWithAnchor) {
  const CliResult r = cli("list");
  ASSERT_EQ(r.code, 0);
  for (const auto& e : qflab::lab::experiments()) {
    EXPECT_NE(r.out.find(e.name + "\t" + e.anchor), std::string::npos) << e.name;
  }
  EXPECT_EQ(qflab::lab::experiments().size(), 31u);
}

TEST(Cli, RunWritesVersionedReport) {
  const std::string path = (scratch() / "parseval.json").string();
  const CliResult r = cli("run parseval --p 3 --n 4 --trials 100 --out " + path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j["schema"], "qflab-report/1");
  EXPECT_EQ(j["experiment"], "parseval");
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["aggregate"]["hard_checks"], 100);
  EXPECT_LT(j["aggregate"]["max_margin"].get<double>(), 0.0);
  EXPECT_FALSE(j["config"].contains("threads"));
  EXPECT_FALSE(j["config"].contains("out"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("run no-such-experiment").code, 2);
  EXPECT_EQ(cli("estimate no-such-experiment").code, 2);
  EXPECT_EQ(cli("run parseval --config /nonexistent/cfg.json").code, 2);
  EXPECT_EQ(cli("run parseval --config " + write_file("bad.json", "{not json")).code, 2);
  EXPECT_EQ(cli("run parseval --config " + write_file("badval.json", R"({"trials": "many"})")).code, 2);
  EXPECT_EQ(cli("run parseval --p 4").code, 2);
  EXPECT_EQ(cli("run gcs --n 9").code, 2);
  EXPECT_EQ(cli("estimate gcs --n 9").code, 2);
  EXPECT_EQ(cli("run --bogus-flag").code, 2);
  EXPECT_EQ(cli("run parseval --trials 5").code, 0);
}

TEST(Cli, HardFailureExitsOne) {
  const CliResult r = cli("run coset-union-vc");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("\"status\": \"fail\""), std::string::npos);
}

TEST(Cli, ConfigFileAndOverridesCompose) {
  const std::string cfg = write_file("cfg.json", R"({"trials": 7, "seed": 99})");
  const CliResult r = cli("run parseval --config " + cfg + " --trials 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["trials"], 3);
  EXPECT_EQ(j["config"]["seed"], 99);
}

TEST(Cli, EstimatePrintsCost) {
  const CliResult r = cli("estimate control-ip2");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j["estimated_terms"].get<double>(), 0.0);
  EXPECT_TRUE(j["within_cap"].get<bool>());
}

TEST(Cli, ReportsAreDeterministic) {
  for (const std::string e : {"gcs", "local-triangle", "counting-binary", "vc2-structure", "control-ip2-local-trend"}) {
    const CliResult a = cli("run " + e + " --threads 1");
    const CliResult b = cli("run " + e + " --threads 1");
    const CliResult c = cli("run " + e + " --threads 8");
    EXPECT_EQ(a.out, b.out) << e;
    EXPECT_EQ(a.out, c.out) << e;
    EXPECT_FALSE(a.out.empty());
  }
  EXPECT_NE(cli("run gcs --seed 2").out, cli("run gcs --seed 3").out);
}

TEST(Cli, EstimatorWithinTenfoldOnAllDefaults) {
  for (const auto& e : qflab::lab::experiments()) {
    const CliResult r = cli("run " + e.name);
    ASSERT_TRUE(r.code == 0 || r.code == 1) << e.name << "\n" << r.err;
    const double est = stderr_number(r.err, "estimated terms");
    const double got = stderr_number(r.err, "counted terms");
    ASSERT_GT(est, 0) << e.name;
    ASSERT_GT(got, 0) << e.name;
    EXPECT_LE(est, 10 * got) << e.name;
    EXPECT_LE(got, 10 * est) << e.name;
  }
}
