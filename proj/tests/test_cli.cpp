#include "run_cli.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using mm3::testing::run_cli;
using Json = nlohmann::json;

namespace {

Json parse(const std::string& text) { return Json::parse(text); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("moyal_m3_test_" + name)).string();
}

}  // namespace

TEST(Cli, VerifyAlgebraPasses) {
  auto r = run_cli("verify-algebra");
  EXPECT_EQ(r.code, 0);
  auto j = parse(r.out);
  EXPECT_EQ(j["schema"], "moyal-m3-report/1");
  EXPECT_EQ(j["command"], "verify-algebra");
  EXPECT_EQ(j["summary"]["pass"], true);
  for (const auto& c : j["checks"]) {
    EXPECT_FALSE(c["anchor"].get<std::string>().empty());
    EXPECT_EQ(c["verdict"], c["residual"].get<double>() <= c["tolerance"]["value"].get<double>() ? "pass" : "fail");
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("no-such-command").code, 2);
  EXPECT_EQ(run_cli("verify-algebra --no-such-flag").code, 2);
  EXPECT_EQ(run_cli("verify-rep --lambda 0").code, 2);
  EXPECT_EQ(run_cli("verify-rep --lambda -1/2").code, 2);
  EXPECT_EQ(run_cli("verify-covariance --bivector diagonal").code, 2);
  EXPECT_EQ(run_cli("fourier-check --n 100").code, 2);
  EXPECT_EQ(run_cli("star-eval 's1 +' t2").code, 2);
  EXPECT_EQ(run_cli("star-eval 'exp(s1)' 'exp(t2)'").code, 2);
  EXPECT_EQ(run_cli("verify-polarization --chi 1").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, StarEvalPrintsTheFirstOrderTerm) {
  auto r = run_cli("star-eval s1 t2 --lambda 1");
  ASSERT_EQ(r.code, 0);
  auto out = parse(r.out)["output"];
  EXPECT_EQ(out["product"], "s1*t2 + 1/2*i");
  EXPECT_EQ(out["p1"], "-1");
  EXPECT_EQ(out["nu"], "-1/2*i");
  EXPECT_EQ(out["order"], 1);
  EXPECT_EQ(out["exact"], true);

  auto t = parse(run_cli("star-eval 'exp(s1)' 'exp(t2)' --order 2").out)["output"];
  EXPECT_EQ(t["exact"], false);
  EXPECT_EQ(t["order"], 2);
}

TEST(Cli, FailedCheckExitsOne) {
  // a zero FFT tolerance cannot be met by a floating-point residual
  auto r = run_cli("--tol.fft 0 fourier-check --n 64 --extent 10");
  EXPECT_EQ(r.code, 1);
  auto j = parse(r.out);
  EXPECT_EQ(j["config"]["tolerances"]["fft"], 0.0);
  EXPECT_EQ(j["summary"]["pass"], false);
}

TEST(Cli, OptionsAfterTheSubcommand) {
  auto r = run_cli("fourier-check --n 64 --extent 10 --tol.fft 1e-3 --seed 9");
  EXPECT_EQ(r.code, 0);
  auto j = parse(r.out);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["config"]["n"], 64);
  EXPECT_EQ(j["config"]["tolerances"]["fft"], 1e-3);
}

TEST(Cli, OutAndCsvFiles) {
  auto out = temp_path("report.json"), csv = temp_path("grid.csv");
  auto r = run_cli("fourier-check --n 64 --extent 10 --out " + out + " --csv " + csv);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(out), g(csv);
  ASSERT_TRUE(f && g);
  Json j;
  f >> j;
  EXPECT_EQ(j["command"], "fourier-check");
  std::string header;
  std::getline(g, header);
  EXPECT_EQ(header, "lambda,function,direction,t1,t2,residual");
  int rows = 0;
  for (std::string line; std::getline(g, line);) ++rows;
  EXPECT_EQ(rows, 10 * 6 * 3);
  std::filesystem::remove(out);
  std::filesystem::remove(csv);
}

TEST(Cli, DeterministicAcrossRunsAndThreadCounts) {
  auto a = run_cli("verify-rep --lambda 1 --seed 4 --grid 8,16", "MOYAL_M3_THREADS=1");
  auto b = run_cli("verify-rep --lambda 1 --seed 4 --grid 8,16", "MOYAL_M3_THREADS=4");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto c = run_cli("verify-rep --lambda 1 --seed 5 --grid 8,16");
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, OrbitSubcommands) {
  auto cls = parse(run_cli("orbit classify --mu 3,4,0").out)["output"];
  EXPECT_EQ(cls["kind"], "sphere");
  EXPECT_EQ(cls["radius"], 5.0);
  EXPECT_EQ(parse(run_cli("orbit classify").out)["output"]["kind"], "trivial-point");
  auto chart = run_cli("orbit chart --s 1,2 --t 0.5,-1 --lambda 2");
  EXPECT_EQ(chart.code, 0);
  auto j = parse(chart.out)["output"];
  EXPECT_EQ(j["kind"], "cotangent-bundle");
  EXPECT_EQ(j["functional"][3], 2.0);
  EXPECT_EQ(run_cli("orbit").code, 2);
}

TEST(Cli, PolarizationWithOneCharacter) {
  auto r = run_cli("verify-polarization --lambda 2 --chi '1/2,1+i'");
  EXPECT_EQ(r.code, 0);
  auto j = parse(r.out);
  EXPECT_EQ(j["config"]["chi"][0][1], "(1+i)");
  EXPECT_EQ(j["checks"].size(), 2u);
}
