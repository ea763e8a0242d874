#include "mm3/suites.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>

using namespace mm3;
using report::Json;

TEST(Tolerances, DefaultsAndOverrides) {
  report::Tolerances t;
  EXPECT_EQ(t.get("symbolic"), 0.0);
  EXPECT_EQ(t.get("fft"), 1e-6);
  EXPECT_EQ(t.get("quadrature"), 1e-8);
  EXPECT_EQ(t.get("fd"), 1e-7);
  EXPECT_EQ(t.get("pointwise"), 1e-10);
  EXPECT_EQ(t.get("bracket"), 1e-9);
  EXPECT_EQ(t.get("parseval"), 1e-10);
  t.set("fft", 1e-3);
  EXPECT_EQ(t.get("fft"), 1e-3);
  EXPECT_THROW(t.get("nope"), std::out_of_range);
  EXPECT_THROW(t.set("nope", 1), std::out_of_range);
  EXPECT_THROW(t.set("fd", -1), std::invalid_argument);
  EXPECT_THROW(t.set("fd", std::nan("")), std::invalid_argument);
}

TEST(Record, VerdictFollowsResidualOnly) {
  report::Record r{"x", "plumbing", 1e-7, "fd", 1e-7, {}};
  EXPECT_TRUE(r.pass());
  r.residual = 1.1e-7;
  EXPECT_FALSE(r.pass());
  r.residual = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(r.pass());
  auto j = r.to_json();
  EXPECT_TRUE(j["residual"].is_null());
  EXPECT_EQ(j["verdict"], "fail");
  r.tolerance = 0;
  r.residual = 0;
  EXPECT_TRUE(r.pass());
}

TEST(Report, SummaryAndDiagnosticsDoNotGate) {
  report::Report rep("demo", 5, {});
  rep.check("a", "plumbing", 0, "symbolic");
  rep.diagnostic("b", "plumbing", 1, "symbolic");
  EXPECT_TRUE(rep.all_pass());
  auto j = rep.to_json();
  EXPECT_EQ(j["schema"], report::kSchema);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["summary"]["failed"], 0);
  EXPECT_EQ(j["diagnostics"][0]["verdict"], "fail");
  EXPECT_EQ(j["config"]["tolerances"]["fft"], 1e-6);
  rep.check("c", "plumbing", 2, "fd");
  EXPECT_FALSE(rep.all_pass());
  EXPECT_EQ(rep.to_json()["summary"]["failed"], 1);
  // stable key order
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"schema", "tool", "version", "command", "seed", "config", "checks",
                                            "diagnostics", "summary"}));
}

TEST(Magnitude, ZeroAndNonzero) {
  EXPECT_EQ(report::magnitude(expr::NormalForm::from_expr(expr::parse("s1 - s1"))), 0.0);
  double m = report::magnitude(expr::NormalForm::from_expr(expr::parse("3*s1^0 + 0*t1")));
  EXPECT_DOUBLE_EQ(m, 3.0);
  double v = report::magnitude(expr::NormalForm::from_expr(expr::parse("s1 + t2")));
  EXPECT_GT(v, 0);
  EXPECT_LE(v, 4.0);
}

TEST(Parallel, SlotsAreIndependentOfThreadCount) {
  const std::size_t n = 103;
  std::vector<double> a(n), b(n);
  parallel::for_each_index(n, [&](std::size_t i) { a[i] = std::sin(double(i)); }, 1);
  parallel::for_each_index(n, [&](std::size_t i) { b[i] = std::sin(double(i)); }, 7);
  EXPECT_EQ(a, b);
  std::atomic<int> count = 0;
  parallel::for_each_index(n, [&](std::size_t) { ++count; }, 4);
  EXPECT_EQ(count, int(n));
  parallel::for_each_index(0, [&](std::size_t) { FAIL(); }, 4);
}

TEST(Parallel, ExceptionsPropagate) {
  EXPECT_THROW(parallel::for_each_index(
                   10, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }, 3),
               std::runtime_error);
}

TEST(Parallel, ThreadCountFromEnvironment) {
  setenv("MOYAL_M3_THREADS", "3", 1);
  EXPECT_EQ(parallel::thread_count(), 3);
  setenv("MOYAL_M3_THREADS", "junk", 1);
  EXPECT_GE(parallel::thread_count(), 1);
  setenv("MOYAL_M3_THREADS", "0", 1);
  EXPECT_GE(parallel::thread_count(), 1);
  unsetenv("MOYAL_M3_THREADS");
}

TEST(Suites, CommutatorOracleAndBivectorChoice) {
  auto x1 = lie::basis(1).to_matrix(), e2 = lie::basis(5).to_matrix();
  auto c = suites::commutator(x1, e2);
  EXPECT_EQ(suites::max_abs(c, lie::bracket(lie::basis(1), lie::basis(5)).to_matrix()), 0.0);
  EXPECT_EQ(suites::max_abs(suites::commutator(x1, x1), orbit::zero_matrix()), 0.0);
  EXPECT_THROW(suites::choose_bivector("axial", 1), std::invalid_argument);
  auto s = suites::choose_bivector("solved", 1);
  EXPECT_EQ(s.info["exact"], false);
  EXPECT_EQ(suites::choose_bivector("kirillov", 2).w[0][3], Rational(-2));
}

TEST(Suites, RandomPolynomialsHaveBoundedDegree) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    auto p = expr::NormalForm::from_expr(suites::random_polynomial(rng, 2));
    auto d = p.degree_in(moyal::detail::chart_set());
    ASSERT_TRUE(d.has_value());
    EXPECT_LE(*d, 2);
  }
}

TEST(Suites, AlgebraReportPasses) {
  report::Report rep("verify-algebra", 1, {});
  suites::run_algebra(rep);
  EXPECT_EQ(rep.checks().size(), 2u);
  EXPECT_TRUE(rep.all_pass());
  EXPECT_EQ(rep.to_json()["output"]["brackets"].size(), 36u);
}
