#include "mm3/polarization.hpp"
#include "mm3/repn.hpp"

#include <gtest/gtest.h>

using namespace mm3;
using namespace mm3::polarization;

namespace {

const std::vector<Rational> kLambdas = {Rational(1, 2), Rational(1), Rational(3)};

moyal::StarConfig polarization_config(const Rational& lam) {
  return moyal::make_config(fit_polarization_bivector(lam).real());
}

}  // namespace

TEST(ETilde, Examples) {
  EXPECT_EQ(expr::print(e_tilde(2, 1)), "t1");
  EXPECT_EQ(expr::print(e_tilde(3, 2)), "4*t2");
  EXPECT_EQ(expr::print(e_tilde(1, Rational(3, 2))), "3/2");
  EXPECT_THROW(e_tilde(4, 1), std::out_of_range);
  EXPECT_THROW(e_tilde(2, 0), std::domain_error);
}

TEST(ETilde, GeneratorsCommuteUnderTheBracket) {
  for (const auto& lam : kLambdas) {
    for (const auto& cfg : {polarization_config(lam), moyal::make_config(orbit::kirillov_matrix(lam).form)})
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
          auto b = moyal::moyal_bracket(NormalForm::from_expr(e_tilde(i, lam)), NormalForm::from_expr(e_tilde(j, lam)), cfg);
          auto v = expr::is_zero(b);
          EXPECT_TRUE(v.zero);
          EXPECT_EQ(v.path_name(), "symbolic");
        }
  }
}

TEST(MakeFChi, Examples) {
  auto f = make_f_chi({0, 0, 1}, Expr(1));
  EXPECT_TRUE(expr::is_zero(f.f - expr::parse("exp(2*i*(s2*t1 + s1*t2))")).zero);

  Character chi{Rational(1, 2), -1, 2};
  auto g = make_f_chi(chi, Expr(1));
  expr::Bindings at{{"s1", 0.7}, {"s2", -1.3}, {"t1", 0.5}, {"t2", -1.0}};
  EXPECT_NEAR(std::abs(expr::evaluate(g.f, at) - cplx(1)), 0, 1e-15);

  // df/ds1 = (2i/lambda)(t2 - chi2) f
  auto psi = expr::parse("1 + t1*t2");
  auto h = make_f_chi(chi, psi);
  auto expect = Expr(GaussianRational(0, 1)) * (expr::var("t2") - Expr(-1)) * h.f;
  EXPECT_TRUE(expr::is_zero(expr::differentiate(h.f, "s1") - expect).zero);

  EXPECT_THROW(make_f_chi(chi, expr::parse("s1*t1")), std::invalid_argument);
}

TEST(OdeResidual, Examples) {
  for (const auto& lam : kLambdas)
    for (const auto& c1 : chi_grid_values())
      for (const auto& c2 : chi_grid_values()) {
        Character chi{c1, c2, lam};
        for (const auto& p : profile_family()) {
          auto f = make_f_chi(chi, expr::parse(p));
          for (auto pairing : {std::pair{1, 2}, std::pair{2, 1}}) {
            auto v = expr::is_zero(ode_residual(f.f, chi, pairing));
            EXPECT_TRUE(v.zero);
            EXPECT_EQ(v.path_name(), "symbolic");
          }
        }
      }
  // constants are not polarized: the residual is -t_i f
  Character zero{0, 0, 1};
  auto r = ode_residual(Expr(3), zero, {1, 2});
  EXPECT_TRUE(expr::is_zero(r + NormalForm::from_expr(expr::parse("3*t1"))).zero);
  EXPECT_THROW(ode_residual(Expr(1), zero, {1, 1}), std::invalid_argument);
}

TEST(OdeResidual, LinearInF) {
  Character chi{1, GaussianRational(0, 1), 2};
  auto a = expr::parse("s1*t2 + exp(s2)"), b = expr::parse("t1^2*s2");
  auto lhs = ode_residual(Expr(3) * a - Expr(Rational(1, 2)) * b, chi, {2, 1});
  auto rhs = ode_residual(a, chi, {2, 1}).scaled(Coefficient(3)) - ode_residual(b, chi, {2, 1}).scaled(Coefficient(Rational(1, 2)));
  EXPECT_TRUE(expr::is_zero(lhs - rhs).zero);
}

TEST(PolarizationBivector, FitIsExactAndDiffersFromTheKirillovForm) {
  for (const auto& lam : kLambdas) {
    auto fit = fit_polarization_bivector(lam);
    EXPECT_TRUE(fit.exact);
    EXPECT_EQ(fit.rank, 5);
    ASSERT_TRUE(fit.is_real());
    auto w = fit.real();
    EXPECT_EQ(w[1][2], -lam);  // (s2, t1)
    EXPECT_EQ(w[0][3], -lam);  // (s1, t2)
    EXPECT_EQ(w[0][2], 0);
    EXPECT_EQ(w[1][3], 0);
    EXPECT_EQ(w[2][3], 0);
    EXPECT_EQ(fit.free_unknowns, std::vector<std::string>{"w12"});
    EXPECT_TRUE(orbit::is_antisymmetric(w));
    auto k = orbit::kirillov_matrix(lam).form;
    EXPECT_EQ(k[0][3], w[0][3]);
    EXPECT_EQ(k[1][2], -w[1][2]);
  }
}

TEST(EigenCheck, PolarizedFamilyIsAnEigenspace) {
  for (const auto& lam : kLambdas) {
    auto cfg = polarization_config(lam);
    for (const auto& c1 : chi_grid_values())
      for (const auto& c2 : chi_grid_values()) {
        Character chi{c1, c2, lam};
        for (const auto& p : profile_family()) {
          auto f = make_f_chi(chi, expr::parse(p));
          for (int i = 1; i <= 3; ++i) {
            auto r = eigen_check(f.f, i, chi, cfg);
            EXPECT_TRUE(r.verdict.zero) << "i=" << i << " psi=" << p;
            EXPECT_EQ(r.verdict.path_name(), "symbolic");
          }
          // the eigen residual is -lambda^2 times the ODE residual
          auto e2 = eigen_check(f.f, 2, chi, cfg).value;
          EXPECT_TRUE(expr::is_zero(e2 + ode_residual(f.f, chi, {1, 2}).scaled(Coefficient(lam * lam))).zero);
        }
      }
  }
}

TEST(EigenCheck, ComplexCharacter) {
  Character chi{GaussianRational(1, 1), GaussianRational(0, -2), 1};
  auto cfg = polarization_config(1);
  auto f = make_f_chi(chi, expr::parse("t1 - t2^2"));
  for (int i = 1; i <= 3; ++i) EXPECT_TRUE(eigen_check(f.f, i, chi, cfg).verdict.zero);
}

TEST(EigenCheck, LinearityAndNonPolarizedInput) {
  auto cfg = polarization_config(1);
  Character chi{1, -1, 1};
  auto f = make_f_chi(chi, expr::parse("t1"));
  auto a = eigen_check(f.f, 2, chi, cfg).value;
  auto b = eigen_check(Expr(5) * f.f, 2, chi, cfg).value;
  EXPECT_TRUE(expr::is_zero(b - a.scaled(Coefficient(5))).zero);

  auto r = eigen_check(expr::parse("s1*(1 + t1)"), 3, chi, cfg);
  EXPECT_FALSE(r.verdict.zero);
}

TEST(EigenCheck, KirillovFormPolarizesOnlyOneDirection) {
  auto cfg = moyal::make_config(orbit::kirillov_matrix(1).form);
  Character chi{Rational(1, 2), 2, 1};
  auto f = make_f_chi(chi, expr::parse("1 + t2"));
  EXPECT_FALSE(eigen_check(f.f, 2, chi, cfg).verdict.zero);
  EXPECT_TRUE(eigen_check(f.f, 3, chi, cfg).verdict.zero);
}

// l_U keeps the phase of f_chi for the translations.
TEST(Stability, TranslationsKeepThePhase) {
  for (const auto& lam : kLambdas) {
    auto cfg = polarization_config(lam);
    Character chi{2, Rational(1, 2), lam};
    auto f = make_f_chi(chi, expr::parse("t1*t2 + 1"));
    for (int k = 4; k <= 6; ++k) {
      auto out = repn::l_left(lie::basis(k), f.f, lam, cfg);
      EXPECT_TRUE(keeps_phase(out, f.phase)) << k;
    }
    EXPECT_FALSE(keeps_phase(NormalForm::from_expr(expr::parse("s1") * f.f), f.phase));
  }
}

TEST(Superposition, BoxDemo) {
  for (double lam : {0.5, 1.0, 3.0}) {
    auto r = superposition_demo(lam, 1.5);
    EXPECT_LT(r.max_error, 1e-8);
    EXPECT_LE(r.norm2_window, r.norm2_exact + 1e-9);
    EXPECT_LE(r.norm2_exact - r.norm2_window, r.tail_bound);
  }
}
