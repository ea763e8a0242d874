#pragma once

#include "mm3/moyal.hpp"
#include "mm3/sphere.hpp"

namespace mm3::polarization {

using expr::Expr;
using expr::NormalForm;

struct Character {
  GaussianRational chi1, chi2;
  Rational lambda = 1;
};

/// E~_1 = lambda, E~_2 = lambda^2 t1, E~_3 = lambda^2 t2 (the e_i factor removed).
inline Expr e_tilde(int i, const Rational& lambda) {
  orbit::detail::require_positive(lambda);
  switch (i) {
    case 1:
      return Expr(lambda);
    case 2:
      return Expr(lambda * lambda) * expr::var("t1");
    case 3:
      return Expr(lambda * lambda) * expr::var("t2");
  }
  throw std::out_of_range("subalgebra index must be 1..3");
}

/// chi(E~_1) = lambda, chi(E~_2) = lambda^2 chi1, chi(E~_3) = lambda^2 chi2.
inline GaussianRational character_value(int i, const Character& chi) {
  Rational l2 = chi.lambda * chi.lambda;
  switch (i) {
    case 1:
      return chi.lambda;
    case 2:
      return GaussianRational(l2) * chi.chi1;
    case 3:
      return GaussianRational(l2) * chi.chi2;
  }
  throw std::out_of_range("subalgebra index must be 1..3");
}

struct PolarizedFunction {
  Expr f;      // phase times profile
  Expr phase;  // the exponent's argument, linear in s
  Expr psi;    // profile in t1, t2
};

/// exp(2i [s2 (t1 - chi1) + s1 (t2 - chi2)] / lambda) psi(t).
inline PolarizedFunction make_f_chi(const Character& chi, const Expr& psi) {
  orbit::detail::require_positive(chi.lambda);
  for (const auto& v : expr::variables(psi))
    if (v != "t1" && v != "t2") throw std::invalid_argument("profile may depend only on t1, t2 (found " + v + ")");
  Expr s1 = expr::var("s1"), s2 = expr::var("s2"), t1 = expr::var("t1"), t2 = expr::var("t2");
  Expr arg = Expr(GaussianRational(0, Rational(2) / chi.lambda)) *
             (s2 * (t1 - Expr(chi.chi1)) + s1 * (t2 - Expr(chi.chi2)));
  return {expr::exp(arg) * psi, arg, psi};
}

/// (lambda/2i) df/ds_j - (t_i - chi_i) f for the pairings (1,2) and (2,1).
inline NormalForm ode_residual(const NormalForm& f, const Character& chi, std::pair<int, int> pairing) {
  auto [i, j] = pairing;
  if (!((i == 1 && j == 2) || (i == 2 && j == 1)))
    throw std::invalid_argument("pairing must be (1,2) or (2,1)");
  const std::string s = j == 1 ? "s1" : "s2", t = i == 1 ? "t1" : "t2";
  const GaussianRational& c = i == 1 ? chi.chi1 : chi.chi2;
  Coefficient k = Coefficient(chi.lambda) / Coefficient(GaussianRational(0, 2));
  return f.derivative(s).scaled(k) - (NormalForm::variable(t) - NormalForm::constant(Coefficient(c))) * f;
}

inline NormalForm ode_residual(const Expr& f, const Character& chi, std::pair<int, int> pairing) {
  return ode_residual(NormalForm::from_expr(f), chi, pairing);
}

/// Fits the bivector under which f * E~_i - chi(E~_i) f = -lambda^2 (ODE residual)
/// for the pairings of i = 2, 3 on a generic symbolic f.
inline moyal::BivectorFit fit_polarization_bivector(const Rational& lambda) {
  orbit::detail::require_positive(lambda);
  // a generic f enters only through its first partials
  std::array<NormalForm, 4> df;
  for (int k = 0; k < 4; ++k) df[k] = NormalForm::from_expr(expr::var("__d" + orbit::kChartVars[k]));
  return moyal::fit_bivector([&](const moyal::Bivector& w) {
    std::vector<NormalForm> res;
    Coefficient nu(moyal::StarConfig{}.nu());
    Rational l2 = lambda * lambda;
    for (int i : {2, 3}) {
      // f * (lambda^2 t_k) = lambda^2 t_k f + nu lambda^2 sum_a W[a][t_k] d_a f
      int col = i == 2 ? 2 : 3;
      NormalForm p1;
      for (int a = 0; a < 4; ++a) p1 = p1 + w[a][col] * df[a];
      NormalForm lhs = p1.scaled(nu * Coefficient(l2));
      // target: -lambda^2 (lambda/2i) d_{s_j} f with the (i-1, j) pairing
      int s_index = i == 2 ? 1 : 0;
      NormalForm rhs = df[s_index].scaled(Coefficient(-l2) * Coefficient(lambda) / Coefficient(GaussianRational(0, 2)));
      res.push_back(lhs - rhs);
    }
    return res;
  });
}

/// f * E~_i - chi(E~_i) f.
inline moyal::Residual eigen_check(const Expr& f, int i, const Character& chi, const moyal::StarConfig& cfg) {
  auto a = NormalForm::from_expr(e_tilde(i, chi.lambda));
  auto prod = moyal::star(NormalForm::from_expr(f), a, cfg);
  if (!prod.exact) throw std::logic_error("star with a linear factor must terminate");
  return moyal::make_residual(prod.value - NormalForm::from_expr(f).scaled(Coefficient(character_value(i, chi))));
}

/// True when f exp(-phase) does not depend on s1, s2.
inline bool keeps_phase(const NormalForm& f, const Expr& phase) {
  auto q = f * NormalForm::from_expr(expr::exp(-phase));
  return !q.depends_on("s1") && !q.depends_on("s2");
}

/// Profiles of degree at most 2.
inline std::vector<std::string> profile_family() { return {"1", "t1", "t2", "t1^2", "t1*t2", "1 + t1 - 2*t2^2"}; }

/// chi values for the 3 x 3 grid.
inline std::vector<Rational> chi_grid_values() { return {Rational(-2), Rational(1, 2), Rational(2)}; }

// ---------------------------------------------------------------------------
// Superposition over a chi box

struct SuperpositionResult {
  double max_error = 0;       // chi quadrature against the closed form, over sample s values
  double norm2_window = 0;    // integral of |F|^2 over [-S, S]
  double norm2_exact = 0;     // 2 pi lambda B
  double tail_bound = 0;      // 2 lambda^2 / S
};

/// With psi = 1 each factor of the integral over chi in [-B, B] is
/// int exp(-2i s chi / lambda) d chi = lambda sin(2 B s / lambda) / s, whose
/// squared L2 norm over the line is 2 pi lambda B.
inline SuperpositionResult superposition_demo(double lambda, double box, int nodes = 64, double window = 200.0) {
  orbit::detail::require_positive(lambda);
  std::vector<double> x, w;
  sphere::gauss_legendre(nodes, x, w);
  auto closed = [&](double s) { return s == 0 ? 2 * box : lambda * std::sin(2 * box * s / lambda) / s; };
  SuperpositionResult out;
  for (double s : {-2.0, -0.7, 0.0, 0.3, 1.1, 2.5}) {
    cplx q = 0;
    for (int k = 0; k < nodes; ++k) q += w[k] * box * std::exp(cplx(0, -2 * s * box * x[k] / lambda));
    out.max_error = std::max(out.max_error, std::abs(q - closed(s)));
  }
  // |F|^2 over the window by composite Gauss-Legendre panels
  const int panels = 4000;
  double h = 2 * window / panels, acc = 0;
  std::vector<double> px, pw;
  sphere::gauss_legendre(8, px, pw);
  for (int p = 0; p < panels; ++p) {
    double mid = -window + (p + 0.5) * h;
    for (int k = 0; k < 8; ++k) {
      double v = closed(mid + 0.5 * h * px[k]);
      acc += 0.5 * h * pw[k] * v * v;
    }
  }
  out.norm2_window = acc;
  out.norm2_exact = 2 * M_PI * lambda * box;
  out.tail_bound = 2 * lambda * lambda / window;
  return out;
}

}  // namespace mm3::polarization
