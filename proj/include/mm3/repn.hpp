#pragma once

#include "mm3/fourier.hpp"
#include "mm3/moyal.hpp"
#include "mm3/sphere.hpp"

#include <random>

namespace mm3::repn {

using expr::Expr;
using expr::NormalForm;
using lie::AlgebraElement;
using lie::GroupElement;
using sphere::Operator;
using sphere::QuadratureGrid;
using sphere::SphereFunction;

// ---------------------------------------------------------------------------
// Left star-operators on the chart

/// (1/2nu) U~ * f. Exact: the energy is linear.
inline NormalForm l_left(const AlgebraElement& u, const NormalForm& f, const Rational& lambda,
                         const moyal::StarConfig& cfg,
                         orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  auto e = NormalForm::from_expr(orbit::energy(u, lambda, conv));
  auto s = moyal::star(e, f, cfg);
  return s.value.scaled(Coefficient(1) / (Coefficient(2) * Coefficient(cfg.nu())));
}

inline NormalForm l_left(const AlgebraElement& u, const Expr& f, const Rational& lambda, const moyal::StarConfig& cfg,
                         orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  return l_left(u, NormalForm::from_expr(f), lambda, cfg, conv);
}

/// l_[U,T] f - (l_U l_T - l_T l_U) f.
inline NormalForm commutator_residual(const AlgebraElement& u, const AlgebraElement& t, const NormalForm& f,
                                      const Rational& lambda, const moyal::StarConfig& cfg,
                                      orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  auto ut = l_left(u, l_left(t, f, lambda, cfg, conv), lambda, cfg, conv);
  auto tu = l_left(t, l_left(u, f, lambda, cfg, conv), lambda, cfg, conv);
  return l_left(lie::bracket(u, t), f, lambda, cfg, conv) - (ut - tu);
}

// ---------------------------------------------------------------------------
// The conjugated operator on (eta, t)

inline const std::vector<std::string> kFiberVars = {"eta1", "eta2", "t1", "t2"};

/// m f + sum_k c_k d f / d(kFiberVars[k]).
struct PhaseOperator {
  Expr multiplier;
  std::array<Expr, 4> derivative;

  Expr apply(const Expr& f) const {
    std::vector<Expr> terms{multiplier * f};
    for (int k = 0; k < 4; ++k)
      if (!derivative[k].is_zero()) terms.push_back(derivative[k] * expr::differentiate(f, kFiberVars[k]));
    return expr::simplify(expr::sum(terms));
  }
  bool is_zero() const {
    if (!multiplier.is_zero()) return false;
    for (const auto& d : derivative)
      if (!d.is_zero()) return false;
    return true;
  }
};

/// u = lambda t1 - lambda^2/2 eta2.
inline Expr u_coordinate(const Rational& lambda) {
  return Expr(lambda) * expr::var("t1") - Expr(lambda * lambda / 2) * expr::var("eta2");
}
/// v = lambda t2 + lambda^2/2 eta1.
inline Expr v_coordinate(const Rational& lambda) {
  return Expr(lambda) * expr::var("t2") + Expr(lambda * lambda / 2) * expr::var("eta1");
}

/// i lambda (e1 + e2 u + e3 v) - (x2 d/dv - x3 d/du), written back in (eta, t).
/// The coordinates completing (u, v) are lambda t1 + lambda^2/2 eta2 and
/// lambda t2 - lambda^2/2 eta1, so d/du = (1/2lambda) d/dt1 - (1/lambda^2) d/deta2
/// and d/dv = (1/2lambda) d/dt2 + (1/lambda^2) d/deta1.
inline PhaseOperator lhat_formula(const AlgebraElement& u, const Rational& lambda) {
  orbit::detail::require_positive(lambda);
  PhaseOperator op;
  Expr i(Coefficient::i());
  op.multiplier = expr::simplify(i * Expr(lambda) *
                                 (Expr(u.e(1)) + Expr(u.e(2)) * u_coordinate(lambda) + Expr(u.e(3)) * v_coordinate(lambda)));
  Rational l2 = lambda * lambda;
  op.derivative[0] = Expr(Rational(-u.x(2) / l2));
  op.derivative[1] = Expr(Rational(-u.x(3) / l2));
  op.derivative[2] = Expr(Rational(u.x(3) / (2 * lambda)));
  op.derivative[3] = Expr(Rational(-u.x(2) / (2 * lambda)));
  return op;
}

struct ConjugationResult {
  double residual = 0;             // worst relative L2 residual over the t points
  std::vector<double> per_point;   // one per t point
  double boundary_ratio = 0;       // decay of the test function on the eta grid
};

/// Default t points for the conjugation check.
inline std::vector<std::array<double, 2>> default_t_points() { return {{0.0, 0.0}, {0.3, -0.5}, {-0.7, 0.2}}; }

/// Compares lhat_formula(U) f with F o l_U o F^-1 f on the eta grid at fixed t, for
/// every U in `us`. The formula path applies the symbolic operator; the FFT path
/// multiplies by the energy in s-space and differentiates spectrally. `w` is the
/// bivector of the star product.
inline std::vector<ConjugationResult> conjugation_checks(
    const std::vector<AlgebraElement>& us, const Rational& lambda, const Expr& f, const fourier::FourierGrid& grid,
    const orbit::Matrix4Q& w, const std::vector<std::array<double, 2>>& t_points = default_t_points(),
    orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  for (const auto& v : expr::variables(f))
    if (std::find(kFiberVars.begin(), kFiberVars.end(), v) == kFiberVars.end())
      throw std::invalid_argument("test function may depend only on eta1, eta2, t1, t2");
  orbit::detail::require_positive(lambda);
  const int n = grid.n;
  const std::size_t size = grid.size();

  struct Direction {
    expr::Compiled multiplier;
    std::array<double, 4> dcoeff;  // formula derivative coefficients
    std::array<double, 4> grad;    // energy gradient
    double c0;
  };
  std::vector<Direction> dirs;
  for (const auto& u : us) {
    auto op = lhat_formula(u, lambda);
    Direction d{expr::compile(op.multiplier, kFiberVars), {}, {}, to_double(orbit::energy_constant(u, lambda))};
    for (int k = 0; k < 4; ++k) d.dcoeff[k] = op.derivative[k].constant().to_complex().real();
    auto grad = orbit::energy_gradient(u, lambda, conv);
    for (int k = 0; k < 4; ++k) d.grad[k] = to_double(grad[k]);
    dirs.push_back(std::move(d));
  }
  std::array<std::array<double, 4>, 4> wd;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) wd[i][j] = to_double(w[i][j]);

  auto fc = expr::compile(f, kFiberVars);
  std::array<expr::Compiled, 4> df;
  for (int k = 0; k < 4; ++k) df[k] = expr::compile(expr::differentiate(f, kFiberVars[k]), kFiberVars);
  // 1/(2 nu) = i with hbar = 1
  const cplx inv2nu(0, 1);

  std::vector<ConjugationResult> out(us.size());
  for (const auto& [t1, t2] : t_points) {
    auto at = [&](const expr::Compiled& c) {
      return grid.sample_eta([&](double e1, double e2) {
        std::array<double, 4> x{e1, e2, t1, t2};
        return c(x);
      });
    };
    auto fe = at(fc);
    double ratio = fourier::boundary_ratio(fe, n);
    std::array<fourier::Samples, 4> fd;
    for (int k = 0; k < 4; ++k) fd[k] = at(df[k]);

    // s-space: g = F^-1 f and its first derivatives
    auto g = fourier::inverse(fe, grid);
    std::array<fourier::Samples, 4> dg;
    dg[0] = fourier::spectral_derivative(g, grid, 0);
    dg[1] = fourier::spectral_derivative(g, grid, 1);
    dg[2] = fourier::inverse(fd[2], grid, false);
    dg[3] = fourier::inverse(fd[3], grid, false);

    double den = 0;
    for (const auto& v : fe) den += std::norm(v);

    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const auto& dir = dirs[d];
      fourier::Samples lg(size);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          std::size_t k = static_cast<std::size_t>(p) * n + q;
          double energy = dir.grad[0] * grid.s(p) + dir.grad[1] * grid.s(q) + dir.grad[2] * t1 + dir.grad[3] * t2 + dir.c0;
          cplx p1 = 0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              if (wd[i][j] != 0 && dir.grad[i] != 0) p1 += wd[i][j] * dir.grad[i] * dg[j][k];
          // (1/2nu)(U g + nu P1) = U g/(2 nu) + P1/2
          lg[k] = inv2nu * energy * g[k] + 0.5 * p1;
        }
      auto b = fourier::forward(lg, grid, false);
      double num = 0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          std::size_t k = static_cast<std::size_t>(p) * n + q;
          std::array<double, 4> x{grid.eta(p), grid.eta(q), t1, t2};
          cplx a = dir.multiplier(x) * fe[k];
          for (int j = 0; j < 4; ++j)
            if (dir.dcoeff[j] != 0) a += dir.dcoeff[j] * fd[j][k];
          num += std::norm(a - b[k]);
        }
      double r = den == 0 ? 0.0 : std::sqrt(num / den);
      out[d].per_point.push_back(r);
      out[d].residual = std::max(out[d].residual, r);
      out[d].boundary_ratio = std::max(out[d].boundary_ratio, ratio);
    }
  }
  return out;
}

inline ConjugationResult conjugation_check(const AlgebraElement& u, const Rational& lambda, const Expr& f,
                                           const fourier::FourierGrid& grid, const orbit::Matrix4Q& w,
                                           const std::vector<std::array<double, 2>>& t_points = default_t_points(),
                                           orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  return conjugation_checks({u}, lambda, f, grid, w, t_points, conv).front();
}

/// Gaussian times polynomial test functions on (eta, t).
inline std::vector<std::string> conjugation_test_functions() {
  const std::string g = "exp(-(eta1^2 + eta2^2 + t1^2 + t2^2)/2)";
  return {g,
          g + "*eta1",
          g + "*eta2",
          g + "*t1",
          g + "*(eta1*eta2 - t2)",
          g + "*(1 + eta1^2)",
          g + "*(2*eta2^2 - t1*t2)",
          g + "*(eta1 - 3*eta2 + t1^2)",
          "exp(-(eta1^2 + 2*eta2^2)/2 - (t1^2 + t2^2)/4)*(1 + t1*eta2)",
          "exp(-((eta1 - 1/2)^2 + eta2^2 + t1^2 + t2^2)/2)*eta2*t2"};
}

// ---------------------------------------------------------------------------
// Operators on the sphere

/// E_i: multiplication by i lambda sigma_i. X_j: the rotation-flow derivative.
inline Operator generator(int index, const Rational& lambda) {
  orbit::detail::require_positive(lambda);
  if (index < 1 || index > 6) throw std::out_of_range("basis index must be in 1..6");
  if (index <= 3) return Operator({sphere::FlowDerivative{index}});
  return Operator({sphere::Multiply{Expr(GaussianRational(0, lambda)) * sphere::sigma(index - 3)}});
}

/// sum_k u_k generator(k) f.
inline SphereFunction generator_apply(const AlgebraElement& u, const Rational& lambda, const SphereFunction& f) {
  std::vector<std::pair<cplx, SphereFunction>> terms;
  std::vector<std::pair<Coefficient, SphereFunction>> exact;
  for (int k = 1; k <= 6; ++k) {
    if (u.c[k - 1] == 0) continue;
    auto g = generator(k, lambda).apply(f);
    terms.push_back({to_double(u.c[k - 1]), g});
    exact.push_back({Coefficient(u.c[k - 1]), g});
  }
  if (terms.empty()) return f.symbolic() ? SphereFunction(Expr(0)) : SphereFunction::black_box([](const auto&) { return cplx(0); });
  return f.symbolic() ? sphere::combine_exact(exact) : sphere::combine(terms);
}

/// exp(i lambda r.sigma).
inline Expr translation_phase(const Eigen::Vector3d& r, double lambda) {
  std::vector<Expr> parts;
  for (int k = 0; k < 3; ++k)
    if (r[k] != 0) parts.push_back(Expr(Coefficient(cplx(0, lambda * r[k]))) * sphere::sigma(k + 1));
  return expr::exp(expr::sum(parts));
}

/// exp(r.E-generators) exp(th1 X1) exp(th2 X2) exp(th3 X3) acting as
/// multiplication by exp(i lambda r.sigma) after the pullbacks by exp(-th_j X_j).
inline Operator unitary(const lie::Factors& f, double lambda) {
  orbit::detail::require_positive(lambda);
  return Operator({sphere::Multiply{translation_phase(f.r, lambda)},
                   sphere::Pullback{lie::rotation(1, -f.theta1)}, sphere::Pullback{lie::rotation(2, -f.theta2)},
                   sphere::Pullback{lie::rotation(3, -f.theta3)}});
}

inline Operator unitary(const GroupElement& g, double lambda) { return unitary(lie::factorize(g), lambda); }

/// (U f)(sigma) = exp(i lambda r.sigma) f(R^-1 sigma), straight from the group element.
inline SphereFunction reference_unitary(const GroupElement& g, double lambda, const SphereFunction& f) {
  orbit::detail::require_positive(lambda);
  Eigen::Matrix3d rinv = g.R.transpose();
  Eigen::Vector3d r = g.r;
  return SphereFunction::black_box([=](const sphere::Point& p) {
    return std::exp(cplx(0, lambda * r.dot(p))) * f(rinv * p);
  });
}

// ---------------------------------------------------------------------------
// Checks

/// A factored group element with r in [-1,1]^3, th1, th3 in [-pi, pi), |th2| < pi/2.
inline GroupElement random_group_element(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1, 1);
  Eigen::Vector3d r(unit(rng), unit(rng), unit(rng));
  double a = M_PI * unit(rng), b = 0.49 * M_PI * unit(rng), c = M_PI * unit(rng);
  return lie::from_factors(r, a, b, c);
}

/// sup over nodes of |unitary(g) f - reference_unitary(g) f|.
inline double reference_residual(const GroupElement& g, double lambda, const SphereFunction& f,
                                 const QuadratureGrid& grid) {
  return sphere::sup_distance(unitary(g, lambda).apply(f), reference_unitary(g, lambda, f), grid);
}

/// sup over nodes of |U_g U_h f - U_gh f|.
inline double homomorphism_residual(const GroupElement& g, const GroupElement& h, double lambda,
                                    const SphereFunction& f, const QuadratureGrid& grid) {
  auto lhs = unitary(g, lambda).apply(unitary(h, lambda).apply(f));
  auto rhs = unitary(lie::mul(g, h), lambda).apply(f);
  return sphere::sup_distance(lhs, rhs, grid);
}

struct UnitarityResult {
  double deviation = 0;
  int n_theta = 0, n_phi = 0;  // final grid
  int refinements = 0;
  bool converged = false;
};

inline constexpr double kRefineThreshold = 1e-10;
inline constexpr int kMaxRefinements = 4;

/// |<U_g f, U_g h> - <f, h>|, starting from the node heuristic and doubling the grid
/// until both inner products move by less than kRefineThreshold.
inline UnitarityResult unitarity_check(const GroupElement& g, double lambda, const SphereFunction& f,
                                       const SphereFunction& h, std::optional<QuadratureGrid> start = std::nullopt) {
  QuadratureGrid grid = start ? *start : QuadratureGrid::for_phase(lambda, g.r.norm());
  auto op = unitary(g, lambda);
  auto uf = op.apply(f), uh = op.apply(h);
  cplx a = sphere::inner(uf, uh, grid), b = sphere::inner(f, h, grid);
  UnitarityResult out;
  for (int k = 0; k < kMaxRefinements; ++k) {
    QuadratureGrid next = grid.refined();
    cplx a2 = sphere::inner(uf, uh, next), b2 = sphere::inner(f, h, next);
    bool settled = std::abs(a2 - a) < kRefineThreshold && std::abs(b2 - b) < kRefineThreshold;
    if (settled) {
      out.converged = true;
      break;
    }
    grid = next;
    a = a2;
    b = b2;
    ++out.refinements;
  }
  out.deviation = std::abs(a - b);
  out.n_theta = grid.n_theta;
  out.n_phi = grid.n_phi;
  return out;
}

inline constexpr double kInfinitesimalStep = 1e-4;

/// sup over nodes of |(U_exp(tU) f - U_exp(-tU) f)/2t - generator(U) f|.
inline double infinitesimal_residual(const AlgebraElement& u, const Rational& lambda, const SphereFunction& f,
                                     const QuadratureGrid& grid, double t = kInfinitesimalStep) {
  double lam = to_double(lambda);
  auto plus = unitary(lie::exp_algebra(u, t), lam).apply(f);
  auto minus = unitary(lie::exp_algebra(u, -t), lam).apply(f);
  auto gen = generator_apply(u, lambda, f);
  double m = 0;
  for (const auto& p : grid.nodes) m = std::max(m, std::abs((plus(p) - minus(p)) / (2 * t) - gen(p)));
  return m;
}

/// The same with X_j read as i d/ds_j, the other reading of the momentum operators.
inline double infinitesimal_residual_i_convention(const AlgebraElement& u, const Rational& lambda,
                                                  const SphereFunction& f, const QuadratureGrid& grid,
                                                  double t = kInfinitesimalStep) {
  double lam = to_double(lambda);
  auto plus = unitary(lie::exp_algebra(u, t), lam).apply(f);
  auto minus = unitary(lie::exp_algebra(u, -t), lam).apply(f);
  AlgebraElement rot = u, trans = u;
  for (int k = 0; k < 3; ++k) {
    trans.c[k] = 0;
    rot.c[k + 3] = 0;
  }
  auto e_part = generator_apply(trans, lambda, f);
  auto x_part = generator_apply(rot, lambda, f);
  double m = 0;
  for (const auto& p : grid.nodes)
    m = std::max(m, std::abs((plus(p) - minus(p)) / (2 * t) - (e_part(p) - cplx(0, 1) * x_part(p))));
  return m;
}

/// Cauchy problem: d/dt U_exp(tU) f = generator(U) U_exp(tU) f at the given times.
inline double cauchy_residual(const AlgebraElement& u, const Rational& lambda, const SphereFunction& f,
                              const QuadratureGrid& grid, const std::vector<double>& times = {0.2, 0.4, 0.6, 0.8, 1.0},
                              double step = kInfinitesimalStep) {
  double lam = to_double(lambda);
  double m = 0;
  for (double t : times) {
    auto at = [&](double s) { return unitary(lie::exp_algebra(u, s), lam).apply(f); };
    auto tt = at(t), plus = at(t + step), minus = at(t - step);
    auto rhs = generator_apply(u, lambda, tt);
    for (const auto& p : grid.nodes) m = std::max(m, std::abs((plus(p) - minus(p)) / (2 * step) - rhs(p)));
  }
  return m;
}

struct BracketResult {
  expr::ZeroVerdict verdict;  // symbolic verdict on the residual expression
  double sup = 0;             // its sup over grid nodes
};

/// [gen(U), gen(T)] f - gen([U,T]) f for symbolic f.
inline BracketResult generator_bracket_residual(const AlgebraElement& u, const AlgebraElement& t,
                                                const Rational& lambda, const SphereFunction& f,
                                                const QuadratureGrid& grid) {
  if (!f.symbolic()) throw std::invalid_argument("bracket residual needs a symbolic function");
  auto ut = generator_apply(u, lambda, generator_apply(t, lambda, f));
  auto tu = generator_apply(t, lambda, generator_apply(u, lambda, f));
  auto b = generator_apply(lie::bracket(u, t), lambda, f);
  Expr r = ut.expression() - tu.expression() - b.expression();
  BracketResult out;
  out.verdict = expr::is_zero(r);
  SphereFunction rf(r);
  for (const auto& p : grid.nodes) out.sup = std::max(out.sup, std::abs(rf(p)));
  return out;
}

}  // namespace mm3::repn
