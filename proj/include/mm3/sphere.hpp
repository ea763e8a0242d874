#pragma once

#include "mm3/expr.hpp"
#include "mm3/lie.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <variant>

namespace mm3::sphere {

using expr::Expr;
using Point = Eigen::Vector3d;

/// Sphere coordinates as expression variables.
inline const std::vector<std::string> kSphereVars = {"sigma1", "sigma2", "sigma3"};

inline Expr sigma(int i) { return expr::var(kSphereVars.at(i - 1)); }

// ---------------------------------------------------------------------------
// Quadrature

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  // P_n(z) and P_n'(z) by the three-term recurrence
  auto legendre = [n](double z, double& p, double& dp) {
    double p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = n * (z * p1 - p0) / (z * z - 1);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), p = 0, dp = 1;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(z, p, dp);
      double step = p / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    legendre(z, p, dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
}

/// Gauss-Legendre in cos(colatitude) times uniform longitude, on the sphere of radius `radius`.
struct QuadratureGrid {
  int n_theta = 0, n_phi = 0;
  double radius = 1.0;
  std::vector<Point> nodes;
  std::vector<double> weights;

  QuadratureGrid() = default;
  QuadratureGrid(int nt, int np, double r = 1.0) : n_theta(nt), n_phi(np), radius(r) {
    if (nt < 1 || np < 1) throw std::invalid_argument("quadrature grid needs positive counts");
    if (!(r > 0)) throw std::domain_error("sphere radius must be positive");
    std::vector<double> x, w;
    gauss_legendre(nt, x, w);
    for (int i = 0; i < nt; ++i) {
      double st = std::sqrt(std::max(0.0, 1 - x[i] * x[i]));
      for (int j = 0; j < np; ++j) {
        double phi = 2 * M_PI * (j + 0.5) / np;
        nodes.emplace_back(r * st * std::cos(phi), r * st * std::sin(phi), r * x[i]);
        weights.push_back(w[i] * 2 * M_PI / np * r * r);
      }
    }
  }

  /// Node heuristic for integrands carrying e^{i lambda r.sigma}.
  static QuadratureGrid for_phase(double lambda, double r_norm) {
    int nt = 24 + 4 * static_cast<int>(std::ceil(lambda * r_norm));
    return QuadratureGrid(nt, 2 * nt);
  }

  QuadratureGrid refined() const { return QuadratureGrid(2 * n_theta, 2 * n_phi, radius); }

  double total_weight() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Functions on the sphere

/// Either an expression in sigma1..3 or an opaque evaluator.
class SphereFunction {
 public:
  using Fn = std::function<cplx(const Point&)>;

  SphereFunction() : SphereFunction(Expr(0)) {}
  SphereFunction(const Expr& e) : expr_(e) {
    auto c = std::make_shared<expr::Compiled>(e, kSphereVars);
    fn_ = [c](const Point& p) { return (*c)(std::span<const double>(p.data(), 3)); };
  }
  static SphereFunction black_box(Fn fn) {
    SphereFunction f;
    f.expr_.reset();
    f.fn_ = std::move(fn);
    return f;
  }
  static SphereFunction parse(std::string_view text) { return SphereFunction(expr::parse(text)); }

  bool symbolic() const { return expr_.has_value(); }
  const Expr& expression() const { return expr_.value(); }
  cplx operator()(const Point& p) const { return fn_(p); }

 private:
  std::optional<Expr> expr_;
  Fn fn_;
};

/// The test set {1, sigma1, sigma2, sigma3, sigma1 sigma2}.
inline std::vector<SphereFunction> test_set() {
  return {SphereFunction(Expr(1)), SphereFunction(sigma(1)), SphereFunction(sigma(2)), SphereFunction(sigma(3)),
          SphereFunction(sigma(1) * sigma(2))};
}

inline std::vector<std::string> test_set_names() { return {"1", "sigma1", "sigma2", "sigma3", "sigma1*sigma2"}; }

/// sum c_k f_k, symbolic when every f_k is.
inline SphereFunction combine(const std::vector<std::pair<cplx, SphereFunction>>& terms) {
  bool symbolic = true;
  for (const auto& [c, f] : terms) symbolic = symbolic && f.symbolic();
  if (symbolic) {
    std::vector<Expr> parts;
    for (const auto& [c, f] : terms) parts.push_back(Expr(Coefficient(c)) * f.expression());
    return SphereFunction(expr::sum(parts));
  }
  return SphereFunction::black_box([terms](const Point& p) {
    cplx s = 0;
    for (const auto& [c, f] : terms) s += c * f(p);
    return s;
  });
}

/// Exact-coefficient variant of combine for symbolic inputs.
inline SphereFunction combine_exact(const std::vector<std::pair<Coefficient, SphereFunction>>& terms) {
  std::vector<Expr> parts;
  for (const auto& [c, f] : terms) parts.push_back(Expr(c) * f.expression());
  return SphereFunction(expr::sum(parts));
}

// ---------------------------------------------------------------------------
// Operators

/// (M f)(sigma) = m(sigma) f(sigma).
struct Multiply {
  Expr m;
};
/// (P f)(sigma) = f(A sigma).
struct Pullback {
  Eigen::Matrix3d A;
};
/// (D f)(sigma) = d/dth f(exp(-th X_j) sigma) at th = 0.
struct FlowDerivative {
  int axis;
};
struct Scale {
  Coefficient c;
};

using Primitive = std::variant<Multiply, Pullback, FlowDerivative, Scale>;

/// Step for the central-difference flow derivative of opaque functions.
inline constexpr double kFlowStep = 1e-5;

/// Rotation block of X_j acting on sigma.
inline Eigen::Matrix3d generator_matrix(int axis) {
  if (axis < 1 || axis > 3) throw std::out_of_range("rotation axis must be 1..3");
  auto m = lie::basis(axis).to_matrix();
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = to_double(m[i][j]);
  return out;
}

namespace detail {

inline std::array<Rational, 3> generator_matrix_row(int axis, int row) {
  auto m = lie::basis(axis).to_matrix();
  return {m[row][0], m[row][1], m[row][2]};
}

inline SphereFunction apply_one(const Primitive& p, const SphereFunction& f) {
  return std::visit(
      [&](const auto& op) -> SphereFunction {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Multiply>) {
          if (f.symbolic()) return SphereFunction(op.m * f.expression());
          auto c = std::make_shared<expr::Compiled>(op.m, kSphereVars);
          return SphereFunction::black_box(
              [c, f](const Point& q) { return (*c)(std::span<const double>(q.data(), 3)) * f(q); });
        } else if constexpr (std::is_same_v<T, Pullback>) {
          Eigen::Matrix3d a = op.A;
          return SphereFunction::black_box([a, f](const Point& q) { return f(a * q); });
        } else if constexpr (std::is_same_v<T, FlowDerivative>) {
          if (f.symbolic()) {
            // grad f . (-X_j sigma), with exact coefficients
            std::vector<Expr> terms;
            for (int k = 0; k < 3; ++k) {
              auto row = generator_matrix_row(op.axis, k);
              std::vector<Expr> lin;
              for (int l = 0; l < 3; ++l)
                if (row[l] != 0) lin.push_back(Expr(Rational(-row[l])) * sigma(l + 1));
              if (lin.empty()) continue;
              terms.push_back(expr::differentiate(f.expression(), kSphereVars[k]) * expr::sum(lin));
            }
            return SphereFunction(expr::sum(terms));
          }
          Eigen::Matrix3d plus = lie::rotation(op.axis, -kFlowStep), minus = lie::rotation(op.axis, kFlowStep);
          return SphereFunction::black_box(
              [plus, minus, f](const Point& q) { return (f(plus * q) - f(minus * q)) / (2 * kFlowStep); });
        } else {
          if (f.symbolic()) return SphereFunction(Expr(op.c) * f.expression());
          cplx c = op.c.to_complex();
          return SphereFunction::black_box([c, f](const Point& q) { return c * f(q); });
        }
      },
      p);
}

}  // namespace detail

/// Product A_1 A_2 ... A_n; the rightmost primitive acts first.
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::vector<Primitive> ps) : prims_(std::move(ps)) {}

  static Operator identity() { return {}; }

  const std::vector<Primitive>& primitives() const { return prims_; }

  SphereFunction apply(const SphereFunction& f) const {
    SphereFunction out = f;
    for (auto it = prims_.rbegin(); it != prims_.rend(); ++it) out = detail::apply_one(*it, out);
    return out;
  }
  SphereFunction operator()(const SphereFunction& f) const { return apply(f); }

  /// this * other: other acts first.
  Operator then_after(const Operator& other) const {
    auto ps = prims_;
    ps.insert(ps.end(), other.prims_.begin(), other.prims_.end());
    return Operator(std::move(ps));
  }

 private:
  std::vector<Primitive> prims_;
};

/// sup over nodes of |f - g|.
inline double sup_distance(const SphereFunction& f, const SphereFunction& g, const QuadratureGrid& grid) {
  double m = 0;
  for (const auto& p : grid.nodes) m = std::max(m, std::abs(f(p) - g(p)));
  return m;
}

/// <f, g> = integral of conj(f) g.
inline cplx inner(const SphereFunction& f, const SphereFunction& g, const QuadratureGrid& grid) {
  cplx s = 0;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) s += grid.weights[k] * std::conj(f(grid.nodes[k])) * g(grid.nodes[k]);
  return s;
}

}  // namespace mm3::sphere
