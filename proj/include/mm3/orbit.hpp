#pragma once

#include "mm3/expr.hpp"
#include "mm3/lie.hpp"

#include <array>
#include <string>

namespace mm3::orbit {

using lie::AlgebraElement;
using lie::DualFunctional;
using Matrix4Q = lie::Matrix4Q;

/// Chart coordinate names, in matrix index order.
inline const std::array<std::string, 4> kChartVars = {"s1", "s2", "t1", "t2"};

enum class OrbitKind { TrivialPoint, Sphere, CotangentBundle };

struct OrbitClass {
  OrbitKind kind;
  double radius = 0.0;

  std::string name() const {
    switch (kind) {
      case OrbitKind::TrivialPoint:
        return "trivial-point";
      case OrbitKind::Sphere:
        return "sphere";
      case OrbitKind::CotangentBundle:
        return "cotangent-bundle";
    }
    return {};
  }
};

inline OrbitClass classify(const DualFunctional& f) {
  bool mu0 = f.mu.isZero(0.0), alpha0 = f.alpha.isZero(0.0);
  if (mu0 && alpha0) return {OrbitKind::TrivialPoint, 0.0};
  if (alpha0) return {OrbitKind::Sphere, f.mu.norm()};
  return {OrbitKind::CotangentBundle, f.alpha.norm()};
}

namespace detail {
inline void require_positive(double lambda) {
  if (!(lambda > 0)) throw std::domain_error("orbit radius must be positive");
}
inline void require_positive(const Rational& lambda) {
  if (lambda <= 0) throw std::domain_error("orbit radius must be positive");
}
}  // namespace detail

/// (lambda, lambda^2 t1, lambda^2 t2).
inline Eigen::Vector3d chart_base(double t1, double t2, double lambda) {
  detail::require_positive(lambda);
  return {lambda, lambda * lambda * t1, lambda * lambda * t2};
}

struct ChartPoint {
  double s1 = 0, s2 = 0, t1 = 0, t2 = 0;
};

/// Coefficients over (X1*, X2*, X3*, E1*, E2*, E3*).
inline std::array<double, 6> chart_to_functional(const ChartPoint& c, double lambda) {
  detail::require_positive(lambda);
  double l2 = lambda * lambda;
  return {0.0, c.s1 / l2, c.s2 / l2, lambda, l2 * c.t1, l2 * c.t2};
}

inline DualFunctional to_dual(const std::array<double, 6>& coeffs) {
  return {{coeffs[0], coeffs[1], coeffs[2]}, {coeffs[3], coeffs[4], coeffs[5]}};
}

/// Coordinate pairing: mu_j against x_j, alpha_i against e_i.
inline double coefficient_pairing(const DualFunctional& f, const AlgebraElement& u) {
  double out = 0;
  for (int j = 0; j < 3; ++j) out += f.mu[j] * to_double(u.c[j]) + f.alpha[j] * to_double(u.c[j + 3]);
  return out;
}

/// Pairing through the axial vector, the one under which coadjoint() is dual to Ad.
inline double axial_pairing(const DualFunctional& f, const AlgebraElement& u) {
  auto w = u.axial();
  double out = 0;
  for (int j = 0; j < 3; ++j) out += f.mu[j] * to_double(w[j]) + f.alpha[j] * to_double(u.c[j + 3]);
  return out;
}

// ---------------------------------------------------------------------------
// Energy functions and Hamiltonian fields

/// Printed: s1, s2 pair with x2, x3. Axial: s1, s2 pair with x2, x1.
enum class EnergyConvention { Printed, Axial };

inline const char* convention_name(EnergyConvention c) { return c == EnergyConvention::Printed ? "printed" : "axial"; }

/// Gradient of the energy over (s1, s2, t1, t2); the constant term is lambda e1.
inline std::array<Rational, 4> energy_gradient(const AlgebraElement& u, const Rational& lambda,
                                               EnergyConvention conv = EnergyConvention::Printed) {
  detail::require_positive(lambda);
  Rational l2 = lambda * lambda;
  const Rational& second = conv == EnergyConvention::Printed ? u.x(3) : u.x(1);
  return {u.x(2) / l2, second / l2, l2 * u.e(2), l2 * u.e(3)};
}

inline Rational energy_constant(const AlgebraElement& u, const Rational& lambda) { return lambda * u.e(1); }

inline expr::Expr energy(const AlgebraElement& u, const Rational& lambda,
                         EnergyConvention conv = EnergyConvention::Printed) {
  auto g = energy_gradient(u, lambda, conv);
  std::vector<expr::Expr> terms;
  for (int k = 0; k < 4; ++k) terms.push_back(expr::Expr(g[k]) * expr::var(kChartVars[k]));
  terms.emplace_back(energy_constant(u, lambda));
  return expr::sum(terms);
}

inline Rational energy_at_origin(const AlgebraElement& u, const Rational& lambda) { return energy_constant(u, lambda); }

/// Coefficients over (d/ds1, d/ds2, d/dt1, d/dt2), from the canonical pairs (s1,t1), (s2,t2).
inline std::array<Rational, 4> hamiltonian_field(const AlgebraElement& u, const Rational& lambda,
                                                 EnergyConvention conv = EnergyConvention::Printed) {
  auto g = energy_gradient(u, lambda, conv);
  return {-g[2], -g[3], g[0], g[1]};
}

// ---------------------------------------------------------------------------
// Kirillov form

inline Matrix4Q zero_matrix() {
  Matrix4Q m{};
  for (auto& row : m) row.fill(Rational(0));
  return m;
}

inline Matrix4Q printed_matrix() {
  Matrix4Q m = zero_matrix();
  m[0][3] = -1;
  m[1][2] = 1;
  m[2][1] = -1;
  m[3][0] = 1;
  return m;
}

inline Matrix4Q scaled(const Matrix4Q& m, const Rational& s) {
  Matrix4Q out = m;
  for (auto& row : out)
    for (auto& v : row) v *= s;
  return out;
}

inline bool is_antisymmetric(const Matrix4Q& m) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (m[i][j] != -m[j][i]) return false;
  return true;
}

struct KirillovMatrix {
  Matrix4Q form;     // lambda (dt2 ^ ds1 + ds2 ^ dt1)
  Matrix4Q printed;  // unit-entry matrix as printed
  Rational scale;    // form = scale * printed
};

inline KirillovMatrix kirillov_matrix(const Rational& lambda) {
  detail::require_positive(lambda);
  Matrix4Q p = printed_matrix();
  // dt2^ds1 puts +1 at (t2, s1); ds2^dt1 puts +1 at (s2, t1).
  Matrix4Q f = zero_matrix();
  f[3][0] = lambda;
  f[0][3] = -lambda;
  f[1][2] = lambda;
  f[2][1] = -lambda;
  return {f, p, lambda};
}

inline Rational form_value(const Matrix4Q& w, const std::array<Rational, 4>& a, const std::array<Rational, 4>& b) {
  Rational out = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (w[i][j] != 0) out += w[i][j] * a[i] * b[j];
  return out;
}

/// i(xi_U) w - dU, coefficient-wise; zero when the field is Hamiltonian for `w`.
inline std::array<Rational, 4> contraction_residual(const AlgebraElement& u, const Rational& lambda, const Matrix4Q& w,
                                                    EnergyConvention conv = EnergyConvention::Printed) {
  auto xi = hamiltonian_field(u, lambda, conv);
  auto grad = energy_gradient(u, lambda, conv);
  std::array<Rational, 4> out;
  for (int b = 0; b < 4; ++b) {
    Rational v = 0;
    for (int a = 0; a < 4; ++a) v += xi[a] * w[a][b];
    out[b] = v - grad[b];
  }
  return out;
}

/// w(xi_U, xi_T) - energy([U,T]) at the chart origin.
inline Rational origin_pairing_residual(const AlgebraElement& u, const AlgebraElement& t, const Rational& lambda,
                                        const Matrix4Q& w, EnergyConvention conv = EnergyConvention::Printed) {
  return form_value(w, hamiltonian_field(u, lambda, conv), hamiltonian_field(t, lambda, conv)) -
         energy_at_origin(lie::bracket(u, t), lambda);
}

}  // namespace mm3::orbit
