#pragma once

#include "mm3/coefficient.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mm3::lie {

using Matrix4Q = std::array<std::array<Rational, 4>, 4>;

/// Element of m(3): x1 X1 + x2 X2 + x3 X3 + e1 E1 + e2 E2 + e3 E3.
/// X1, X2, X3 generate rotations about the third, second and first axis.
struct AlgebraElement {
  std::array<Rational, 6> c{};

  AlgebraElement() = default;
  AlgebraElement(Rational x1, Rational x2, Rational x3, Rational e1, Rational e2, Rational e3)
      : c{std::move(x1), std::move(x2), std::move(x3), std::move(e1), std::move(e2), std::move(e3)} {}

  const Rational& x(int j) const { return c.at(j - 1); }
  const Rational& e(int i) const { return c.at(i + 2); }

  bool is_zero() const {
    for (const auto& v : c)
      if (v != 0) return false;
    return true;
  }

  /// Axial vector of the rotation block: A v = omega x v.
  std::array<Rational, 3> axial() const { return {c[2], c[1], c[0]}; }
  std::array<Rational, 3> translation() const { return {c[3], c[4], c[5]}; }

  Matrix4Q to_matrix() const {
    Matrix4Q m{};
    for (auto& row : m) row.fill(Rational(0));
    const Rational &x1 = c[0], &x2 = c[1], &x3 = c[2];
    m[0][1] = -x1;
    m[1][0] = x1;
    m[0][2] = x2;
    m[2][0] = -x2;
    m[1][2] = -x3;
    m[2][1] = x3;
    m[0][3] = c[3];
    m[1][3] = c[4];
    m[2][3] = c[5];
    return m;
  }

  /// Inverse of to_matrix; throws if `m` is not of the m(3) shape.
  static AlgebraElement from_matrix(const Matrix4Q& m) {
    for (int i = 0; i < 4; ++i) {
      if (m[3][i] != 0) throw std::invalid_argument("bottom row must vanish");
      if (m[i][i] != 0) throw std::invalid_argument("diagonal must vanish");
      for (int j = 0; j < 3; ++j)
        if (i < 3 && m[i][j] != -m[j][i]) throw std::invalid_argument("rotation block must be skew");
    }
    return {m[1][0], m[0][2], m[2][1], m[0][3], m[1][3], m[2][3]};
  }

  Eigen::Matrix3d rotation_block() const {
    Eigen::Matrix3d a;
    double x1 = to_double(c[0]), x2 = to_double(c[1]), x3 = to_double(c[2]);
    a << 0, -x1, x2, x1, 0, -x3, -x2, x3, 0;
    return a;
  }
  Eigen::Vector3d translation_d() const { return {to_double(c[3]), to_double(c[4]), to_double(c[5])}; }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement out;
    for (int k = 0; k < 6; ++k) out.c[k] = a.c[k] + b.c[k];
    return out;
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement out;
    for (int k = 0; k < 6; ++k) out.c[k] = a.c[k] - b.c[k];
    return out;
  }
  friend AlgebraElement operator*(const Rational& s, const AlgebraElement& a) {
    AlgebraElement out;
    for (int k = 0; k < 6; ++k) out.c[k] = s * a.c[k];
    return out;
  }
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) { return a.c == b.c; }

  std::string str() const {
    static const char* names[6] = {"X1", "X2", "X3", "E1", "E2", "E3"};
    std::string out;
    for (int k = 0; k < 6; ++k) {
      if (c[k] == 0) continue;
      std::string coeff = c[k].str();
      if (!out.empty()) out += coeff[0] == '-' ? " - " : " + ";
      else if (coeff[0] == '-') out += "-";
      if (coeff[0] == '-') coeff = coeff.substr(1);
      if (coeff != "1") out += coeff + "*";
      out += names[k];
    }
    return out.empty() ? "0" : out;
  }
};

inline const char* basis_name(int i) {
  static const char* names[6] = {"X1", "X2", "X3", "E1", "E2", "E3"};
  if (i < 1 || i > 6) throw std::out_of_range("basis index must be in 1..6");
  return names[i - 1];
}

/// 1..3 give X1..X3, 4..6 give E1..E3.
inline AlgebraElement basis(int i) {
  if (i < 1 || i > 6) throw std::out_of_range("basis index must be in 1..6");
  AlgebraElement u;
  u.c[i - 1] = 1;
  return u;
}

namespace detail {
inline std::array<Rational, 3> cross(const std::array<Rational, 3>& a, const std::array<Rational, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
}  // namespace detail

/// [(A,a),(B,b)] = ([A,B], A b - B a), computed through axial vectors.
inline AlgebraElement bracket(const AlgebraElement& u, const AlgebraElement& t) {
  auto wu = u.axial(), wt = t.axial();
  auto w = detail::cross(wu, wt);
  auto p = detail::cross(wu, t.translation());
  auto q = detail::cross(wt, u.translation());
  return {w[2], w[1], w[0], p[0] - q[0], p[1] - q[1], p[2] - q[2]};
}

// ---------------------------------------------------------------------------

struct GroupElement {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d r = Eigen::Vector3d::Zero();

  static GroupElement identity() { return {}; }

  Eigen::Matrix4d to_matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = R;
    m.topRightCorner<3, 1>() = r;
    return m;
  }
  double orthonormality_error() const { return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm(); }

  /// Nearest rotation via polar decomposition.
  GroupElement reorthonormalized() const {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    GroupElement g = *this;
    g.R = svd.matrixU() * svd.matrixV().transpose();
    return g;
  }
};

inline constexpr double kDriftThreshold = 1e-10;

inline GroupElement mul(const GroupElement& g, const GroupElement& h) {
  GroupElement out{g.R * h.R, g.R * h.r + g.r};
  if (out.orthonormality_error() > kDriftThreshold) out = out.reorthonormalized();
  return out;
}

inline GroupElement inv(const GroupElement& g) { return {g.R.transpose(), -g.R.transpose() * g.r}; }

inline Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return k;
}

/// exp(tU). Rotation by Rodrigues; translation is V a with V = sum_k (tA)^k/(k+1)!,
/// summed in closed form.
inline GroupElement exp_algebra(const AlgebraElement& u, double t = 1.0) {
  Eigen::Vector3d w(to_double(u.c[2]), to_double(u.c[1]), to_double(u.c[0]));
  w *= t;
  Eigen::Vector3d a = u.translation_d() * t;
  double th = w.norm();
  Eigen::Matrix3d k = hat(w), k2 = k * k;
  double s_over, c_over, v_over;  // sin th/th, (1-cos th)/th^2, (th - sin th)/th^3
  if (th < 1e-4) {
    double t2 = th * th;
    s_over = 1 - t2 / 6 + t2 * t2 / 120;
    c_over = 0.5 - t2 / 24 + t2 * t2 / 720;
    v_over = 1.0 / 6 - t2 / 120 + t2 * t2 / 5040;
  } else {
    s_over = std::sin(th) / th;
    c_over = (1 - std::cos(th)) / (th * th);
    v_over = (th - std::sin(th)) / (th * th * th);
  }
  Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  GroupElement g;
  g.R = I + s_over * k + c_over * k2;
  g.r = (I + c_over * k + v_over * k2) * a;
  return g;
}

inline Eigen::Matrix3d rotation(int axis_generator, double theta) {
  return exp_algebra(basis(axis_generator), theta).R;
}

/// exp(r1E1 + r2E2 + r3E3) exp(th1 X1) exp(th2 X2) exp(th3 X3).
inline GroupElement from_factors(const Eigen::Vector3d& r, double th1, double th2, double th3) {
  GroupElement g;
  g.R = rotation(1, th1) * rotation(2, th2) * rotation(3, th3);
  g.r = r;
  return g;
}

struct Factors {
  Eigen::Vector3d r;
  double theta1, theta2, theta3;
};

/// Inverse of from_factors. At gimbal lock (|theta2| = pi/2) theta3 is set to 0.
inline Factors factorize(const GroupElement& g) {
  const Eigen::Matrix3d& R = g.R;
  Factors f{g.r, 0, 0, 0};
  double sb = std::clamp(-R(2, 0), -1.0, 1.0);
  f.theta2 = std::asin(sb);
  double cb = std::sqrt(std::max(0.0, 1 - sb * sb));
  if (cb > 1e-12) {
    f.theta1 = std::atan2(R(1, 0), R(0, 0));
    f.theta3 = std::atan2(R(2, 1), R(2, 2));
  } else {
    f.theta1 = std::atan2(-R(0, 1), R(1, 1));
    f.theta3 = 0;
  }
  return f;
}

// ---------------------------------------------------------------------------

struct DualFunctional {
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
};

/// (R mu + (R alpha) x r, R alpha).
inline DualFunctional coadjoint(const GroupElement& g, const DualFunctional& f) {
  Eigen::Vector3d ra = g.R * f.alpha;
  return {g.R * f.mu + ra.cross(g.r), ra};
}

}  // namespace mm3::lie
