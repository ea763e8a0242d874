#include "mm3/lie.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <numbers>
#include <random>

using namespace mm3;
using namespace mm3::lie;

namespace {

Matrix4Q matmul(const Matrix4Q& a, const Matrix4Q& b) {
  Matrix4Q out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      out[i][j] = 0;
      for (int k = 0; k < 4; ++k) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

AlgebraElement commutator_oracle(const AlgebraElement& u, const AlgebraElement& t) {
  Matrix4Q a = matmul(u.to_matrix(), t.to_matrix()), b = matmul(t.to_matrix(), u.to_matrix());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] -= b[i][j];
  return AlgebraElement::from_matrix(a);
}

Eigen::Matrix4d to_double(const Matrix4Q& m) {
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = mm3::to_double(m[i][j]);
  return out;
}

AlgebraElement random_element(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-9, 9);
  AlgebraElement u;
  for (auto& v : u.c) v = Rational(d(rng), 4);
  return u;
}

GroupElement random_group(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-3, 3);
  return from_factors({d(rng), d(rng), d(rng)}, d(rng), d(rng), d(rng));
}

}  // namespace

TEST(Basis, MatricesMatchPrintedLayout) {
  auto x1 = basis(1).to_matrix();
  EXPECT_EQ(x1[0][1], -1);
  EXPECT_EQ(x1[1][0], 1);
  auto x2 = basis(2).to_matrix();
  EXPECT_EQ(x2[0][2], 1);
  EXPECT_EQ(x2[2][0], -1);
  auto x3 = basis(3).to_matrix();
  EXPECT_EQ(x3[1][2], -1);
  EXPECT_EQ(x3[2][1], 1);
  auto e1 = basis(4).to_matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(e1[i][j], (i == 0 && j == 3) ? 1 : 0);
  EXPECT_THROW(basis(0), std::out_of_range);
  EXPECT_THROW(basis(7), std::out_of_range);
}

TEST(Basis, LinearlyIndependent) {
  Eigen::Matrix<double, 16, 6> m;
  for (int k = 1; k <= 6; ++k) {
    Eigen::Matrix4d b = to_double(basis(k).to_matrix());
    m.col(k - 1) = Eigen::Map<Eigen::Matrix<double, 16, 1>>(b.data());
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 16, 6>> lu(m);
  EXPECT_EQ(lu.rank(), 6);
}

TEST(Basis, MatrixRoundTripAndLinearity) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 20; ++n) {
    AlgebraElement u = random_element(rng), t = random_element(rng);
    EXPECT_EQ(AlgebraElement::from_matrix(u.to_matrix()), u);
    auto m = (u + Rational(3, 2) * t).to_matrix();
    auto a = u.to_matrix(), b = t.to_matrix();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_EQ(m[i][j], a[i][j] + Rational(3, 2) * b[i][j]);
  }
}

TEST(Bracket, SpotValues) {
  EXPECT_EQ(bracket(basis(1), basis(2)), Rational(-1) * basis(3));
  EXPECT_EQ(bracket(basis(1), basis(4)), basis(5));
  EXPECT_TRUE(bracket(basis(4), basis(5)).is_zero());
}

TEST(Bracket, MatchesMatrixCommutatorOnAllBasisPairs) {
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) EXPECT_EQ(bracket(basis(i), basis(j)), commutator_oracle(basis(i), basis(j)));
}

TEST(Bracket, MatchesMatrixCommutatorOnRandomElements) {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 50; ++n) {
    auto u = random_element(rng), t = random_element(rng);
    EXPECT_EQ(bracket(u, t), commutator_oracle(u, t));
  }
}

TEST(Bracket, AntisymmetryAndJacobiOnBasisTriples) {
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) EXPECT_EQ(bracket(basis(i), basis(j)), Rational(-1) * bracket(basis(j), basis(i)));
  int triples = 0;
  for (int i = 1; i <= 6; ++i)
    for (int j = i + 1; j <= 6; ++j)
      for (int k = j + 1; k <= 6; ++k) {
        auto a = basis(i), b = basis(j), c = basis(k);
        auto s = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
        EXPECT_TRUE(s.is_zero());
        ++triples;
      }
  EXPECT_EQ(triples, 20);
}

TEST(Exp, MatchesMatrixExponential) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 30; ++n) {
    auto u = random_element(rng);
    Eigen::Matrix4d oracle = to_double(u.to_matrix()).exp();
    EXPECT_LT((exp_algebra(u).to_matrix() - oracle).norm(), 1e-13 * std::max(1.0, oracle.norm()));
  }
  for (int k = 1; k <= 3; ++k) {
    auto u = basis(k);
    Eigen::Matrix4d oracle = (0.7 * to_double(u.to_matrix())).exp();
    EXPECT_LT((exp_algebra(u, 0.7).to_matrix() - oracle).norm(), 1e-13);
  }
  // small-angle branch
  AlgebraElement tiny(Rational(1, 100000), Rational(-3, 100000), 0, 1, 2, 3);
  EXPECT_LT((exp_algebra(tiny).to_matrix() - to_double(tiny.to_matrix()).exp()).norm(), 1e-13);
}

TEST(Exp, OneParameterSubgroups) {
  double th = 0.9;
  auto g1 = exp_algebra(basis(1), th);
  EXPECT_NEAR(g1.R(0, 0), std::cos(th), 1e-15);
  EXPECT_NEAR(g1.R(1, 0), std::sin(th), 1e-15);
  EXPECT_NEAR(g1.R(2, 2), 1.0, 1e-15);
  EXPECT_EQ(g1.r.norm(), 0.0);
  auto t = exp_algebra(Rational(5, 2) * basis(4));
  EXPECT_LT((t.R - Eigen::Matrix3d::Identity()).norm(), 1e-15);
  EXPECT_LT((t.r - Eigen::Vector3d(2.5, 0, 0)).norm(), 1e-15);
  auto id = exp_algebra(AlgebraElement{});
  EXPECT_LT((id.to_matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-15);
}

TEST(FromFactors, Examples) {
  auto g = from_factors(Eigen::Vector3d::Zero(), 0, 0, 0);
  EXPECT_LT((g.to_matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-15);
  auto h = from_factors({1, 2, 3}, 0, 0, 0);
  EXPECT_LT((h.r - Eigen::Vector3d(1, 2, 3)).norm(), 1e-15);
  auto q = from_factors(Eigen::Vector3d::Zero(), std::numbers::pi / 2, 0, 0);
  EXPECT_LT((q.R * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm(), 1e-15);
}

TEST(FromFactors, EqualsProductOfFourExponentials) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int n = 0; n < 20; ++n) {
    Eigen::Vector3d r(d(rng), d(rng), d(rng));
    double a = d(rng), b = d(rng), c = d(rng);
    Eigen::Matrix4d tr = Eigen::Matrix4d::Identity();
    tr.topRightCorner<3, 1>() = r;
    Eigen::Matrix4d oracle = tr * (a * to_double(basis(1).to_matrix())).exp() *
                             (b * to_double(basis(2).to_matrix())).exp() *
                             (c * to_double(basis(3).to_matrix())).exp();
    EXPECT_LT((from_factors(r, a, b, c).to_matrix() - oracle).norm(), 1e-12);
  }
}

TEST(FromFactors, FactorizeRoundTrip) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    auto g = random_group(rng);
    auto f = factorize(g);
    auto h = from_factors(f.r, f.theta1, f.theta2, f.theta3);
    EXPECT_LT((g.to_matrix() - h.to_matrix()).norm(), 1e-12);
  }
  auto lock = from_factors({0, 0, 0}, 0.4, std::numbers::pi / 2, 0.3);
  auto f = factorize(lock);
  EXPECT_LT((from_factors(f.r, f.theta1, f.theta2, f.theta3).R - lock.R).norm(), 1e-7);
}

TEST(GroupLaw, InverseTranslationsAndAssociativity) {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 50; ++n) {
    auto g = random_group(rng), h = random_group(rng), k = random_group(rng);
    EXPECT_LT((mul(g, inv(g)).to_matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-12);
    EXPECT_LT((mul(mul(g, h), k).to_matrix() - mul(g, mul(h, k)).to_matrix()).norm(), 1e-12);
    EXPECT_LT((mul(g, h).to_matrix() - g.to_matrix() * h.to_matrix()).norm(), 1e-12);
    EXPECT_LT(std::abs(g.R.determinant() - 1), 1e-12);
    EXPECT_LT(g.orthonormality_error(), 1e-12);
  }
  GroupElement a{Eigen::Matrix3d::Identity(), {1, 2, 3}}, b{Eigen::Matrix3d::Identity(), {-4, 0.5, 2}};
  EXPECT_LT((mul(a, b).r - Eigen::Vector3d(-3, 2.5, 5)).norm(), 1e-15);
}

TEST(GroupLaw, DriftIsReprojected) {
  GroupElement g = exp_algebra(AlgebraElement(1, 2, 3, 0, 0, 0), 0.3);
  g.R *= 1 + 1e-8;
  auto h = mul(g, GroupElement::identity());
  EXPECT_LT(h.orthonormality_error(), 1e-14);
}

TEST(Coadjoint, IdentityRotationAndLeftAction) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2, 2);
  DualFunctional f{{d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
  auto same = coadjoint(GroupElement::identity(), f);
  EXPECT_LT((same.mu - f.mu).norm() + (same.alpha - f.alpha).norm(), 1e-15);

  auto rot = from_factors(Eigen::Vector3d::Zero(), 0.3, -1.1, 2.0);
  DualFunctional pure{Eigen::Vector3d::Zero(), {0.2, -0.4, 1.5}};
  auto moved = coadjoint(rot, pure);
  EXPECT_LT(moved.mu.norm(), 1e-15);
  EXPECT_LT((moved.alpha - rot.R * pure.alpha).norm(), 1e-15);

  for (int n = 0; n < 50; ++n) {
    auto g = random_group(rng), h = random_group(rng);
    DualFunctional x{{d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}};
    auto lhs = coadjoint(mul(g, h), x), rhs = coadjoint(g, coadjoint(h, x));
    EXPECT_LT((lhs.mu - rhs.mu).norm() + (lhs.alpha - rhs.alpha).norm(), 1e-12);
    EXPECT_NEAR(coadjoint(g, x).alpha.norm(), x.alpha.norm(), 1e-12);
  }
}
