#include "mm3/fourier.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mm3;
using namespace mm3::fourier;

namespace {

double max_abs_diff(const Samples& a, const Samples& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(FourierGrid, Layout) {
  FourierGrid g(12, 256);
  EXPECT_DOUBLE_EQ(g.s(0), -12);
  EXPECT_DOUBLE_EQ(g.s(128), 0);
  EXPECT_DOUBLE_EQ(g.eta(128), 0);
  EXPECT_DOUBLE_EQ(g.eta(129), M_PI / 12);
  EXPECT_THROW(FourierGrid(12, 100), std::invalid_argument);
  EXPECT_THROW(FourierGrid(12, 8), std::invalid_argument);
  EXPECT_THROW(FourierGrid(0, 64), std::invalid_argument);
}

TEST(Fourier, GaussianIsSelfDual) {
  FourierGrid g(12, 256);
  auto f = g.sample_s([](double a, double b) { return cplx(std::exp(-(a * a + b * b) / 2)); });
  auto expect = g.sample_eta([](double a, double b) { return cplx(std::exp(-(a * a + b * b) / 2)); });
  EXPECT_LT(max_abs_diff(forward(f, g), expect), 1e-8);
  EXPECT_LT(max_abs_diff(inverse(expect, g), f), 1e-8);
}

// Shifted, scaled Gaussian against the closed form
// (1/2pi) int e^{-i s.eta} e^{-a|s - c|^2} ds = e^{-i c.eta} e^{-|eta|^2/(4a)} / (2a).
TEST(Fourier, ShiftedGaussianClosedForm) {
  FourierGrid g(12, 256);
  const double a = 0.7, c1 = 0.5, c2 = -1.0;
  auto f = g.sample_s([&](double x, double y) {
    return cplx(std::exp(-a * ((x - c1) * (x - c1) + (y - c2) * (y - c2))));
  });
  auto expect = g.sample_eta([&](double e1, double e2) {
    return std::exp(cplx(0, -(c1 * e1 + c2 * e2))) * std::exp(-(e1 * e1 + e2 * e2) / (4 * a)) / (2 * a);
  });
  EXPECT_LT(max_abs_diff(forward(f, g), expect), 1e-8);
}

TEST(Fourier, InverseUndoesForward) {
  FourierGrid g(10, 128);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  double p = d(rng), q = d(rng);
  auto f = g.sample_s([&](double x, double y) {
    return cplx(1 + p * x, q * y * y) * std::exp(-(x * x + 2 * y * y) / 2);
  });
  EXPECT_LT(max_abs_diff(inverse(forward(f, g), g, false), f), 1e-10);
}

TEST(Fourier, MultiplicationBecomesDerivative) {
  // F(s1 f) = i d/deta1 F f on f = e^{-|s|^2/2}, where F f is again e^{-|eta|^2/2}.
  FourierGrid g(12, 256);
  auto f = g.sample_s([](double a, double b) { return cplx(a * std::exp(-(a * a + b * b) / 2)); });
  auto expect = g.sample_eta(
      [](double a, double b) { return cplx(0, 1) * (-a) * std::exp(-(a * a + b * b) / 2); });
  EXPECT_LT(max_abs_diff(forward(f, g), expect), 1e-6);
}

TEST(Fourier, Linearity) {
  FourierGrid g(12, 128);
  auto f = g.sample_s([](double a, double b) { return cplx(std::exp(-(a * a + b * b) / 2)); });
  auto h = g.sample_s([](double a, double b) { return cplx(a * b * std::exp(-(a * a + b * b))); });
  Samples mix(f.size());
  const cplx alpha(2, -1), beta(0.5, 3);
  for (std::size_t k = 0; k < f.size(); ++k) mix[k] = alpha * f[k] + beta * h[k];
  auto ff = forward(f, g), fh = forward(h, g), fm = forward(mix, g);
  Samples combo(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) combo[k] = alpha * ff[k] + beta * fh[k];
  EXPECT_LT(max_abs_diff(fm, combo), 1e-12);
}

TEST(Fourier, Parseval) {
  FourierGrid g(12, 256);
  for (double w : {0.5, 1.0, 2.0}) {
    auto f = g.sample_s([&](double a, double b) { return cplx(1 + a, b) * std::exp(-w * (a * a + b * b)); });
    EXPECT_LT(parseval_defect(f, g), 1e-10);
  }
}

TEST(Fourier, SpectralDerivative) {
  FourierGrid g(12, 256);
  auto f = g.sample_s([](double a, double b) { return cplx(std::exp(-(a * a + b * b) / 2)); });
  auto d0 = spectral_derivative(f, g, 0), d1 = spectral_derivative(f, g, 1);
  auto e0 = g.sample_s([](double a, double b) { return cplx(-a * std::exp(-(a * a + b * b) / 2)); });
  auto e1 = g.sample_s([](double a, double b) { return cplx(-b * std::exp(-(a * a + b * b) / 2)); });
  EXPECT_LT(max_abs_diff(d0, e0), 1e-9);
  EXPECT_LT(max_abs_diff(d1, e1), 1e-9);
}

TEST(Fourier, AliasingGuard) {
  FourierGrid g(4, 64);
  auto wide = g.sample_s([](double a, double b) { return cplx(std::exp(-(a * a + b * b) / 8)); });
  EXPECT_THROW(forward(wide, g), AliasingError);
  EXPECT_THROW(inverse(wide, g), AliasingError);
  EXPECT_NO_THROW(forward(wide, g, false));
  EXPECT_THROW(forward(Samples(10), g), std::invalid_argument);
}
