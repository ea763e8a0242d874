#pragma once

#include "mm3/coefficient.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mm3::fourier {

/// Row-major N x N samples; index [a * N + b] is (first variable a, second variable b).
using Samples = std::vector<cplx>;

class AliasingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBoundaryDecay = 1e-12;

namespace detail {
// FFTW's planner is not re-entrant.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline void dft2(Samples& data, int n, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}
}  // namespace detail

/// Uniform grid s_k = -L + k h, h = 2L/N, and its dual eta_m = (m - N/2) pi / L.
struct FourierGrid {
  double extent = 12.0;
  int n = 256;

  FourierGrid() = default;
  FourierGrid(double l, int samples) : extent(l), n(samples) {
    if (!(l > 0)) throw std::invalid_argument("grid extent must be positive");
    if (samples < 16 || (samples & (samples - 1)) != 0)
      throw std::invalid_argument("grid size must be a power of two, at least 16");
  }

  double h() const { return 2 * extent / n; }
  double dh() const { return M_PI / extent; }
  double s(int k) const { return -extent + k * h(); }
  double eta(int m) const { return (m - n / 2) * dh(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }

  template <class F>
  Samples sample_s(F&& f) const {
    Samples out(size());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[a * n + b] = f(s(a), s(b));
    return out;
  }
  template <class F>
  Samples sample_eta(F&& f) const {
    Samples out(size());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[a * n + b] = f(eta(a), eta(b));
    return out;
  }
};

/// Largest boundary magnitude relative to the largest magnitude.
inline double boundary_ratio(const Samples& f, int n) {
  double peak = 0, edge = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double v = std::abs(f[a * n + b]);
      peak = std::max(peak, v);
      if (a == 0 || b == 0 || a == n - 1 || b == n - 1) edge = std::max(edge, v);
    }
  return peak == 0 ? 0.0 : edge / peak;
}

inline void require_decay(const Samples& f, int n) {
  double r = boundary_ratio(f, n);
  if (r > kBoundaryDecay)
    throw AliasingError("samples do not decay at the grid boundary (ratio " + std::to_string(r) + ")");
}

namespace detail {
/// Multiplies by (-1)^(a+b), the shift between centred and FFT index order.
inline void checkerboard(Samples& f, int n) {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if ((a + b) & 1) f[a * n + b] = -f[a * n + b];
}
}  // namespace detail

/// (F f)(eta) = 1/(2 pi) int exp(-i s.eta) f(s) ds, from s-samples to eta-samples.
inline Samples forward(Samples f, const FourierGrid& g, bool check = true) {
  if (f.size() != g.size()) throw std::invalid_argument("sample count does not match the grid");
  if (check) require_decay(f, g.n);
  detail::checkerboard(f, g.n);
  detail::dft2(f, g.n, FFTW_FORWARD);
  // (-1)^{m - N/2} per axis; the two (-1)^{N/2} cancel
  detail::checkerboard(f, g.n);
  double scale = g.h() * g.h() / (2 * M_PI);
  for (auto& v : f) v *= scale;
  return f;
}

/// (F^-1 f)(s) = 1/(2 pi) int exp(i s.eta) f(eta) d eta, from eta-samples to s-samples.
inline Samples inverse(Samples f, const FourierGrid& g, bool check = true) {
  if (f.size() != g.size()) throw std::invalid_argument("sample count does not match the grid");
  if (check) require_decay(f, g.n);
  detail::checkerboard(f, g.n);
  detail::dft2(f, g.n, FFTW_BACKWARD);
  detail::checkerboard(f, g.n);
  double scale = g.dh() * g.dh() / (2 * M_PI);
  for (auto& v : f) v *= scale;
  return f;
}

/// Discrete L2 norm with cell area `area`.
inline double l2_norm(const Samples& f, double area) {
  double s = 0;
  for (const auto& v : f) s += std::norm(v);
  return std::sqrt(s * area);
}

/// |(||F f|| - ||f||)| / ||f||, norms in the s and eta cell measures.
inline double parseval_defect(const Samples& f, const FourierGrid& g) {
  double a = l2_norm(f, g.h() * g.h());
  double b = l2_norm(forward(f, g), g.dh() * g.dh());
  return a == 0 ? 0.0 : std::abs(a - b) / a;
}

/// d/ds_axis of s-samples (axis 0 or 1), by multiplying by i eta in the transform.
inline Samples spectral_derivative(const Samples& f, const FourierGrid& g, int axis) {
  Samples t = forward(f, g, false);
  const int n = g.n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // the Nyquist row has no symmetric partner; drop it
      int m = axis == 0 ? a : b;
      t[a * n + b] *= m == 0 ? cplx(0) : cplx(0, g.eta(m));
    }
  return inverse(std::move(t), g, false);
}

}  // namespace mm3::fourier
