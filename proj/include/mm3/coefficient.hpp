#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace mm3 {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using cplx = std::complex<double>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "12", "-3/4", "0.125", "1e-3", "2.5E+2" exactly.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  std::string s(text);
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  if (auto slash = s.find('/', pos); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(pos, slash - pos));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::domain_error("division by zero in rational literal");
    Rational q = num / den;
    return negative ? Rational(-q) : q;
  }
  BigInt mantissa = 0;
  int scale = 0;
  bool any_digit = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (after_point) --scale;
      any_digit = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed number '" + s + "'");
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("malformed number '" + s + "'");
    ++pos;
    bool exp_negative = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      exp_negative = s[pos] == '-';
      ++pos;
    }
    if (pos >= s.size()) throw std::invalid_argument("malformed exponent in '" + s + "'");
    int e = 0;
    for (; pos < s.size(); ++pos) {
      if (s[pos] < '0' || s[pos] > '9') throw std::invalid_argument("malformed exponent in '" + s + "'");
      e = e * 10 + (s[pos] - '0');
      if (e > 4000) throw std::out_of_range("exponent too large in '" + s + "'");
    }
    scale += exp_negative ? -e : e;
  }
  Rational value(mantissa);
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(scale)));
  if (scale > 0) value *= Rational(ten_pow);
  if (scale < 0) value /= Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

/// a + b*i with exact rational parts.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(int r) : re(r) {}

  static GaussianRational i() { return {0, 1}; }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  bool is_one() const { return re == 1 && im == 0; }

  GaussianRational conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational d = b.norm2();
    if (d == 0) throw std::domain_error("division by zero");
    GaussianRational n = a * b.conj();
    return {n.re / d, n.im / d};
  }
  GaussianRational operator-() const { return {-re, -im}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  cplx to_complex() const { return {to_double(re), to_double(im)}; }
};

/// Scalar coefficient: exact Gaussian rational where possible, complex double otherwise.
/// Arithmetic stays exact only while both operands are exact.
class Coefficient {
 public:
  Coefficient() : value_(GaussianRational{}) {}
  Coefficient(int v) : value_(GaussianRational(v)) {}
  Coefficient(const Rational& v) : value_(GaussianRational(v)) {}
  Coefficient(GaussianRational v) : value_(std::move(v)) {}
  Coefficient(cplx v) : value_(v) {}
  static Coefficient real(double v) { return Coefficient(cplx(v, 0.0)); }
  static Coefficient i() { return Coefficient(GaussianRational::i()); }

  bool is_exact() const { return std::holds_alternative<GaussianRational>(value_); }
  const GaussianRational& exact() const { return std::get<GaussianRational>(value_); }

  cplx to_complex() const {
    if (is_exact()) return exact().to_complex();
    return std::get<cplx>(value_);
  }

  /// Exact zero only; floating coefficients are zero only when bit-exactly 0.
  bool is_zero() const {
    if (is_exact()) return exact().is_zero();
    return std::get<cplx>(value_) == cplx(0.0, 0.0);
  }
  bool is_one() const {
    if (is_exact()) return exact().is_one();
    return std::get<cplx>(value_) == cplx(1.0, 0.0);
  }
  bool is_exact_integer() const {
    return is_exact() && exact().im == 0 && denominator(exact().re) == 1;
  }
  /// Real and negative (for printing decisions).
  bool is_negative_real() const {
    if (is_exact()) return exact().im == 0 && exact().re < 0;
    auto c = std::get<cplx>(value_);
    return c.imag() == 0.0 && c.real() < 0.0;
  }

  Coefficient conj() const {
    if (is_exact()) return exact().conj();
    return std::conj(std::get<cplx>(value_));
  }

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() + b.exact();
    return a.to_complex() + b.to_complex();
  }
  friend Coefficient operator-(const Coefficient& a, const Coefficient& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() - b.exact();
    return a.to_complex() - b.to_complex();
  }
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() * b.exact();
    return a.to_complex() * b.to_complex();
  }
  friend Coefficient operator/(const Coefficient& a, const Coefficient& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    if (a.is_exact() && b.is_exact()) return a.exact() / b.exact();
    return a.to_complex() / b.to_complex();
  }
  Coefficient operator-() const {
    if (is_exact()) return -exact();
    return -std::get<cplx>(value_);
  }
  Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
  Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }

  /// Structural equality (exact vs floating never compare equal).
  friend bool operator==(const Coefficient& a, const Coefficient& b) {
    if (a.is_exact() != b.is_exact()) return false;
    if (a.is_exact()) return a.exact() == b.exact();
    return std::get<cplx>(a.value_) == std::get<cplx>(b.value_);
  }

  Coefficient pow(int n) const {
    if (n < 0) return Coefficient(1) / pow(-n);
    Coefficient result(1), base = *this;
    while (n > 0) {
      if (n & 1) result *= base;
      base *= base;
      n >>= 1;
    }
    return result;
  }

  /// Text in the expression grammar; parses back to the same value.
  std::string str() const {
    if (is_exact()) {
      const auto& g = exact();
      if (g.im == 0) return g.re.str();
      if (g.re == 0) {
        if (g.im == 1) return "i";
        if (g.im == -1) return "-i";
        return g.im.str() + "*i";
      }
      std::string im = (g.im == 1) ? "i" : (g.im == -1 ? "-i" : g.im.str() + "*i");
      if (im[0] != '-') im = "+" + im;
      return "(" + g.re.str() + im + ")";
    }
    auto c = std::get<cplx>(value_);
    if (c.imag() == 0.0) return format_double(c.real());
    std::string im = format_double(c.imag()) + "*i";
    if (c.real() == 0.0) return im;
    if (im[0] != '-') im = "+" + im;
    return "(" + format_double(c.real()) + im + ")";
  }

 private:
  static std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite coefficient");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
  }

  std::variant<GaussianRational, cplx> value_;
};

}  // namespace mm3
