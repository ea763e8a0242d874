#pragma once

#include "mm3/expr.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>

namespace mm3::expr {

class NormalForm;

/// Product of variable powers (Laurent), at most one exp atom, and opaque powers
/// of non-monomial bases (negative powers of sums).
struct Monomial {
  std::map<std::string, int> vars;
  std::shared_ptr<const NormalForm> exp_arg;
  std::map<std::string, std::pair<Expr, int>> opaque;

  std::string key() const;
  Expr to_expr() const;
};

/// Expanded sum of coefficient * monomial, keyed by the monomial's canonical string.
class NormalForm {
 public:
  struct Term {
    Monomial monomial;
    Coefficient coeff;
  };

  NormalForm() = default;

  static NormalForm constant(const Coefficient& c) {
    NormalForm nf;
    nf.add_term(Monomial{}, c);
    return nf;
  }
  static NormalForm variable(const std::string& name) {
    Monomial m;
    m.vars[name] = 1;
    NormalForm nf;
    nf.add_term(m, Coefficient(1));
    return nf;
  }
  static NormalForm from_expr(const Expr& e);

  const std::map<std::string, Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, const Coefficient& c) {
    if (c.is_zero()) return;
    std::string k = m.key();
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(std::move(k), Term{m, c});
      return;
    }
    it->second.coeff += c;
    if (it->second.coeff.is_zero()) terms_.erase(it);
  }

  friend NormalForm operator+(NormalForm a, const NormalForm& b) {
    for (const auto& [k, t] : b.terms_) a.add_term(t.monomial, t.coeff);
    return a;
  }
  NormalForm scaled(const Coefficient& c) const {
    NormalForm out;
    if (c.is_zero()) return out;
    for (const auto& [k, t] : terms_) out.add_term(t.monomial, t.coeff * c);
    return out;
  }
  NormalForm operator-() const { return scaled(Coefficient(-1)); }
  friend NormalForm operator-(NormalForm a, const NormalForm& b) { return a + (-b); }
  friend NormalForm operator*(const NormalForm& a, const NormalForm& b);

  NormalForm pow(int n) const;
  NormalForm derivative(const std::string& v) const;

  /// Constant value when the form has no non-trivial monomial.
  std::optional<Coefficient> as_constant() const {
    if (terms_.empty()) return Coefficient(0);
    if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second.coeff;
    return std::nullopt;
  }

  bool depends_on(const std::string& v) const;
  std::set<std::string> variables() const;

  /// Total polynomial degree in `vars`; nullopt if some term is not polynomial in them.
  std::optional<int> degree_in(const std::set<std::string>& vars) const;

  bool all_exact() const {
    for (const auto& [k, t] : terms_)
      if (!t.coeff.is_exact()) return false;
    return true;
  }

  /// Terms are linearly independent functions: exact coefficients, no opaque
  /// atoms, exp arguments polynomial with exact coefficients and no constant term.
  bool in_decidable_class() const;

  Expr to_expr() const;
  std::string str() const;

 private:
  std::map<std::string, Term> terms_;
};

// ---------------------------------------------------------------------------

inline std::string Monomial::key() const {
  std::string out;
  auto append = [&](const std::string& part) {
    if (!out.empty()) out += "*";
    out += part;
  };
  for (const auto& [name, p] : vars) append(p == 1 ? name : name + "^" + std::to_string(p));
  if (exp_arg) append("exp(" + exp_arg->str() + ")");
  for (const auto& [k, bp] : opaque) append("{" + k + "}^" + std::to_string(bp.second));
  return out;
}

inline Expr Monomial::to_expr() const {
  std::vector<Expr> factors;
  for (const auto& [name, p] : vars) factors.push_back(power(var(name), p));
  if (exp_arg) factors.push_back(exp(exp_arg->to_expr()));
  for (const auto& [k, bp] : opaque) factors.push_back(power(bp.first, bp.second));
  return product(factors);
}

namespace detail {

inline Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (const auto& [name, p] : b.vars) {
    int q = (m.vars[name] += p);
    if (q == 0) m.vars.erase(name);
  }
  if (b.exp_arg) {
    if (m.exp_arg) {
      NormalForm s = *m.exp_arg + *b.exp_arg;
      m.exp_arg = s.empty() ? nullptr : std::make_shared<const NormalForm>(std::move(s));
    } else {
      m.exp_arg = b.exp_arg;
    }
  }
  for (const auto& [k, bp] : b.opaque) {
    auto it = m.opaque.find(k);
    if (it == m.opaque.end()) {
      m.opaque.emplace(k, bp);
    } else {
      it->second.second += bp.second;
      if (it->second.second == 0) m.opaque.erase(it);
    }
  }
  return m;
}

inline Monomial invert(const Monomial& a) {
  Monomial m;
  for (const auto& [name, p] : a.vars) m.vars[name] = -p;
  if (a.exp_arg) m.exp_arg = std::make_shared<const NormalForm>(-*a.exp_arg);
  for (const auto& [k, bp] : a.opaque) m.opaque.emplace(k, std::make_pair(bp.first, -bp.second));
  return m;
}

inline NormalForm exp_of(const NormalForm& arg) {
  if (arg.empty()) return NormalForm::constant(Coefficient(1));
  Monomial m;
  m.exp_arg = std::make_shared<const NormalForm>(arg);
  NormalForm nf;
  nf.add_term(m, Coefficient(1));
  return nf;
}

}  // namespace detail

inline NormalForm operator*(const NormalForm& a, const NormalForm& b) {
  NormalForm out;
  for (const auto& [ka, ta] : a.terms_)
    for (const auto& [kb, tb] : b.terms_) out.add_term(detail::multiply(ta.monomial, tb.monomial), ta.coeff * tb.coeff);
  return out;
}

inline NormalForm NormalForm::pow(int n) const {
  if (n == 0) return constant(Coefficient(1));
  if (n < 0) {
    if (terms_.empty()) throw std::domain_error("division by zero");
    if (terms_.size() == 1) {
      const Term& t = terms_.begin()->second;
      NormalForm inv;
      inv.add_term(detail::invert(t.monomial), Coefficient(1) / t.coeff);
      return inv.pow(-n);
    }
    Monomial m;
    m.opaque.emplace(str(), std::make_pair(to_expr(), n));
    NormalForm nf;
    nf.add_term(m, Coefficient(1));
    return nf;
  }
  NormalForm result = constant(Coefficient(1));
  NormalForm base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

inline NormalForm NormalForm::from_expr(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant:
      return constant(e.constant());
    case Kind::Variable:
      return variable(e.name());
    case Kind::Sum: {
      NormalForm out;
      for (const auto& a : e.args()) out = out + from_expr(a);
      return out;
    }
    case Kind::Product: {
      NormalForm out = constant(Coefficient(1));
      for (const auto& a : e.args()) out = out * from_expr(a);
      return out;
    }
    case Kind::Power:
      return from_expr(e.args()[0]).pow(e.node().exponent);
    case Kind::Exp:
      return detail::exp_of(from_expr(e.args()[0]));
    case Kind::Sin:
    case Kind::Cos: {
      NormalForm ia = from_expr(e.args()[0]).scaled(Coefficient::i());
      NormalForm plus = detail::exp_of(ia), minus = detail::exp_of(-ia);
      if (e.kind() == Kind::Cos) return (plus + minus).scaled(Rational(1, 2));
      return (plus - minus).scaled(GaussianRational(0, Rational(-1, 2)));
    }
  }
  return {};
}

inline NormalForm NormalForm::derivative(const std::string& v) const {
  NormalForm out;
  for (const auto& [k, t] : terms_) {
    const Monomial& m = t.monomial;
    if (auto it = m.vars.find(v); it != m.vars.end()) {
      Monomial d = m;
      int p = it->second;
      if (p - 1 == 0)
        d.vars.erase(v);
      else
        d.vars[v] = p - 1;
      out.add_term(d, t.coeff * Coefficient(p));
    }
    NormalForm single;
    single.add_term(m, t.coeff);
    if (m.exp_arg && m.exp_arg->depends_on(v)) out = out + single * m.exp_arg->derivative(v);
    for (const auto& [ok, bp] : m.opaque) {
      if (!expr::depends_on(bp.first, v)) continue;
      Monomial d = m;
      if (bp.second - 1 == 0)
        d.opaque.erase(ok);
      else
        d.opaque[ok].second = bp.second - 1;
      NormalForm lead;
      lead.add_term(d, t.coeff * Coefficient(bp.second));
      out = out + lead * from_expr(differentiate(bp.first, v));
    }
  }
  return out;
}

inline bool NormalForm::depends_on(const std::string& v) const {
  for (const auto& [k, t] : terms_) {
    const Monomial& m = t.monomial;
    if (m.vars.count(v)) return true;
    if (m.exp_arg && m.exp_arg->depends_on(v)) return true;
    for (const auto& [ok, bp] : m.opaque)
      if (expr::depends_on(bp.first, v)) return true;
  }
  return false;
}

inline std::set<std::string> NormalForm::variables() const {
  std::set<std::string> out;
  for (const auto& [k, t] : terms_) {
    const Monomial& m = t.monomial;
    for (const auto& [name, p] : m.vars) out.insert(name);
    if (m.exp_arg) {
      auto inner = m.exp_arg->variables();
      out.insert(inner.begin(), inner.end());
    }
    for (const auto& [ok, bp] : m.opaque) collect_variables(bp.first, out);
  }
  return out;
}

inline std::optional<int> NormalForm::degree_in(const std::set<std::string>& vars) const {
  int degree = 0;
  for (const auto& [k, t] : terms_) {
    const Monomial& m = t.monomial;
    int d = 0;
    for (const auto& [name, p] : m.vars) {
      if (!vars.count(name)) continue;
      if (p < 0) return std::nullopt;
      d += p;
    }
    for (const auto& v : vars) {
      if (m.exp_arg && m.exp_arg->depends_on(v)) return std::nullopt;
      for (const auto& [ok, bp] : m.opaque)
        if (expr::depends_on(bp.first, v)) return std::nullopt;
    }
    degree = std::max(degree, d);
  }
  return degree;
}

inline bool NormalForm::in_decidable_class() const {
  for (const auto& [k, t] : terms_) {
    if (!t.coeff.is_exact()) return false;
    const Monomial& m = t.monomial;
    if (!m.opaque.empty()) return false;
    if (!m.exp_arg) continue;
    const NormalForm& arg = *m.exp_arg;
    if (!arg.all_exact()) return false;
    for (const auto& [ak, at] : arg.terms()) {
      if (ak.empty()) return false;
      const Monomial& am = at.monomial;
      if (am.exp_arg || !am.opaque.empty()) return false;
      for (const auto& [name, p] : am.vars)
        if (p < 0) return false;
    }
  }
  return true;
}

inline Expr NormalForm::to_expr() const {
  std::vector<Expr> terms;
  for (const auto& [k, t] : terms_) terms.push_back(product({Expr(t.coeff), t.monomial.to_expr()}));
  return sum(terms);
}

inline std::string NormalForm::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [k, t] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + t.coeff.str() + ")";
    if (!k.empty()) out += "*" + k;
  }
  return out;
}

inline Expr simplify(const Expr& e) { return NormalForm::from_expr(e).to_expr(); }

// ---------------------------------------------------------------------------
// Zero testing

inline constexpr std::uint64_t kZeroTestSeed = 20240611;
inline constexpr int kZeroTestSamples = 32;
inline constexpr double kZeroTestThreshold = 1e-10;

struct ZeroVerdict {
  enum class Path { Symbolic, Numeric };
  bool zero = false;
  Path path = Path::Symbolic;
  double max_abs = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;

  std::string path_name() const { return path == Path::Symbolic ? "symbolic" : "numeric-decided"; }
};

inline ZeroVerdict is_zero(const NormalForm& nf, std::uint64_t seed = kZeroTestSeed) {
  ZeroVerdict v;
  v.seed = seed;
  if (nf.empty()) {
    v.zero = true;
    return v;
  }
  if (nf.in_decidable_class()) {
    v.zero = false;
    v.max_abs = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  v.path = ZeroVerdict::Path::Numeric;
  std::vector<std::string> names;
  for (const auto& n : nf.variables()) names.push_back(n);
  Compiled f = compile(nf.to_expr(), names);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> point(names.size());
  int attempts = 0;
  while (v.samples < kZeroTestSamples && attempts < 8 * kZeroTestSamples) {
    ++attempts;
    for (auto& x : point) x = dist(rng);
    cplx value = f(point);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) continue;
    v.max_abs = std::max(v.max_abs, std::abs(value));
    ++v.samples;
  }
  v.zero = v.samples > 0 && v.max_abs <= kZeroTestThreshold;
  return v;
}

inline ZeroVerdict is_zero(const Expr& e, std::uint64_t seed = kZeroTestSeed) {
  return is_zero(NormalForm::from_expr(e), seed);
}

}  // namespace mm3::expr
