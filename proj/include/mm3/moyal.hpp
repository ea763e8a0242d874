#pragma once

#include "mm3/linsolve.hpp"
#include "mm3/normal_form.hpp"
#include "mm3/orbit.hpp"

#include <functional>
#include <optional>

namespace mm3::moyal {

using expr::Expr;
using expr::NormalForm;
using orbit::Matrix4Q;

/// 4x4 bivector over (s1, s2, t1, t2); entries may contain symbolic unknowns.
using Bivector = std::array<std::array<NormalForm, 4>, 4>;

inline Bivector to_bivector(const Matrix4Q& m) {
  Bivector w;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) w[i][j] = NormalForm::constant(Coefficient(m[i][j]));
  return w;
}

/// Name of the unknown for the (a, b) entry, a < b, zero based.
inline std::string unknown_name(int a, int b) { return "__w" + std::to_string(a + 1) + std::to_string(b + 1); }

inline std::vector<std::pair<int, int>> upper_pairs() {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) out.emplace_back(a, b);
  return out;
}

/// Antisymmetric bivector whose six upper entries are unknowns.
inline Bivector symbolic_bivector() {
  Bivector w;
  for (auto [a, b] : upper_pairs()) {
    w[a][b] = NormalForm::variable(unknown_name(a, b));
    w[b][a] = -w[a][b];
  }
  return w;
}

struct StarConfig {
  Rational hbar = 1;
  Bivector W;
  std::optional<int> max_order;  // nullopt: exact, the series must terminate

  /// nu = hbar / (2i).
  GaussianRational nu() const { return GaussianRational(0, -hbar / 2); }
};

inline StarConfig make_config(const Matrix4Q& w, std::optional<int> max_order = std::nullopt) {
  StarConfig c;
  c.W = to_bivector(w);
  c.max_order = max_order;
  return c;
}

namespace detail {

using MultiIndex = std::array<int, 4>;

class DerivativeCache {
 public:
  explicit DerivativeCache(const NormalForm& f) { cache_.emplace(MultiIndex{0, 0, 0, 0}, f); }

  const NormalForm& get(const MultiIndex& alpha) {
    if (auto it = cache_.find(alpha); it != cache_.end()) return it->second;
    int k = 0;
    while (alpha[k] == 0) ++k;
    MultiIndex lower = alpha;
    --lower[k];
    NormalForm d = get(lower).derivative(orbit::kChartVars[k]);
    return cache_.emplace(alpha, std::move(d)).first->second;
  }

 private:
  std::map<MultiIndex, NormalForm> cache_;
};

struct Entry {
  int i, j;
  const NormalForm* w;
};

inline std::vector<Entry> nonzero_entries(const Bivector& w) {
  std::vector<Entry> out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!w[i][j].empty()) out.push_back({i, j, &w[i][j]});
  return out;
}

/// Sum over multisets of entries of size r of  weight(m) * prod w_e^{m_e} d^alpha f d^beta g,
/// with weight(m) = scale / prod m_e!.
inline NormalForm contract(const std::vector<Entry>& entries, int r, DerivativeCache& df, DerivativeCache& dg,
                           const Coefficient& scale) {
  NormalForm out;
  std::vector<int> mult(entries.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t e, int left) {
    if (e == entries.size()) {
      if (left != 0) return;
      MultiIndex alpha{0, 0, 0, 0}, beta{0, 0, 0, 0};
      Rational denom = 1;
      NormalForm weight = NormalForm::constant(Coefficient(1));
      for (std::size_t k = 0; k < entries.size(); ++k) {
        if (mult[k] == 0) continue;
        alpha[entries[k].i] += mult[k];
        beta[entries[k].j] += mult[k];
        for (int q = 2; q <= mult[k]; ++q) denom *= q;
        weight = weight * entries[k].w->pow(mult[k]);
      }
      const NormalForm& a = df.get(alpha);
      if (a.empty()) return;
      const NormalForm& b = dg.get(beta);
      if (b.empty()) return;
      out = out + (weight * a * b).scaled(scale / Coefficient(denom));
      return;
    }
    for (int m = left; m >= 0; --m) {
      mult[e] = m;
      rec(e + 1, left - m);
    }
    mult[e] = 0;
  };
  rec(0, r);
  return out;
}

inline Rational factorial(int r) {
  Rational f = 1;
  for (int q = 2; q <= r; ++q) f *= q;
  return f;
}

inline std::set<std::string> chart_set() { return {orbit::kChartVars.begin(), orbit::kChartVars.end()}; }

}  // namespace detail

/// P^r(f, g) = sum over index tuples of w^{i1 j1}...w^{ir jr} d_{i1..ir} f d_{j1..jr} g.
inline NormalForm bidiff(const NormalForm& f, const NormalForm& g, int r, const Bivector& w) {
  if (r <= 0) throw std::invalid_argument("bidifferential order must be at least 1");
  detail::DerivativeCache df(f), dg(g);
  return detail::contract(detail::nonzero_entries(w), r, df, dg, Coefficient(detail::factorial(r)));
}

inline Expr bidiff(const Expr& f, const Expr& g, int r, const Bivector& w) {
  return bidiff(NormalForm::from_expr(f), NormalForm::from_expr(g), r, w).to_expr();
}

struct StarResult {
  NormalForm value;
  int order = 0;       // highest r included
  bool exact = true;   // false when the series was cut at max_order
};

/// f * g + sum_r nu^r / r! P^r(f, g).
inline StarResult star(const NormalForm& f, const NormalForm& g, const StarConfig& cfg) {
  auto chart = detail::chart_set();
  auto df_deg = f.degree_in(chart), dg_deg = g.degree_in(chart);
  std::optional<int> needed;
  if (df_deg && dg_deg)
    needed = std::min(*df_deg, *dg_deg);
  else if (df_deg)
    needed = *df_deg;
  else if (dg_deg)
    needed = *dg_deg;
  StarResult out;
  if (cfg.max_order && *cfg.max_order < 1) throw std::invalid_argument("max_order must be at least 1");
  if (!needed && !cfg.max_order) throw std::domain_error("star series does not terminate; set max_order");
  int order = needed.value_or(0);
  if (cfg.max_order && (!needed || *needed > *cfg.max_order)) {
    order = *cfg.max_order;
    out.exact = false;
  }
  out.order = order;
  out.value = f * g;
  detail::DerivativeCache df(f), dg(g);
  auto entries = detail::nonzero_entries(cfg.W);
  Coefficient nu_r(1);
  for (int r = 1; r <= order; ++r) {
    nu_r *= Coefficient(cfg.nu());
    // nu^r / r! * P^r, with P^r's r! multinomial factor cancelled.
    out.value = out.value + detail::contract(entries, r, df, dg, nu_r);
  }
  return out;
}

inline StarResult star(const Expr& f, const Expr& g, const StarConfig& cfg) {
  return star(NormalForm::from_expr(f), NormalForm::from_expr(g), cfg);
}

/// (f * g - g * f) / (2 nu).
inline NormalForm moyal_bracket(const NormalForm& f, const NormalForm& g, const StarConfig& cfg) {
  auto fg = star(f, g, cfg), gf = star(g, f, cfg);
  return (fg.value - gf.value).scaled(Coefficient(1) / (Coefficient(cfg.nu()) * Coefficient(2)));
}

inline NormalForm poisson(const NormalForm& f, const NormalForm& g, const Bivector& w) { return bidiff(f, g, 1, w); }

// ---------------------------------------------------------------------------
// Covariance

struct Residual {
  NormalForm value;
  expr::ZeroVerdict verdict;
};

inline Residual make_residual(NormalForm v) {
  auto verdict = expr::is_zero(v);
  return {std::move(v), verdict};
}

struct CovarianceReport {
  Residual p2, p3;           // higher bidifferentials of two energies
  Residual a;                // bracket - P1
  Residual b;                // P1 - form value on Hamiltonian fields
  Residual c_function;       // P1 - energy([U,T])
  Residual c_origin;         // the same at the chart origin
};

inline NormalForm at_origin(const NormalForm& f) {
  std::map<std::string, Expr> zero;
  for (const auto& v : orbit::kChartVars) zero[v] = Expr(0);
  return NormalForm::from_expr(expr::substitute(f.to_expr(), zero));
}

/// `form` is the 2-form whose value on Hamiltonian fields is compared with P1.
inline CovarianceReport covariance_report(const lie::AlgebraElement& u, const lie::AlgebraElement& t,
                                          const Rational& lambda, const StarConfig& cfg, const Matrix4Q& form,
                                          orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  NormalForm U = NormalForm::from_expr(orbit::energy(u, lambda, conv));
  NormalForm T = NormalForm::from_expr(orbit::energy(t, lambda, conv));
  NormalForm bracket_energy = NormalForm::from_expr(orbit::energy(lie::bracket(u, t), lambda, conv));
  NormalForm p1 = bidiff(U, T, 1, cfg.W);
  CovarianceReport rep;
  rep.p2 = make_residual(bidiff(U, T, 2, cfg.W));
  rep.p3 = make_residual(bidiff(U, T, 3, cfg.W));
  rep.a = make_residual(moyal_bracket(U, T, cfg) - p1);
  Rational fv =
      orbit::form_value(form, orbit::hamiltonian_field(u, lambda, conv), orbit::hamiltonian_field(t, lambda, conv));
  rep.b = make_residual(p1 - NormalForm::constant(Coefficient(fv)));
  rep.c_function = make_residual(p1 - bracket_energy);
  rep.c_origin = make_residual(at_origin(p1 - bracket_energy));
  return rep;
}

// ---------------------------------------------------------------------------
// Bivector fitting

struct BivectorFit {
  std::array<std::array<GaussianRational, 4>, 4> W{};
  int rank = 0;
  int equations = 0;
  bool exact = false;
  std::vector<std::string> free_unknowns;
  std::vector<GaussianRational> residuals;

  bool is_real() const {
    for (const auto& row : W)
      for (const auto& v : row)
        if (!v.is_real()) return false;
    return true;
  }
  Matrix4Q real() const {
    Matrix4Q m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (!W[i][j].is_real()) throw std::domain_error("fitted bivector is not real");
        m[i][j] = W[i][j].re;
      }
    return m;
  }
};

/// Fits the six upper entries so that every residual built from the symbolic
/// bivector vanishes identically. Residuals must be affine in the unknowns;
/// each distinct monomial in the remaining variables gives one equation.
inline BivectorFit fit_bivector(const std::function<std::vector<NormalForm>(const Bivector&)>& residuals) {
  auto pairs = upper_pairs();
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < pairs.size(); ++k) index[unknown_name(pairs[k].first, pairs[k].second)] = static_cast<int>(k);
  const int n = static_cast<int>(pairs.size());

  std::map<std::pair<int, std::string>, std::pair<std::vector<GaussianRational>, GaussianRational>> rows;
  auto res = residuals(symbolic_bivector());
  for (std::size_t r = 0; r < res.size(); ++r) {
    for (const auto& [key, term] : res[r].terms()) {
      if (!term.coeff.is_exact()) throw std::domain_error("bivector fit needs exact residuals");
      expr::Monomial rest = term.monomial;
      int unknown = -1;
      for (auto it = rest.vars.begin(); it != rest.vars.end();) {
        if (auto f = index.find(it->first); f != index.end()) {
          if (it->second != 1 || unknown >= 0) throw std::domain_error("residual is not affine in the bivector");
          unknown = f->second;
          it = rest.vars.erase(it);
        } else {
          ++it;
        }
      }
      auto& row = rows[{static_cast<int>(r), rest.key()}];
      if (row.first.empty()) row.first.assign(n, GaussianRational());
      if (unknown >= 0)
        row.first[unknown] = row.first[unknown] + term.coeff.exact();
      else
        row.second = row.second - term.coeff.exact();
    }
  }
  std::vector<std::vector<GaussianRational>> a;
  std::vector<GaussianRational> b;
  for (auto& [k, row] : rows) {
    a.push_back(row.first);
    b.push_back(row.second);
  }
  auto sol = linsolve::least_squares(a, b, n);
  BivectorFit fit;
  fit.rank = sol.rank;
  fit.equations = static_cast<int>(a.size());
  fit.exact = sol.exact;
  fit.residuals = sol.residual;
  for (int c : sol.free_columns) fit.free_unknowns.push_back(unknown_name(pairs[c].first, pairs[c].second).substr(2));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [p, q] = pairs[k];
    fit.W[p][q] = sol.x[k];
    fit.W[q][p] = -sol.x[k];
  }
  return fit;
}

struct ProportionalityReport {
  bool proportional = false;                 // W = factor * M
  std::optional<Rational> factor;
  bool proportional_up_to_permutation = false;
  std::array<int, 4> permutation{0, 1, 2, 3};  // W[p(i)][p(j)] = factor * M[i][j]
  std::optional<Rational> permuted_factor;
  std::optional<Rational> best_scale;        // least squares c in W ~ c M
};

inline ProportionalityReport compare_with(const Matrix4Q& w, const Matrix4Q& m) {
  ProportionalityReport rep;
  auto match = [&](const std::array<int, 4>& p) -> std::optional<Rational> {
    std::optional<Rational> c;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const Rational& x = w[p[i]][p[j]];
        const Rational& y = m[i][j];
        if (y == 0) {
          if (x != 0) return std::nullopt;
          continue;
        }
        Rational r = x / y;
        if (c && *c != r) return std::nullopt;
        c = r;
      }
    if (c && *c == 0) return std::nullopt;
    return c;
  };
  rep.factor = match({0, 1, 2, 3});
  rep.proportional = rep.factor.has_value();
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    if (auto c = match(p)) {
      rep.proportional_up_to_permutation = true;
      rep.permutation = p;
      rep.permuted_factor = c;
      break;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  Rational num = 0, den = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      num += w[i][j] * m[i][j];
      den += m[i][j] * m[i][j];
    }
  if (den != 0) rep.best_scale = num / den;
  return rep;
}

struct SolvedBivector {
  BivectorFit fit;
  ProportionalityReport comparison;  // against the printed unit matrix
};

/// W* minimizing the chart-origin residuals P1(U~, T~) - energy([U,T]) over all basis pairs.
inline SolvedBivector solve_bivector(const Rational& lambda,
                                     orbit::EnergyConvention conv = orbit::EnergyConvention::Printed) {
  orbit::detail::require_positive(lambda);
  std::vector<NormalForm> energies;
  for (int k = 1; k <= 6; ++k) energies.push_back(NormalForm::from_expr(orbit::energy(lie::basis(k), lambda, conv)));
  auto residuals = [&](const Bivector& w) {
    std::vector<NormalForm> out;
    for (int i = 1; i <= 6; ++i)
      for (int j = 1; j <= 6; ++j) {
        NormalForm p1 = bidiff(energies[i - 1], energies[j - 1], 1, w);
        NormalForm target =
            NormalForm::constant(Coefficient(orbit::energy_at_origin(lie::bracket(lie::basis(i), lie::basis(j)), lambda)));
        out.push_back(at_origin(p1) - target);
      }
    return out;
  };
  SolvedBivector s;
  s.fit = fit_bivector(residuals);
  s.comparison = compare_with(s.fit.real(), orbit::printed_matrix());
  return s;
}

}  // namespace mm3::moyal
