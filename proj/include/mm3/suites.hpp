#pragma once

#include "mm3/parallel.hpp"
#include "mm3/polarization.hpp"
#include "mm3/repn.hpp"
#include "mm3/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace mm3::suites {

using report::Json;
using report::Report;
using expr::Expr;
using expr::NormalForm;

struct Options {
  std::vector<Rational> lambdas = {Rational(1, 2), Rational(1), Rational(3)};
  std::string bivector = "solved";  // printed | kirillov | solved
  int grid_theta = 16, grid_phi = 32;
  int n = 256;
  double extent = 12.0;
  std::optional<std::pair<GaussianRational, GaussianRational>> chi;
  int rep_samples = 50;
  int unitarity_samples = 50;
  int associativity_samples = 100;
  std::string csv;  // path, empty for none
};

inline std::string rational_json(const Rational& r) { return to_string(r); }

inline Json lambdas_json(const std::vector<Rational>& ls) {
  Json j = Json::array();
  for (const auto& l : ls) j.push_back(rational_json(l));
  return j;
}

inline Json matrix_json(const orbit::Matrix4Q& m) {
  Json j = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(rational_json(v));
    j.push_back(r);
  }
  return j;
}

inline std::string tag(const std::string& name, const Rational& lambda) { return name + " [lambda=" + to_string(lambda) + "]"; }

/// Writes rows to `path`; the first row is the header.
inline void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << "\n";
  }
}

inline std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// Lie algebra

inline lie::Matrix4Q commutator(const lie::Matrix4Q& a, const lie::Matrix4Q& b) {
  lie::Matrix4Q out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Rational v = 0;
      for (int k = 0; k < 4; ++k) v += a[i][k] * b[k][j] - b[i][k] * a[k][j];
      out[i][j] = v;
    }
  return out;
}

inline double max_abs(const lie::Matrix4Q& a, const lie::Matrix4Q& b) {
  double m = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(to_double(Rational(a[i][j] - b[i][j]))));
  return m;
}

inline void run_algebra(Report& rep) {
  double brackets = 0;
  int mismatched = 0;
  Json table = Json::array();
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) {
      auto lhs = lie::bracket(lie::basis(i), lie::basis(j)).to_matrix();
      auto rhs = commutator(lie::basis(i).to_matrix(), lie::basis(j).to_matrix());
      double d = max_abs(lhs, rhs);
      brackets = std::max(brackets, d);
      mismatched += d != 0;
      table.push_back({{"pair", std::string(lie::basis_name(i)) + "," + lie::basis_name(j)},
                       {"bracket", lie::bracket(lie::basis(i), lie::basis(j)).str()},
                       {"residual", d}});
    }
  rep.check("basis brackets vs matrix commutator", "lie-bracket", brackets, "symbolic").detail = {{"pairs", 36},
                                                                                               {"mismatched", mismatched}};
  double jacobi = 0;
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j)
      for (int k = 1; k <= 6; ++k) {
        auto a = lie::basis(i), b = lie::basis(j), c = lie::basis(k);
        auto s1 = lie::bracket(a, lie::bracket(b, c)), s2 = lie::bracket(b, lie::bracket(c, a)),
             s3 = lie::bracket(c, lie::bracket(a, b));
        for (int q = 0; q < 6; ++q) jacobi = std::max(jacobi, std::abs(to_double(Rational(s1.c[q] + s2.c[q] + s3.c[q]))));
      }
  rep.check("Jacobi identity on basis triples", "lie-bracket", jacobi, "symbolic").detail = {{"triples", 216}};
  rep.output() = {{"brackets", table}};
}

// ---------------------------------------------------------------------------
// Covariance and star algebra

struct ChosenBivector {
  orbit::Matrix4Q w;
  Json info;
};

inline ChosenBivector choose_bivector(const std::string& name, const Rational& lambda) {
  if (name == "printed") return {orbit::printed_matrix(), {{"kind", "printed"}}};
  if (name == "kirillov") return {orbit::kirillov_matrix(lambda).form, {{"kind", "kirillov"}}};
  if (name == "solved") {
    auto s = moyal::solve_bivector(lambda);
    Json info = {{"kind", "solved"},
                 {"exact", s.fit.exact},
                 {"rank", s.fit.rank},
                 {"equations", s.fit.equations},
                 {"proportional_to_printed", s.comparison.proportional}};
    info["scale"] = s.comparison.factor ? Json(rational_json(*s.comparison.factor)) : Json(nullptr);
    info["least_squares_scale"] = s.comparison.best_scale ? Json(rational_json(*s.comparison.best_scale)) : Json(nullptr);
    return {s.fit.real(), info};
  }
  throw std::invalid_argument("bivector must be printed, kirillov or solved");
}

inline std::vector<std::pair<int, int>> basis_pairs() {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) out.push_back({i, j});
  return out;
}

inline void run_covariance(Report& rep, const Options& opt) {
  Json out = Json::array();
  for (const auto& lam : opt.lambdas) {
    auto chosen = choose_bivector(opt.bivector, lam);
    chosen.info["matrix"] = matrix_json(chosen.w);
    auto cfg = moyal::make_config(chosen.w);
    auto form = orbit::kirillov_matrix(lam).form;
    double higher = 0, bracket = 0, origin = 0;
    int origin_failures = 0;
    Json table = Json::array();
    for (auto [i, j] : basis_pairs()) {
      auto r = moyal::covariance_report(lie::basis(i), lie::basis(j), lam, cfg, form);
      double p = std::max(report::magnitude(r.p2.value, r.p2.verdict), report::magnitude(r.p3.value, r.p3.verdict));
      double a = report::magnitude(r.a.value, r.a.verdict);
      double c = report::magnitude(r.c_origin.value, r.c_origin.verdict);
      higher = std::max(higher, p);
      bracket = std::max(bracket, a);
      origin = std::max(origin, c);
      origin_failures += c != 0;
      table.push_back({{"pair", std::string(lie::basis_name(i)) + "," + lie::basis_name(j)},
                       {"higher_orders", p},
                       {"bracket_minus_p1", a},
                       {"origin_residual", c}});
    }
    rep.check(tag("P2 and P3 vanish on energy pairs", lam), "covariance", higher, "symbolic");
    rep.check(tag("Moyal bracket equals P1", lam), "covariance", bracket, "symbolic");
    rep.check(tag("origin residual against the bracket energy under " + opt.bivector + " bivector", lam), "covariance",
              origin, "symbolic")
        .detail = {{"failing_pairs", origin_failures}, {"bivector", chosen.info}};

    // the axial energy convention, for comparison
    auto axial = moyal::solve_bivector(lam, orbit::EnergyConvention::Axial);
    double axial_origin = std::numeric_limits<double>::quiet_NaN();
    if (axial.fit.exact && axial.fit.is_real()) {
      auto acfg = moyal::make_config(axial.fit.real());
      axial_origin = 0;
      for (auto [i, j] : basis_pairs()) {
        auto r = moyal::covariance_report(lie::basis(i), lie::basis(j), lam, acfg, form, orbit::EnergyConvention::Axial);
        axial_origin = std::max(axial_origin, report::magnitude(r.c_origin.value, r.c_origin.verdict));
      }
    }
    Json adetail = {{"exact", axial.fit.exact}, {"rank", axial.fit.rank}};
    adetail["scale"] = axial.comparison.factor ? Json(rational_json(*axial.comparison.factor)) : Json(nullptr);
    rep.diagnostic(tag("origin residual with the axial energy convention", lam), "covariance", axial_origin, "symbolic")
        .detail = adetail;

    out.push_back({{"lambda", rational_json(lam)}, {"bivector", chosen.info}, {"pairs", table}});
  }
  rep.output()["covariance"] = out;
}

/// Random polynomial of degree at most `max_degree` in the chart variables.
inline Expr random_polynomial(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> c(-4, 4), var(0, 3), deg(0, max_degree), terms(1, 4);
  std::vector<Expr> out;
  int n = terms(rng);
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> f{Expr(Rational(c(rng), 2))};
    int d = deg(rng);
    for (int q = 0; q < d; ++q) f.push_back(expr::var(orbit::kChartVars[var(rng)]));
    out.push_back(expr::product(f));
  }
  return expr::sum(out);
}

inline void run_star_algebra(Report& rep, const Options& opt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto& lam : opt.lambdas) {
    auto cfg = moyal::make_config(orbit::kirillov_matrix(lam).form);
    double assoc = 0;
    for (int n = 0; n < opt.associativity_samples; ++n) {
      auto f = NormalForm::from_expr(random_polynomial(rng, 2)), g = NormalForm::from_expr(random_polynomial(rng, 2)),
           h = NormalForm::from_expr(random_polynomial(rng, 2));
      auto left = moyal::star(moyal::star(f, g, cfg).value, h, cfg).value;
      auto right = moyal::star(f, moyal::star(g, h, cfg).value, cfg).value;
      assoc = std::max(assoc, report::magnitude(left - right));
    }
    rep.check(tag("associativity on degree-2 triples", lam), "star-product", assoc, "symbolic").detail = {
        {"triples", opt.associativity_samples}};

    double trunc = 0;
    for (const char* fs : {"exp(-(s1^2+t2^2)/2)*s2", "exp(2*i*(s2*t1 + s1*t2))*t1^2", "sin(s1)*cos(t2) + s2^3"})
      for (const char* as : {"3*s1 - t2 + 1/2", "t1", "2*s2 + 5*t1 - 7"}) {
        auto f = NormalForm::from_expr(expr::parse(fs)), a = NormalForm::from_expr(expr::parse(as));
        auto r = moyal::star(f, a, cfg);
        auto diff = r.value - f * a - moyal::bidiff(f, a, 1, cfg.W).scaled(Coefficient(cfg.nu()));
        trunc = std::max(trunc, r.order == 1 && r.exact ? report::magnitude(diff) : 1.0);
      }
    rep.check(tag("two-term truncation for a linear right factor", lam), "star-product", trunc, "symbolic");
  }
}

// ---------------------------------------------------------------------------
// Fourier conjugation

inline void run_fourier(Report& rep, const Options& opt) {
  fourier::FourierGrid grid(opt.extent, opt.n);
  auto funcs = repn::conjugation_test_functions();
  std::vector<lie::AlgebraElement> dirs;
  for (int k = 1; k <= 6; ++k) dirs.push_back(lie::basis(k));
  std::vector<std::vector<std::string>> csv{{"lambda", "function", "direction", "t1", "t2", "residual"}};
  Json out = Json::array();
  for (const auto& lam : opt.lambdas) {
    auto w = orbit::kirillov_matrix(lam).form;
    std::vector<std::vector<repn::ConjugationResult>> results(funcs.size());
    parallel::for_each_index(funcs.size(), [&](std::size_t k) {
      results[k] = repn::conjugation_checks(dirs, lam, expr::parse(funcs[k]), grid, w);
    });
    double worst = 0, decay = 0;
    Json table = Json::array();
    for (std::size_t k = 0; k < funcs.size(); ++k)
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto& r = results[k][d];
        worst = std::max(worst, r.residual);
        decay = std::max(decay, r.boundary_ratio);
        table.push_back({{"function", funcs[k]}, {"direction", lie::basis_name(int(d) + 1)}, {"residual", r.residual}});
        auto tp = repn::default_t_points();
        for (std::size_t p = 0; p < tp.size(); ++p)
          csv.push_back({to_string(lam), "\"" + funcs[k] + "\"", lie::basis_name(int(d) + 1), num(tp[p][0]), num(tp[p][1]),
                         num(r.per_point[p])});
      }
    rep.check(tag("conjugated operator vs transformed star operator", lam), "fourier-conjugation", worst, "fft").detail =
        {{"functions", funcs.size()}, {"directions", 6}, {"boundary_ratio", decay}};
    out.push_back({{"lambda", rational_json(lam)}, {"checks", table}});
  }

  // Parseval and the self-dual Gaussian, on s-space samples of the test functions
  double parseval = 0;
  for (const auto& fs : funcs) {
    auto c = expr::compile(expr::parse(fs), repn::kFiberVars);
    auto samples = grid.sample_s([&](double a, double b) {
      double x[4] = {a, b, 0.3, -0.5};
      return c(std::span<const double>(x, 4));
    });
    parseval = std::max(parseval, fourier::parseval_defect(samples, grid));
  }
  rep.check("Parseval on the test functions", "fourier-conjugation", parseval, "parseval");
  auto gauss = [](double a, double b) { return cplx(std::exp(-(a * a + b * b) / 2)); };
  auto ft = fourier::forward(grid.sample_s(gauss), grid);
  auto expect = grid.sample_eta(gauss);
  double self = 0;
  for (std::size_t k = 0; k < ft.size(); ++k) self = std::max(self, std::abs(ft[k] - expect[k]));
  rep.check("Gaussian is its own transform", "fourier-conjugation", self, "fft");

  // the other sign of the bivector does not conjugate to the formula
  auto neg = repn::conjugation_checks(dirs, opt.lambdas.front(),
                                      expr::parse(funcs.front()), grid,
                                      orbit::scaled(orbit::kirillov_matrix(opt.lambdas.front()).form, -1));
  double neg_worst = 0;
  for (const auto& r : neg) neg_worst = std::max(neg_worst, r.residual);
  rep.diagnostic(tag("conjugation with the negated bivector", opt.lambdas.front()), "fourier-conjugation", neg_worst,
                 "fft");

  rep.output()["fourier"] = out;
  if (!opt.csv.empty()) write_csv(opt.csv, csv);
}

// ---------------------------------------------------------------------------
// Representation on the sphere

inline void run_rep(Report& rep, const Options& opt, std::uint64_t seed) {
  sphere::QuadratureGrid grid(opt.grid_theta, opt.grid_phi);
  auto fs = sphere::test_set();
  std::vector<std::vector<std::string>> csv{{"lambda", "sigma1", "sigma2", "sigma3", "function", "re", "im"}};
  for (const auto& lam : opt.lambdas) {
    const double l = to_double(lam);
    std::mt19937_64 rng(seed);
    std::vector<lie::GroupElement> gs, hs;
    for (int k = 0; k < opt.rep_samples; ++k) gs.push_back(repn::random_group_element(rng));
    for (int k = 0; k < opt.rep_samples; ++k) hs.push_back(repn::random_group_element(rng));

    std::vector<double> ref(gs.size()), hom(gs.size());
    parallel::for_each_index(gs.size(), [&](std::size_t k) {
      double a = 0, b = 0;
      for (const auto& f : fs) {
        a = std::max(a, repn::reference_residual(gs[k], l, f, grid));
        b = std::max(b, repn::homomorphism_residual(gs[k], hs[k], l, f, grid));
      }
      ref[k] = a;
      hom[k] = b;
    });
    rep.check(tag("factored unitary vs reference action", lam), "unitary-rep", *std::max_element(ref.begin(), ref.end()),
              "pointwise")
        .detail = {{"elements", gs.size()}, {"functions", fs.size()}};
    rep.check(tag("homomorphism U(g)U(h) = U(gh)", lam), "unitary-rep", *std::max_element(hom.begin(), hom.end()),
              "pointwise")
        .detail = {{"pairs", gs.size()}};

    const std::size_t nu = std::min<std::size_t>(opt.unitarity_samples, gs.size());
    std::vector<repn::UnitarityResult> uni(nu);
    parallel::for_each_index(nu, [&](std::size_t k) {
      uni[k] = repn::unitarity_check(gs[k], l, fs[k % fs.size()], fs[(k + 1) % fs.size()]);
    });
    double dev = 0;
    int unconverged = 0, max_theta = 0;
    for (const auto& u : uni) {
      dev = std::max(dev, u.deviation);
      unconverged += !u.converged;
      max_theta = std::max(max_theta, u.n_theta);
    }
    rep.check(tag("unitarity of the inner product", lam), "unitary-rep", dev, "quadrature").detail = {
        {"elements", nu}, {"unconverged", unconverged}, {"max_n_theta", max_theta}};

    // infinitesimal generators
    double inf = 0, inf_i = 0, cauchy = 0, brack = 0;
    int symbolic_nonzero = 0;
    std::vector<double> inf_slots(6), infi_slots(6), cauchy_slots(6);
    parallel::for_each_index(6, [&](std::size_t k) {
      double a = 0, b = 0, c = 0;
      for (const auto& f : fs) {
        a = std::max(a, repn::infinitesimal_residual(lie::basis(int(k) + 1), lam, f, grid));
        b = std::max(b, repn::infinitesimal_residual_i_convention(lie::basis(int(k) + 1), lam, f, grid));
        c = std::max(c, repn::cauchy_residual(lie::basis(int(k) + 1), lam, f, grid));
      }
      inf_slots[k] = a;
      infi_slots[k] = b;
      cauchy_slots[k] = c;
    });
    for (int k = 0; k < 6; ++k) {
      inf = std::max(inf, inf_slots[k]);
      inf_i = std::max(inf_i, infi_slots[k]);
      cauchy = std::max(cauchy, cauchy_slots[k]);
    }
    rep.check(tag("central difference vs generator operators", lam), "infinitesimal-generator", inf, "fd").detail = {
        {"step", repn::kInfinitesimalStep}};
    rep.check(tag("Cauchy problem along one-parameter subgroups", lam), "infinitesimal-generator", cauchy, "fd");
    rep.diagnostic(tag("central difference with X read as i d/ds", lam), "infinitesimal-generator", inf_i, "fd");

    for (auto [i, j] : basis_pairs())
      for (const auto& f : fs) {
        auto r = repn::generator_bracket_residual(lie::basis(i), lie::basis(j), lam, f, grid);
        brack = std::max(brack, r.sup);
        symbolic_nonzero += !r.verdict.zero;
      }
    rep.check(tag("generator bracket relations", lam), "infinitesimal-generator", brack, "bracket").detail = {
        {"pairs", 36}, {"symbolic_nonzero", symbolic_nonzero}};

    if (!opt.csv.empty() && !gs.empty()) {
      auto op = repn::unitary(gs.front(), l);
      auto names = sphere::test_set_names();
      for (std::size_t q = 0; q < fs.size(); ++q) {
        auto uf = op.apply(fs[q]);
        for (const auto& p : grid.nodes) {
          cplx v = uf(p);
          csv.push_back({to_string(lam), num(p[0]), num(p[1]), num(p[2]), names[q], num(v.real()), num(v.imag())});
        }
      }
    }
  }
  rep.config()["grid"] = {opt.grid_theta, opt.grid_phi};
  if (!opt.csv.empty()) write_csv(opt.csv, csv);
}

// ---------------------------------------------------------------------------
// Polarization

inline void run_polarization(Report& rep, const Options& opt) {
  std::vector<std::pair<GaussianRational, GaussianRational>> chis;
  if (opt.chi)
    chis.push_back(*opt.chi);
  else
    for (const auto& a : polarization::chi_grid_values())
      for (const auto& b : polarization::chi_grid_values()) chis.push_back({a, b});
  Json out = Json::array();
  for (const auto& lam : opt.lambdas) {
    auto fit = polarization::fit_polarization_bivector(lam);
    if (!fit.exact || !fit.is_real()) {
      rep.check(tag("polarization bivector fit", lam), "star-polarization", std::numeric_limits<double>::quiet_NaN(),
                "symbolic");
      continue;
    }
    auto w = fit.real();
    auto cfg = moyal::make_config(w);
    double eigen = 0, ode = 0;
    int cases = 0;
    for (const auto& [c1, c2] : chis) {
      polarization::Character chi{c1, c2, lam};
      for (const auto& p : polarization::profile_family()) {
        auto f = polarization::make_f_chi(chi, expr::parse(p));
        for (int i = 1; i <= 3; ++i) {
          auto r = polarization::eigen_check(f.f, i, chi, cfg);
          eigen = std::max(eigen, report::magnitude(r.value, r.verdict));
        }
        for (auto pairing : {std::pair{1, 2}, std::pair{2, 1}})
          ode = std::max(ode, report::magnitude(polarization::ode_residual(f.f, chi, pairing)));
        ++cases;
      }
    }
    rep.check(tag("star eigenvalue equation on the polarized family", lam), "star-polarization", eigen, "symbolic")
        .detail = {{"functions", cases}, {"directions", 3}};
    rep.check(tag("first-order equations on the polarized family", lam), "star-polarization", ode, "symbolic").detail = {
        {"functions", cases}, {"pairings", "(1,2),(2,1)"}};

    // the Kirillov form polarizes only the third direction
    auto kcfg = moyal::make_config(orbit::kirillov_matrix(lam).form);
    polarization::Character chi{chis.front().first, chis.front().second, lam};
    auto f = polarization::make_f_chi(chi, Expr(1));
    rep.diagnostic(tag("eigenvalue equation for E~2 under the Kirillov form", lam), "star-polarization",
                   report::magnitude(polarization::eigen_check(f.f, 2, chi, kcfg).value), "symbolic");

    auto demo = polarization::superposition_demo(to_double(lam), 1.5);
    rep.diagnostic(tag("superposition over a chi box: quadrature vs closed form", lam), "star-polarization",
                   demo.max_error, "quadrature")
        .detail = {{"norm2_window", demo.norm2_window}, {"norm2_exact", demo.norm2_exact}, {"tail_bound", demo.tail_bound}};

    Json free = Json::array();
    for (const auto& u : fit.free_unknowns) free.push_back(u);
    out.push_back({{"lambda", rational_json(lam)}, {"bivector", matrix_json(w)}, {"rank", fit.rank}, {"free", free}});
  }
  Json cj = Json::array();
  for (const auto& [a, b] : chis) cj.push_back({Coefficient(a).str(), Coefficient(b).str()});
  rep.config()["chi"] = cj;
  rep.output()["polarization"] = out;
}

}  // namespace mm3::suites
