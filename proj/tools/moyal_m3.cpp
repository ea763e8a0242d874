// moyal_m3: verification suites and small utilities for the M(3) construction.
#include "mm3/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace mm3;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, sep)) out.push_back(item);
  return out;
}

Rational positive_lambda(const std::string& text) {
  Rational l;
  try {
    l = parse_rational(text);
  } catch (const std::exception& e) {
    throw UsageError("bad --lambda value '" + text + "': " + e.what());
  }
  if (l <= 0) throw UsageError("lambda must be positive, got " + text);
  return l;
}

GaussianRational exact_constant(const std::string& text) {
  auto nf = expr::NormalForm::from_expr(expr::parse(text));
  auto c = nf.as_constant();
  if (!c || !c->is_exact()) throw UsageError("expected an exact constant, got '" + text + "'");
  return c->exact();
}

Eigen::Vector3d vector3(const std::string& text, const std::string& flag) {
  auto parts = split(text);
  if (parts.size() != 3) throw UsageError(flag + " needs three comma-separated numbers");
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) v[k] = std::stod(parts[k]);
  return v;
}

std::pair<double, double> pair2(const std::string& text, const std::string& flag) {
  auto parts = split(text);
  if (parts.size() != 2) throw UsageError(flag + " needs two comma-separated numbers");
  return {std::stod(parts[0]), std::stod(parts[1])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moyal quantization of M(3): verification suites"};
  app.set_version_flag("--version", report::kToolVersion);
  app.require_subcommand(1);

  std::string lambda_text, out_path, csv_path, bivector;
  std::uint64_t seed = expr::kZeroTestSeed;
  bool timing = false;
  report::Tolerances tol;
  std::map<std::string, double> tol_override;

  app.add_option("--lambda", lambda_text, "orbit parameter |alpha| > 0 (rational); default depends on the command");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--out", out_path, "write the JSON report to this file instead of stdout");
  app.add_option("--csv", csv_path, "write plot-ready samples to this CSV file");
  app.add_option("--bivector", bivector, "printed | kirillov | solved")
      ->check(CLI::IsMember({"printed", "kirillov", "solved"}));
  app.add_flag("--timing", timing, "print wall time to stderr");
  for (const auto& name : tol.names())
    app.add_option_function<double>(
        "--tol." + name, [&, name](double v) { tol_override[name] = v; },
        "tolerance '" + name + "' (default " + suites::num(tol.get(name)) + ")");

  auto* algebra = app.add_subcommand("verify-algebra", "bracket table and Jacobi identity");
  auto* covariance = app.add_subcommand("verify-covariance", "covariance of the star product and star algebra");
  auto* rep = app.add_subcommand("verify-rep", "unitary representation on the sphere");
  std::string grid_text;
  rep->add_option("--grid", grid_text, "quadrature nodes n_theta,n_phi (default 16,32)");
  auto* polar = app.add_subcommand("verify-polarization", "star-polarization family");
  std::string chi_text;
  polar->add_option("--chi", chi_text, "single character chi1,chi2 instead of the 3x3 grid");
  auto* fft = app.add_subcommand("fourier-check", "partial Fourier conjugation");
  int n = 256;
  double extent = 12;
  fft->add_option("--n", n, "grid points per axis (power of two)")->capture_default_str();
  fft->add_option("--extent", extent, "half-width L of the s grid")->capture_default_str();
  auto* orbit_cmd = app.add_subcommand("orbit", "coadjoint orbits");
  orbit_cmd->require_subcommand(1);
  auto* classify = orbit_cmd->add_subcommand("classify", "orbit type of a functional");
  std::string mu_text = "0,0,0", alpha_text = "0,0,0";
  classify->add_option("--mu", mu_text, "mu1,mu2,mu3")->capture_default_str();
  classify->add_option("--alpha", alpha_text, "alpha1,alpha2,alpha3")->capture_default_str();
  auto* chart = orbit_cmd->add_subcommand("chart", "functional at a chart point");
  std::string s_text = "0,0", t_text = "0,0";
  chart->add_option("--s", s_text, "s1,s2")->capture_default_str();
  chart->add_option("--t", t_text, "t1,t2")->capture_default_str();
  auto* star_eval = app.add_subcommand("star-eval", "star product of two expressions");
  std::string f_text, g_text;
  int order = 0;
  star_eval->add_option("f", f_text, "left factor")->required();
  star_eval->add_option("g", g_text, "right factor")->required();
  star_eval->add_option("--order", order, "truncation order for non-terminating series");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  for (auto* sub : orbit_cmd->get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    for (const auto& [k, v] : tol_override) tol.set(k, v);
    auto* sub = app.get_subcommands().front();
    std::string command = sub->get_name();
    if (sub == orbit_cmd) command += " " + orbit_cmd->get_subcommands().front()->get_name();

    suites::Options opt;
    opt.csv = csv_path;
    auto lambdas = [&](std::vector<Rational> fallback) {
      return lambda_text.empty() ? fallback : std::vector<Rational>{positive_lambda(lambda_text)};
    };

    report::Report r(command, seed, tol);
    r.config()["seed"] = seed;
    if (sub == algebra) {
      suites::run_algebra(r);
    } else if (sub == covariance) {
      opt.lambdas = lambdas(opt.lambdas);
      opt.bivector = bivector.empty() ? "solved" : bivector;
      r.config()["lambda"] = suites::lambdas_json(opt.lambdas);
      r.config()["bivector"] = opt.bivector;
      suites::run_covariance(r, opt);
      suites::run_star_algebra(r, opt, seed);
    } else if (sub == rep) {
      opt.lambdas = lambdas(opt.lambdas);
      if (!grid_text.empty()) {
        auto [a, b] = pair2(grid_text, "--grid");
        if (a < 1 || b < 1) throw UsageError("--grid counts must be positive");
        opt.grid_theta = int(a);
        opt.grid_phi = int(b);
      }
      r.config()["lambda"] = suites::lambdas_json(opt.lambdas);
      suites::run_rep(r, opt, seed);
    } else if (sub == polar) {
      opt.lambdas = lambdas(opt.lambdas);
      if (!chi_text.empty()) {
        auto parts = split(chi_text);
        if (parts.size() != 2) throw UsageError("--chi needs two comma-separated values");
        opt.chi = std::pair{exact_constant(parts[0]), exact_constant(parts[1])};
      }
      r.config()["lambda"] = suites::lambdas_json(opt.lambdas);
      suites::run_polarization(r, opt);
    } else if (sub == fft) {
      opt.lambdas = lambdas({Rational(1)});
      try {
        fourier::FourierGrid check(extent, n);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      opt.n = n;
      opt.extent = extent;
      r.config()["lambda"] = suites::lambdas_json(opt.lambdas);
      r.config()["n"] = n;
      r.config()["extent"] = extent;
      suites::run_fourier(r, opt);
    } else if (sub == orbit_cmd && classify->parsed()) {
      lie::DualFunctional f{vector3(mu_text, "--mu"), vector3(alpha_text, "--alpha")};
      auto c = orbit::classify(f);
      r.output() = {{"mu", {f.mu[0], f.mu[1], f.mu[2]}},
                    {"alpha", {f.alpha[0], f.alpha[1], f.alpha[2]}},
                    {"kind", c.name()},
                    {"radius", c.radius}};
    } else if (sub == orbit_cmd && chart->parsed()) {
      Rational lam = lambdas({Rational(1)}).front();
      double l = to_double(lam);
      auto [s1, s2] = pair2(s_text, "--s");
      auto [t1, t2] = pair2(t_text, "--t");
      auto coeffs = orbit::chart_to_functional({s1, s2, t1, t2}, l);
      auto c = orbit::classify(orbit::to_dual(coeffs));
      auto base = orbit::chart_base(t1, t2, l);
      r.config()["lambda"] = suites::rational_json(lam);
      r.output() = {{"point", {{"s1", s1}, {"s2", s2}, {"t1", t1}, {"t2", t2}}},
                    {"functional", coeffs},
                    {"base", {base[0], base[1], base[2]}},
                    {"kind", c.name()},
                    {"radius", c.radius}};
      // energies at the chart point against the pairing with the functional
      double pairing = 0;
      expr::Bindings at{{"s1", s1}, {"s2", s2}, {"t1", t1}, {"t2", t2}};
      for (int k = 1; k <= 6; ++k)
        pairing = std::max(pairing, std::abs(expr::evaluate(orbit::energy(lie::basis(k), lam), at) -
                                             orbit::coefficient_pairing(orbit::to_dual(coeffs), lie::basis(k))));
      r.check("energy functions equal the pairing at the chart point", "energy-function", pairing, "pointwise");
    } else if (sub == star_eval) {
      Rational lam = lambdas({Rational(1)}).front();
      std::string kind = bivector.empty() ? "kirillov" : bivector;
      auto chosen = suites::choose_bivector(kind, lam);
      expr::Expr f, g;
      try {
        f = expr::parse(f_text);
        g = expr::parse(g_text);
      } catch (const std::exception& e) {
        throw UsageError(std::string("cannot parse expression: ") + e.what());
      }
      auto cfg = moyal::make_config(chosen.w, order > 0 ? std::optional<int>(order) : std::nullopt);
      moyal::StarResult s;
      try {
        s = moyal::star(f, g, cfg);
      } catch (const std::domain_error& e) {
        throw UsageError(e.what());
      }
      auto p1 = moyal::bidiff(expr::NormalForm::from_expr(f), expr::NormalForm::from_expr(g), 1, cfg.W);
      r.config()["lambda"] = suites::rational_json(lam);
      r.config()["bivector"] = chosen.info;
      r.config()["bivector"]["matrix"] = suites::matrix_json(chosen.w);
      r.output() = {{"f", expr::print(f)},
                    {"g", expr::print(g)},
                    {"nu", Coefficient(cfg.nu()).str()},
                    {"product", expr::print(s.value.to_expr())},
                    {"p1", expr::print(p1.to_expr())},
                    {"order", s.order},
                    {"exact", s.exact}};
    }

    std::string text = r.dump();
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      out << text;
    }
    if (timing)
      std::cerr << "wall time: "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
    return r.all_pass() ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
