#pragma once

#include "mm3/normal_form.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace mm3::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchema = "moyal-m3-report/1";

/// Tolerances by name. `symbolic` is exact: the residual must be 0.
class Tolerances {
 public:
  Tolerances()
      : values_{{"symbolic", 0.0}, {"fft", 1e-6},        {"quadrature", 1e-8}, {"fd", 1e-7},
                {"pointwise", 1e-10}, {"bracket", 1e-9}, {"parseval", 1e-10}} {}

  double get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw std::out_of_range("unknown tolerance " + name);
    return it->second;
  }
  void set(const std::string& name, double v) {
    if (!values_.count(name)) throw std::out_of_range("unknown tolerance " + name);
    if (!(v >= 0)) throw std::invalid_argument("tolerance must be non-negative");
    values_[name] = v;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
  }
  Json to_json() const {
    Json j = Json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, double> values_;
};

struct Record {
  std::string name;
  std::string anchor;  // concept tag, or "plumbing"
  double residual = 0;
  std::string tolerance_name;
  double tolerance = 0;
  Json detail = Json::object();

  /// NaN never passes.
  bool pass() const { return residual <= tolerance; }

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["anchor"] = anchor;
    j["residual"] = std::isfinite(residual) ? Json(residual) : Json(nullptr);
    j["tolerance"] = {{"name", tolerance_name}, {"value", tolerance}};
    j["verdict"] = pass() ? "pass" : "fail";
    if (!detail.empty()) j["detail"] = detail;
    return j;
  }
};

class Report {
 public:
  Report(std::string command, std::uint64_t seed, Tolerances tol) : command_(std::move(command)), seed_(seed), tol_(std::move(tol)) {}

  const Tolerances& tolerances() const { return tol_; }
  std::uint64_t seed() const { return seed_; }
  Json& config() { return config_; }

  /// Gating record: decides the exit status.
  Record& check(std::string name, std::string anchor, double residual, const std::string& tolerance_name) {
    checks_.push_back({std::move(name), std::move(anchor), residual, tolerance_name, tol_.get(tolerance_name), {}});
    return checks_.back();
  }
  /// Reported but not gating.
  Record& diagnostic(std::string name, std::string anchor, double residual, const std::string& tolerance_name) {
    diagnostics_.push_back({std::move(name), std::move(anchor), residual, tolerance_name, tol_.get(tolerance_name), {}});
    return diagnostics_.back();
  }
  Json& output() { return output_; }

  const std::vector<Record>& checks() const { return checks_; }
  const std::vector<Record>& diagnostics() const { return diagnostics_; }

  bool all_pass() const {
    for (const auto& r : checks_)
      if (!r.pass()) return false;
    return true;
  }

  Json to_json() const {
    Json j;
    j["schema"] = kSchema;
    j["tool"] = "moyal_m3";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["seed"] = seed_;
    Json cfg = config_.is_null() ? Json::object() : config_;
    cfg["tolerances"] = tol_.to_json();
    j["config"] = cfg;
    j["checks"] = Json::array();
    for (const auto& r : checks_) j["checks"].push_back(r.to_json());
    j["diagnostics"] = Json::array();
    for (const auto& r : diagnostics_) j["diagnostics"].push_back(r.to_json());
    if (!output_.is_null()) j["output"] = output_;
    int failed = 0;
    for (const auto& r : checks_) failed += !r.pass();
    j["summary"] = {{"checks", checks_.size()}, {"failed", failed}, {"pass", failed == 0}};
    return j;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

 private:
  std::string command_;
  std::uint64_t seed_;
  Tolerances tol_;
  Json config_;
  std::vector<Record> checks_, diagnostics_;
  Json output_;
};

/// Residual size of a zero-test verdict: 0 only for a symbolic zero, otherwise
/// the largest magnitude over the zero-test sample points.
inline double magnitude(const expr::NormalForm& f, const expr::ZeroVerdict& v) {
  if (v.zero && v.path == expr::ZeroVerdict::Path::Symbolic) return 0.0;
  if (!std::isnan(v.max_abs)) return v.max_abs;
  auto vars = f.variables();
  std::vector<std::string> order(vars.begin(), vars.end());
  auto c = expr::compile(f.to_expr(), order);
  std::mt19937_64 rng(expr::kZeroTestSeed);
  std::uniform_real_distribution<double> d(-2, 2);
  double m = 0;
  std::vector<double> x(order.size());
  for (int k = 0; k < expr::kZeroTestSamples; ++k) {
    for (auto& v2 : x) v2 = d(rng);
    m = std::max(m, std::abs(c(x)));
  }
  // symbolic nonzero with vanishing samples still fails
  return m > 0 ? m : std::numeric_limits<double>::quiet_NaN();
}

inline double magnitude(const expr::NormalForm& f) { return magnitude(f, expr::is_zero(f)); }

}  // namespace mm3::report
