// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.
// Exit status is 0 only when every line passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "enstro/enstro.hpp"
#include "test_util.hpp"

using namespace enstro;
using enstro::testing::random_smooth_field;
using enstro::testing::rel_l2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  const GridSpec1D g(1024);
  const Field1D u0 = Field1D::sample(g, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
  SolverConfig sc;
  sc.nu = 0.05;
  sc.t_end = 0.5;
  sc.sample_stride = std::numeric_limits<std::size_t>::max();
  const Field1D num_u = simulate(u0, sc).trajectory.final_state();
  const double rel = rel_l2(num_u, hopf_cole_solution(u0, sc.nu, sc.t_end));
  const double secs = seconds_since(t0);
  return {rel < 1e-6 && secs < 5.0, "rel L2 " + num(rel) + " (< 1e-6), " + num(secs, 3) + " s (< 5 s)"};
}

Outcome monotone_quantities() {
  constexpr double kLinfTol = 1e-8, kTvTol = 1e-6;
  const std::vector<std::string> data = {"sine", "step", "random", "lower-bound"};
  const std::vector<double> nus = {1.0, 0.1, 0.01, 3e-3, 1e-3};
  SweepConfig cfg;
  cfg.per_shock = 4.0;
  double worst_linf = 0.0, worst_tv = 0.0;
  std::size_t cases = 0;
  for (const auto& name : data) {
    const double linf = max_abs(make_datum(name, GridSpec1D(cfg.min_points)).values());
    for (double nu : nus) {
      const Field1D u0 = make_datum(name, GridSpec1D(sweep_points(linf, nu, cfg)));
      SolverConfig sc;
      sc.nu = nu;
      sc.t_end = 1.0 / linf;
      sc.min_resolution_per_shock = cfg.per_shock;
      sc.sample_stride = std::numeric_limits<std::size_t>::max();
      const auto inc = monotone_increases(simulate(u0, sc).diagnostics);
      worst_linf = std::max(worst_linf, inc.linf);
      worst_tv = std::max(worst_tv, inc.tv);
      ++cases;
    }
  }
  return {worst_linf <= kLinfTol && worst_tv <= kTvTol,
          std::to_string(cases) + " cases, worst step increase |u|_inf " + num(worst_linf) + " (<= 1e-8), TV " +
              num(worst_tv) + " (<= 1e-6)"};
}

SweepConfig sandwich_config(double scale) {
  SweepConfig cfg;
  cfg.per_shock = 8.0 * scale;
  cfg.min_points = static_cast<std::size_t>(1024 * scale);
  cfg.max_points = std::size_t{1} << 15;
  return cfg;
}

const std::vector<double>& sandwich_nus() {
  static const auto nus = log_spaced(1e-3, std::pow(10.0, -1.5), 6);
  return nus;
}

Outcome sharp_bound_sandwich() {
  const auto t0 = Clock::now();
  const auto r = nu_sweep("lower-bound", sandwich_nus(), sandwich_config(1.0));
  const double secs = seconds_since(t0);
  const double U = build_lower_bound_datum({}).U;
  const double floor = 0.1 * (2.0 / 3.0) * U * U * U;
  if (!r.fit) return {false, "sweep incomplete: " + r.error};
  const bool slope_ok = r.fit->slope >= 0.85 && r.fit->slope <= 1.15;
  return {slope_ok && r.c_hat > floor && r.complete() && secs < 600.0,
          "slope " + num(r.fit->slope) + " (in [0.85, 1.15]), c_hat " + num(r.c_hat) + " (> " + num(floor) +
              "), " + num(secs, 3) + " s"};
}

Outcome dissipation_rate() {
  const double nu = 1e-3, eps = 0.02, per_shock = 8.0;
  LowerBoundDatumSpec spec;
  spec.n_points = std::max<std::size_t>(4096, required_points(0.2, nu, per_shock));
  const auto d = build_lower_bound_datum(spec);
  const auto w = dissipation_window(d.u0, d.U, nu, eps, 0.4, per_shock);
  return {std::abs(w.ratio() - 1.0) <= 0.1,
          "measured/reference " + num(w.ratio()) + " (within 10%), window half-width " + num(w.half_width) +
              " vs shock width " + num(w.shock_width)};
}

Outcome gronwall_two_regime() {
  constexpr double kLateConstant = 1.0;  // nu E(t) <= 1 for t > nu
  SweepConfig cfg;
  double worst_ratio = 0.0, worst_late = 0.0;
  std::size_t runs = 0;
  bool hypothesis = true;
  for (const auto& name : datum_families()) {
    const double linf = max_abs(make_datum(name, GridSpec1D(cfg.min_points)).values());
    for (double nu : {1.0, 0.1, 0.01, 1e-3}) {
      const auto rep = two_regime_check(make_datum(name, GridSpec1D(sweep_points(linf, nu, cfg))), nu, cfg);
      hypothesis = hypothesis && rep.hypothesis_ok;
      worst_ratio = std::max(worst_ratio, rep.worst_gronwall);
      worst_late = std::max(worst_late, rep.max_late_scaled);
      ++runs;
    }
  }
  return {hypothesis && worst_ratio <= 1.0 + 1e-3 && worst_late <= kLateConstant,
          std::to_string(runs) + " runs, max E(t)/(E0 e^{t/nu}) " + num(worst_ratio, 8) +
              " (<= 1.001), max nu E for t > nu " + num(worst_late) + " (<= 1)"};
}

Outcome heat_estimates() {
  const GridSpec1D g(1024);
  const double nu = 1.0;
  const auto ts = log_spaced(1e-6, 1.0, 13);
  double m1 = 0.0, m2 = 0.0;
  for (const auto& name : datum_families()) {
    const Field1D v0 = make_datum(name, g);
    for (double t : ts) {
      const auto r = heat_estimate_ratios(v0, nu, t);
      m1 = std::max(m1, r.r1);
      m2 = std::max(m2, r.r2);
    }
  }
  // sin(2 pi k x): r1 = 2 pi k e^{-4 pi^2 k^2 s} s^{1/4} / sqrt(2 * 4k), r2 = 2 pi k r1 s^{1/2}.
  double closed_err = 0.0;
  for (int k : {1, 4}) {
    const Field1D v0 = Field1D::sample(g, [k](double x) { return std::sin(2.0 * std::numbers::pi * k * x); });
    for (double t : ts) {
      const auto r = heat_estimate_ratios(v0, nu, t);
      const double w = 2.0 * std::numbers::pi * k;
      const double r1 = w * std::exp(-w * w * t) * std::pow(t, 0.25) / std::sqrt(8.0 * k);
      closed_err = std::max({closed_err, std::abs(r.r1 - r1), std::abs(r.r2 - w * std::sqrt(t) * r1)});
    }
  }
  const double b1 = heat_ratio_bound_r1(), b2 = heat_ratio_bound_r2();
  return {m1 <= b1 && m2 <= b2 && closed_err <= 1e-8,
          "max r1 " + num(m1) + " (<= " + num(b1) + "), max r2 " + num(m2) + " (<= " + num(b2) +
              "), closed-form error " + num(closed_err) + " (<= 1e-8)"};
}

Outcome adjoint_correctness() {
  struct Case {
    double nu, horizon, amplitude;
    std::size_t n;
  };
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (const Case& cs : {Case{0.1, 0.2, 1.0, 128}, Case{0.02, 0.1, 1.0, 256}, Case{1.0, 0.05, 6.0, 128}}) {
    const GridSpec1D g(cs.n);
    const Field1D u0 = random_smooth_field(g, rng, 6, cs.amplitude);
    const Field1D grad = finite_time_gradient(u0, cs.horizon, cs.nu);
    FiniteTimeProblem p(g, cs.nu, cs.horizon,
                        FiniteTimeProblem::steps_for(g, max_abs(u0.values()), cs.horizon, 0.4));
    for (int trial = 0; trial < 10; ++trial) {
      const Field1D phi = random_smooth_field(g, rng, 8, cs.amplitude);
      const double h = 1e-5;
      const double fd =
          (p.value(Field1D::combine(u0, 1.0, phi, h)) - p.value(Field1D::combine(u0, 1.0, phi, -h))) / (2 * h);
      worst = std::max(worst, std::abs(dot(grad, phi) - fd) / std::abs(fd));
    }
  }
  return {worst < 1e-5, "30 directions, worst relative error " + num(worst) + " (< 1e-5)"};
}

Outcome instantaneous_scaling() {
  std::vector<std::array<double, 3>> pts;  // E0, 1/nu, rate
  std::string rates;
  bool positive = true;
  for (double nu : {0.5, 0.1}) {
    for (double e0 : {1.0, 4.0, 16.0, 64.0}) {
      OptimConfig oc;
      oc.e0 = e0;
      oc.nu = nu;
      oc.max_iters = 200;
      oc.inner_product = InnerProduct::h2;
      const double rate = 2.0 * instantaneous_maximize(oc, GridSpec1D(256), 0, 5).objective;  // dE/dt
      rates += (rates.empty() ? "" : ", ") + num(rate);
      positive = positive && rate > 0.0;
      pts.push_back({e0, 1.0 / nu, rate});
    }
  }
  if (!positive) return {false, "max dE/dt not positive on the grid, no power law: " + rates};
  const auto fit = fit_power_law2(pts);
  return {std::abs(fit.a - 5.0 / 3.0) <= 0.15 && std::abs(fit.b - 1.0 / 3.0) <= 0.1,
          "a " + num(fit.a) + " (5/3 +- 0.15), b " + num(fit.b) + " (1/3 +- 0.1)"};
}

Outcome finite_time_scaling() {
  const auto t0 = Clock::now();
  E0SweepConfig cfg;
  cfg.nu = 1.0;
  for (int p = 4; p <= 10; ++p) cfg.e0s.push_back(std::ldexp(1.0, p));
  cfg.prefactors = {0.5, 1.0, 2.0};
  cfg.n_points = 256;
  cfg.starts = 1;
  cfg.max_iters = 100;
  const auto r = e0_sweep(cfg);
  const double secs = seconds_since(t0);
  if (!r.sweep.fit) return {false, "sweep incomplete: " + r.sweep.error};
  const double slope = r.sweep.fit->slope;
  return {std::abs(slope - 1.5) <= 0.2 && secs < 1200.0,
          "slope " + num(slope) + " (1.5 +- 0.2), E(T) at E0 = 1024: " + num(r.sweep.rows.back().e_star) + ", " +
              num(secs, 3) + " s"};
}

Outcome multi_d() {
  constexpr double kC = 1.0;
  const auto t0 = Clock::now();
  const GridSpecND g(2, 256, 1.0);
  const FluxSpec flux = find_flux("burgers", 2);
  NdConfig nc;
  nc.t_end = 0.5;
  double c_hat = 0.0, worst_linf = 0.0, worst_tv = 0.0;
  bool hypothesis = true;
  for (const char* name : {"sine", "bump", "random"}) {
    const FieldND u0 = hypothesis_normalize(make_nd_datum(name, g, 0));
    for (double nu : {0.05, 0.02, 0.01}) {
      const auto r = simulate_nd(u0, flux, nu, nc);
      double sup = 0.0;
      for (const auto& row : r.diagnostics.rows()) sup = std::max(sup, row.enstrophy);
      c_hat = std::max(c_hat, sup / (1.0 + 1.0 / nu));
      worst_linf = std::max(worst_linf, r.max_linf_increase);
      worst_tv = std::max(worst_tv, r.max_tv_increase);
      hypothesis = hypothesis && r.hypothesis_ok;
    }
  }
  const double secs = seconds_since(t0);
  return {hypothesis && c_hat <= kC && worst_linf <= 1e-10 && worst_tv <= 1e-8 && secs < 600.0,
          "C_hat " + num(c_hat) + " (<= 1), |u|_inf increase " + num(worst_linf) + " (<= 1e-10), TV increase " +
              num(worst_tv) + " (<= 1e-8), " + num(secs, 3) + " s"};
}

Outcome convergence() {
  const auto base = nu_sweep("lower-bound", sandwich_nus(), sandwich_config(1.0));
  const auto fine = nu_sweep("lower-bound", sandwich_nus(), sandwich_config(2.0));
  if (!base.complete() || !fine.complete()) return {false, base.error + fine.error};
  double worst = 0.0;
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    worst = std::max(worst, std::abs(fine.rows[i].e_star / base.rows[i].e_star - 1.0));
  }
  return {worst < 5e-3, "worst relative change of e_star under N -> 2N " + num(worst) + " (< 0.5%)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle_equivalence", oracle_equivalence},
      {"monotone_quantities", monotone_quantities},
      {"sharp_bound_sandwich", sharp_bound_sandwich},
      {"dissipation_rate", dissipation_rate},
      {"gronwall_two_regime", gronwall_two_regime},
      {"heat_estimates", heat_estimates},
      {"adjoint_correctness", adjoint_correctness},
      {"instantaneous_scaling", instantaneous_scaling},
      {"finite_time_scaling", finite_time_scaling},
      {"multi_d", multi_d},
      {"convergence", convergence},
  };
  std::size_t failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
