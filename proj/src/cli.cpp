#include "enstro/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "enstro/bounds.hpp"
#include "enstro/burgers.hpp"
#include "enstro/conslaw.hpp"
#include "enstro/extremizers.hpp"
#include "enstro/field.hpp"
#include "enstro/oracles.hpp"

namespace fs = std::filesystem;

namespace enstro::cli {

std::vector<ConfigKey> config_schema() {
  using T = ValueType;
  return {
      {"seed", T::integer, "0", "seed for random data and multi-start"},
      {"jobs", T::integer, "1", "worker threads for sweeps"},
      {"nu", T::real, "0.05", "viscosity"},
      {"N", T::integer, "1024", "grid points (per axis in multi-D; minimum for sweeps)"},
      {"t_end", T::real, "1", "final time"},
      {"t", T::real, "0.5", "comparison time"},
      {"cfl", T::real, "0.4", "CFL number"},
      {"init", T::text, "sine", "initial datum: lower-bound, sine, mode2, mode3, step, random (multi-D: sine, random, bump)"},
      {"input", T::text, "", "dump file used instead of init"},
      {"amplitude", T::real, "1", "max |u0| for oracle-check"},
      {"sample_stride", T::integer, "100", "steps between stored snapshots"},
      {"per_shock", T::real, "4", "grid points per nu/|u0|_inf"},
      {"family", T::text, "lower-bound", "datum for sweep-nu"},
      {"nus", T::integer, "6", "number of log-spaced viscosities"},
      {"nu_min", T::real, "0.001", "smallest viscosity of sweep-nu"},
      {"nu_max", T::real, "0.031622776601683791", "largest viscosity of sweep-nu"},
      {"horizon", T::real, "1", "sweep run length in units of 1/|u0|_inf"},
      {"e0", T::real, "1", "initial enstrophy"},
      {"e0_min", T::real, "16", "smallest E0 of sweep-e0"},
      {"e0_max", T::real, "1024", "largest E0 of sweep-e0"},
      {"e0_count", T::integer, "7", "number of log-spaced E0 values"},
      {"prefactors", T::text, "0.5,1,2", "horizons T = c / sqrt(E0) tried by sweep-e0"},
      {"T", T::real, "0.1", "horizon of maximize-finite"},
      {"max_iters", T::integer, "100", "ascent iterations per start"},
      {"starts", T::integer, "5", "multi-start seeds"},
      {"inner_product", T::text, "h1", "ascent metric: l2, h1, h2"},
      {"eps", T::real, "0.02", "window margin of dissipation"},
      {"delta", T::real, "0.020833333333333332", "transition width of the lower-bound datum"},
      {"flux", T::text, "burgers", "flux: burgers, burgers1d, linear(c=<c>), cubic"},
      {"dim", T::integer, "2", "space dimension of conslaw-nd"},
      {"L", T::real, "1", "box length of conslaw-nd"},
      {"C", T::real, "1", "constant in the bound sup E <= C (1 + 1/nu)"},
      {"t_min", T::real, "1e-6", "first time of heat-estimates"},
      {"t_max", T::real, "1", "last time of heat-estimates"},
      {"t_count", T::integer, "13", "log-spaced times of heat-estimates"},
  };
}

namespace {

/// State shared by a command while it runs.
struct Context {
  Config cfg;
  fs::path dir;
  Manifest manifest;
  std::ostream& out;

  /// Writes dir/name through fn and records it as an output.
  void write(const std::string& name, const std::function<void(std::ostream&)>& fn) {
    std::ofstream os(dir / name);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    fn(os);
    manifest.outputs.push_back(name);
  }
  void dump(const std::string& name, const Field1D& f) {
    write(name, [&](std::ostream& os) { write_dump(os, f); });
  }
  void check(const std::string& name, bool passed, const std::string& detail) {
    manifest.assertions.push_back({name, passed, detail});
  }
  std::size_t count(const char* key) const {
    const long long v = cfg.integer(key);
    if (v < 0) throw ConfigError(std::string(key) + " must be nonnegative");
    return static_cast<std::size_t>(v);
  }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(cfg.integer("seed")); }
};

struct Command {
  std::string name;
  std::string help;
  std::vector<std::string> keys;
  std::function<void(Context&)> run;
  std::map<std::string, std::string> defaults = {};  ///< overrides of schema defaults
};

std::string fmt(double x) { return format_double(x); }

InnerProduct parse_inner_product(const std::string& s) {
  if (s == "l2") return InnerProduct::l2;
  if (s == "h1") return InnerProduct::h1;
  if (s == "h2") return InnerProduct::h2;
  throw ConfigError("inner_product must be l2, h1 or h2, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!detail::parse_real(detail::trim(item), v)) throw ConfigError("bad number '" + item + "' in list '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

/// Initial datum from `input` (dump) or the named unit-enstrophy family.
Field1D initial_datum(Context& c, std::size_t n) {
  const std::string& input = c.cfg.text("input");
  if (!input.empty()) {
    c.manifest.inputs.push_back(input);
    return load_dump(input);
  }
  return make_datum(c.cfg.text("init"), GridSpec1D(n), c.seed());
}

void write_optim_outputs(Context& c, const OptimResult& r, const char* tag) {
  c.write(std::string(tag) + "_record.csv", [&](std::ostream& os) { write_csv(os, r.record); });
  c.dump(std::string(tag) + "_u_star.dat", r.u_star);
  bool feasible = true, monotone = true;
  for (std::size_t i = 0; i < r.record.rows.size(); ++i) {
    feasible = feasible && r.record.rows[i].constraint_residual <= 1e-10;
    if (i > 0) monotone = monotone && r.record.rows[i].objective >= r.record.rows[i - 1].objective;
  }
  c.check("constraint_residual_le_1e-10", feasible, "every iterate on the sphere");
  c.check("objective_monotone", monotone, "accepted steps never decrease the objective");
  c.manifest.results["objective"] = r.objective;
  c.manifest.results["iterations"] = r.record.rows.size();
  c.manifest.results["converged"] = r.record.converged;
}

// ---------------------------------------------------------------------------

void cmd_simulate(Context& c) {
  const Field1D u0 = initial_datum(c, c.count("N"));
  SolverConfig sc;
  sc.nu = c.cfg.real("nu");
  sc.t_end = c.cfg.real("t_end");
  sc.cfl = c.cfg.real("cfl");
  sc.sample_stride = std::max<std::size_t>(1, c.count("sample_stride"));
  sc.min_resolution_per_shock = c.cfg.real("per_shock");
  const auto res = simulate(u0, sc);
  c.write("diagnostics.csv", [&](std::ostream& os) { write_csv(os, res.diagnostics); });
  for (const auto& name : write_trajectory(c.dir, res.trajectory)) c.manifest.outputs.push_back(name);
  const auto inc = monotone_increases(res.diagnostics);
  c.check("linf_nonincreasing", inc.linf <= 1e-8, "max relative step increase " + fmt(inc.linf) + " (tol 1e-8)");
  c.check("tv_nonincreasing", inc.tv <= 1e-6, "max relative step increase " + fmt(inc.tv) + " (tol 1e-6)");
  double drift = 0.0;
  for (const auto& s : res.trajectory.snapshots) drift = std::max(drift, std::abs(norms(s.u).mean));
  c.check("mean_conserved", drift <= 1e-12, "max |mean| " + fmt(drift));
  const auto sup = sup_enstrophy(res.diagnostics);
  c.manifest.results["e_star"] = sup.e_star;
  c.manifest.results["t_star"] = sup.t_star;
  c.manifest.results["steps"] = res.diagnostics.size() - 1;
  c.out << "sup E = " << fmt(sup.e_star) << " at t = " << fmt(sup.t_star) << '\n';
}

void cmd_oracle_check(Context& c) {
  const GridSpec1D g(c.count("N"));
  Field1D u0 = c.cfg.text("input").empty() ? make_datum(c.cfg.text("init"), g, c.seed()) : initial_datum(c, 0);
  u0 = (c.cfg.real("amplitude") / max_abs(u0.values())) * u0;
  const double nu = c.cfg.real("nu"), t = c.cfg.real("t");
  SolverConfig sc;
  sc.nu = nu;
  sc.t_end = t;
  sc.cfl = c.cfg.real("cfl");
  sc.min_resolution_per_shock = c.cfg.real("per_shock");
  sc.sample_stride = std::numeric_limits<std::size_t>::max();
  const Field1D num = simulate(u0, sc).trajectory.final_state();
  const Field1D exact = hopf_cole_solution(u0, nu, t);
  double e2 = 0.0, n2 = 0.0;
  for (std::size_t j = 0; j < num.size(); ++j) {
    e2 += (num[j] - exact[j]) * (num[j] - exact[j]);
    n2 += exact[j] * exact[j];
  }
  const double rel = std::sqrt(e2 / n2);
  c.dump("numerical.dat", num);
  c.dump("hopf_cole.dat", exact);
  c.write("error.csv", [&](std::ostream& os) { os << "nu,t,N,rel_l2\n" << fmt(nu) << ',' << fmt(t) << ',' << g.n_points() << ',' << fmt(rel) << '\n'; });
  c.check("rel_l2_lt_1e-6", rel < 1e-6, "relative L2 error " + fmt(rel));
  c.manifest.results["rel_l2"] = rel;
  c.out << "relative L2 error vs Hopf-Cole: " << fmt(rel) << '\n';
}

void cmd_heat_estimates(Context& c) {
  const GridSpec1D g(c.count("N"));
  const double nu = c.cfg.real("nu");
  const auto ts = log_spaced(c.cfg.real("t_min"), c.cfg.real("t_max"), c.count("t_count"));
  const double b1 = heat_ratio_bound_r1(), b2 = heat_ratio_bound_r2();
  double m1 = 0.0, m2 = 0.0, closed_err = 0.0;
  std::ostringstream rows;
  for (const auto& name : datum_families()) {
    const Field1D v0 = make_datum(name, g, c.seed());
    for (double t : ts) {
      const auto r = heat_estimate_ratios(v0, nu, t);
      m1 = std::max(m1, r.r1);
      m2 = std::max(m2, r.r2);
      rows << name << ',' << fmt(t) << ',' << fmt(r.r1) << ',' << fmt(r.r2) << '\n';
      if (name == "sine") {
        // The ratios are scale invariant, so sin(2 pi x)'s closed form applies.
        const double s = nu * t;
        const double closed = std::numbers::pi / std::sqrt(2.0) * std::exp(-4 * std::numbers::pi * std::numbers::pi * s) * std::pow(s, 0.25);
        closed_err = std::max(closed_err, std::abs(r.r1 - closed));
      }
    }
  }
  c.write("ratios.csv", [&](std::ostream& os) { os << "datum,t,r1,r2\n" << rows.str(); });
  c.check("r1_bounded", m1 <= b1, "max r1 " + fmt(m1) + " <= " + fmt(b1));
  c.check("r2_bounded", m2 <= b2, "max r2 " + fmt(m2) + " <= " + fmt(b2));
  c.check("single_mode_closed_form", closed_err <= 1e-8, "max |r1 - closed form| " + fmt(closed_err));
  c.manifest.results["max_r1"] = m1;
  c.manifest.results["max_r2"] = m2;
}

SweepConfig sweep_config(const Context& c) {
  SweepConfig s;
  s.cfl = c.cfg.real("cfl");
  s.per_shock = c.cfg.real("per_shock");
  s.min_points = c.count("N");
  s.horizon = c.cfg.real("horizon");
  s.jobs = std::max<std::size_t>(1, c.count("jobs"));
  s.seed = c.seed();
  return s;
}

void write_sweep(Context& c, const SweepResult& r) {
  c.write("sweep.csv", [&](std::ostream& os) { write_csv(os, r); });
  c.write("summary.json", [&](std::ostream& os) { os << summary_json(r).dump(2) << '\n'; });
  c.manifest.results = summary_json(r);
  c.check("sweep_complete", r.complete(), r.complete() ? "all points finished" : r.error);
}

void cmd_sweep_nu(Context& c) {
  const auto nus = log_spaced(c.cfg.real("nu_max"), c.cfg.real("nu_min"), c.count("nus"));
  const std::string family = c.cfg.text("family");
  const auto r = nu_sweep(family, nus, sweep_config(c));
  write_sweep(c, r);
  if (r.fit) {
    c.check("slope_in_0.85_1.15", r.fit->slope >= 0.85 && r.fit->slope <= 1.15, "slope " + fmt(r.fit->slope));
  } else {
    c.check("slope_in_0.85_1.15", false, "fewer than 4 finished points");
  }
  c.check("c_hat_positive", r.c_hat > 0.0, "c_hat " + fmt(r.c_hat));
  if (r.fit) c.out << "slope " << fmt(r.fit->slope) << ", C_hat " << fmt(r.C_hat) << ", c_hat " << fmt(r.c_hat) << '\n';
}

void cmd_sweep_e0(Context& c) {
  E0SweepConfig ec;
  ec.nu = c.cfg.real("nu");
  ec.e0s = log_spaced(c.cfg.real("e0_min"), c.cfg.real("e0_max"), c.count("e0_count"));
  ec.prefactors = parse_list(c.cfg.text("prefactors"));
  ec.n_points = c.count("N");
  ec.starts = std::max<std::size_t>(1, c.count("starts"));
  ec.max_iters = c.count("max_iters");
  ec.inner_product = parse_inner_product(c.cfg.text("inner_product"));
  ec.seed = c.seed();
  ec.jobs = std::max<std::size_t>(1, c.count("jobs"));
  const auto r = e0_sweep(ec);
  write_sweep(c, r.sweep);
  c.write("points.csv", [&](std::ostream& os) {
    os << "e0,prefactor,objective,N,converged\n";
    for (const auto& p : r.points) {
      os << fmt(p.e0) << ',' << fmt(p.prefactor) << ',' << fmt(p.objective) << ',' << p.n_points << ','
         << (p.converged ? 1 : 0) << '\n';
    }
  });
  const bool in_band = r.sweep.fit && std::abs(r.sweep.fit->slope - 1.5) <= 0.2;
  c.check("slope_in_1.3_1.7", in_band, r.sweep.fit ? "slope " + fmt(r.sweep.fit->slope) : "fewer than 4 points");
}

OptimConfig optim_config(const Context& c) {
  OptimConfig oc;
  oc.e0 = c.cfg.real("e0");
  oc.nu = c.cfg.real("nu");
  oc.horizon = c.cfg.real("T");
  oc.max_iters = c.count("max_iters");
  oc.inner_product = parse_inner_product(c.cfg.text("inner_product"));
  oc.cfl = c.cfg.real("cfl");
  return oc;
}

void cmd_maximize_instant(Context& c) {
  const OptimConfig oc = optim_config(c);
  const auto r = instantaneous_maximize(oc, GridSpec1D(c.count("N")), c.seed(), std::max<std::size_t>(1, c.count("starts")));
  write_optim_outputs(c, r, "instant");
  c.out << "max (1/2) dE/dt = " << fmt(r.objective) << '\n';
}

void cmd_maximize_finite(Context& c) {
  const OptimConfig oc = optim_config(c);
  const GridSpec1D g(c.count("N"));
  const auto seeds = default_seeds(g, c.seed(), std::max<std::size_t>(1, c.count("starts")));
  std::optional<OptimResult> best;
  double best_seed_value = 0.0;
  for (const auto& s : seeds) {
    auto r = finite_time_maximize(oc, g, s);
    SolverConfig sc;
    sc.nu = oc.nu;
    sc.t_end = oc.horizon;
    sc.cfl = oc.cfl;
    sc.sample_stride = std::numeric_limits<std::size_t>::max();
    const double seed_value = simulate(project_to_sphere(s, oc.e0), sc).diagnostics.back().enstrophy;
    if (!best || r.objective > best->objective) {
      best = std::move(r);
      best_seed_value = seed_value;
    }
  }
  write_optim_outputs(c, *best, "finite");
  c.check("not_worse_than_seed", best->objective >= best_seed_value * (1 - 1e-6),
          "E(T) " + fmt(best->objective) + " vs seed " + fmt(best_seed_value));
  c.out << "max E(T) = " << fmt(best->objective) << '\n';
}

void cmd_lower_bound(Context& c) {
  LowerBoundDatumSpec spec;
  spec.delta = c.cfg.real("delta");
  spec.n_points = c.count("N");
  LowerBoundDatum d = [&] {
    try {
      return build_lower_bound_datum(spec);
    } catch (const ConstructionError& e) {
      c.check("shape_certified", false, e.what());
      throw;
    }
  }();
  c.check("shape_certified", true, "oddness, concavity, plateau, monotonicity, sign");
  c.dump("v0.dat", d.v0);
  c.dump("u0.dat", d.u0);
  const auto rep = characteristics_report(d.v0);
  c.write("characteristics.csv", [&](std::ostream& os) {
    os << "alpha,v0,dv0,t_star,t_s,admissible,skipped\n";
    for (const auto& r : rep.rows) {
      os << fmt(r.alpha) << ',' << fmt(r.v0) << ',' << fmt(r.dv0) << ',' << fmt(r.t_star) << ',' << fmt(r.t_s)
         << ',' << (r.admissible ? 1 : 0) << ',' << (r.skipped ? 1 : 0) << '\n';
    }
  });
  std::size_t bad = 0;
  for (const auto& r : rep.rows) bad += !r.skipped && !r.admissible;
  c.check("characteristics_admissible", rep.all_admissible,
          std::to_string(bad) + " inadmissible, " + std::to_string(rep.skipped) + " skipped");
  c.check("unit_enstrophy", std::abs(enstrophy(d.u0) - 1.0) <= 1e-10, "E(u0) = " + fmt(enstrophy(d.u0)));
  c.manifest.results["U"] = d.U;
  c.out << "U = " << fmt(d.U) << '\n';
}

void cmd_dissipation(Context& c) {
  const double nu = c.cfg.real("nu"), eps = c.cfg.real("eps"), per_shock = c.cfg.real("per_shock");
  LowerBoundDatumSpec spec;
  spec.delta = c.cfg.real("delta");
  spec.n_points = c.count("N");
  const double U0 = build_lower_bound_datum(spec).U;
  spec.n_points = std::max(spec.n_points, required_points(U0, nu, per_shock));
  const auto d = build_lower_bound_datum(spec);
  const auto w = dissipation_window(d.u0, d.U, nu, eps, c.cfg.real("cfl"), per_shock);
  c.write("dissipation.csv", [&](std::ostream& os) {
    os << "nu,eps,U,N,measured,reference,ratio,half_width,shock_width\n"
       << fmt(nu) << ',' << fmt(eps) << ',' << fmt(d.U) << ',' << spec.n_points << ',' << fmt(w.measured) << ','
       << fmt(w.reference) << ',' << fmt(w.ratio()) << ',' << fmt(w.half_width) << ',' << fmt(w.shock_width) << '\n';
  });
  c.check("within_10_percent", std::abs(w.ratio() - 1.0) <= 0.1, "measured/reference " + fmt(w.ratio()));
  c.manifest.results["ratio"] = w.ratio();
  c.out << "measured/reference = " << fmt(w.ratio()) << '\n';
}

void cmd_conslaw_nd(Context& c) {
  const GridSpecND g(c.count("dim"), c.count("N"), c.cfg.real("L"));
  const FluxSpec flux = find_flux(c.cfg.text("flux"), g.dim());
  const FieldND u0 = hypothesis_normalize(make_nd_datum(c.cfg.text("init"), g, c.seed()));
  NdConfig nc;
  nc.t_end = c.cfg.real("t_end");
  nc.cfl = c.cfg.real("cfl");
  nc.sample_stride = std::max<std::size_t>(1, c.count("sample_stride"));
  const double nu = c.cfg.real("nu");
  const auto r = simulate_nd(u0, flux, nu, nc);
  c.write("diagnostics.csv", [&](std::ostream& os) { write_csv(os, r); });
  c.write("u0.dat", [&](std::ostream& os) { write_dump(os, u0); });
  c.write("final.dat", [&](std::ostream& os) { write_dump(os, r.final_state); });
  double sup = 0.0;
  for (const auto& row : r.diagnostics.rows()) sup = std::max(sup, row.enstrophy);
  const double bound = c.cfg.real("C") * (1.0 + 1.0 / nu);
  c.check("hypothesis", r.hypothesis_ok, "|u0|_inf, TV, E normalized to <= 1");
  c.check("maximum_principle", r.max_linf_increase <= 1e-10, "max relative increase " + fmt(r.max_linf_increase));
  c.check("tv_diminishing", r.max_tv_increase <= 1e-8, "max relative increase " + fmt(r.max_tv_increase));
  c.check("enstrophy_bound", sup <= bound, "sup E " + fmt(sup) + " <= " + fmt(bound));
  c.manifest.results["sup_enstrophy"] = sup;
  c.manifest.results["steps"] = r.steps;
  c.out << "sup |grad u|^2 = " << fmt(sup) << " (bound " << fmt(bound) << ")\n";
}

void cmd_report(Context& c) {
  nlohmann::json runs = nlohmann::json::array();
  std::size_t unreadable = 0;
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(c.dir.parent_path())) {
    if (e.is_directory() && e.path() != c.dir) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::ostringstream csv;
  for (const auto& d : dirs) {
    const auto mf = d / "manifest.json";
    if (!fs::exists(mf)) continue;
    try {
      std::ifstream is(mf);
      const auto j = nlohmann::json::parse(is);
      std::string failed;
      for (const auto& a : j.at("assertions")) {
        if (!a.at("passed").get<bool>()) failed += (failed.empty() ? "" : ";") + a.at("name").get<std::string>();
      }
      const bool ok = j.at("passed").get<bool>();
      csv << d.filename().string() << ',' << j.at("command").get<std::string>() << ',' << (ok ? 1 : 0) << ','
          << failed << '\n';
      runs.push_back({{"run", d.filename().string()}, {"command", j.at("command")}, {"passed", ok}, {"failed", failed}});
    } catch (const std::exception&) {
      ++unreadable;
    }
  }
  c.write("report.csv", [&](std::ostream& os) { os << "run,command,passed,failed_assertions\n" << csv.str(); });
  c.write("report.json", [&](std::ostream& os) { os << runs.dump(2) << '\n'; });
  c.check("manifests_readable", unreadable == 0, std::to_string(unreadable) + " unreadable manifests");
  c.manifest.results["runs"] = runs.size();
  c.out << runs.size() << " runs summarized\n";
}

std::vector<Command> commands() {
  return {
      {"simulate", "Run the spectral Burgers solver", {"nu", "N", "t_end", "cfl", "init", "input", "sample_stride", "per_shock", "seed"}, cmd_simulate},
      {"oracle-check", "Compare the solver with the Hopf-Cole solution", {"nu", "t", "N", "init", "input", "amplitude", "cfl", "per_shock", "seed"}, cmd_oracle_check},
      {"heat-estimates", "Heat smoothing ratios over the datum family", {"nu", "N", "t_min", "t_max", "t_count", "seed"}, cmd_heat_estimates},
      {"sweep-nu", "sup_t E against 1/nu", {"family", "nus", "nu_min", "nu_max", "N", "per_shock", "horizon", "cfl", "jobs", "seed"}, cmd_sweep_nu, {{"per_shock", "8"}}},
      {"sweep-e0", "max E(T) against E0 at T = c / sqrt(E0)", {"nu", "e0_min", "e0_max", "e0_count", "prefactors", "N", "max_iters", "starts", "inner_product", "jobs", "seed"}, cmd_sweep_e0, {{"N", "256"}, {"nu", "1"}, {"starts", "1"}}},
      {"maximize-instant", "Maximize dE/dt on the enstrophy sphere", {"e0", "nu", "N", "max_iters", "starts", "inner_product", "cfl", "seed"}, cmd_maximize_instant, {{"N", "256"}}},
      {"maximize-finite", "Maximize E(T) on the enstrophy sphere", {"e0", "nu", "T", "N", "max_iters", "starts", "inner_product", "cfl", "seed"}, cmd_maximize_finite, {{"N", "256"}}},
      {"lower-bound", "Build and certify the shock-at-the-origin datum", {"delta", "N"}, cmd_lower_bound, {{"N", "4096"}}},
      {"dissipation", "Shock dissipation in the window around the origin", {"nu", "eps", "delta", "N", "per_shock", "cfl"}, cmd_dissipation, {{"nu", "0.001"}, {"N", "4096"}, {"per_shock", "8"}}},
      {"conslaw-nd", "Multi-D viscous conservation law", {"flux", "dim", "N", "L", "nu", "t_end", "cfl", "init", "sample_stride", "C", "seed"}, cmd_conslaw_nd, {{"N", "128"}, {"nu", "0.02"}, {"t_end", "0.5"}, {"init", "random"}, {"sample_stride", "10"}}},
      {"report", "Summarize the manifests under the runs directory", {}, cmd_report},
  };
}

std::string flag_for(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& c : commands()) out.push_back(c.name);
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto schema = config_schema();
  const auto table = commands();

  CLI::App app{"Enstrophy growth experiments for viscous Burgers and scalar conservation laws.\n"
               "Config files hold `key = value` lines; flags override them."};
  app.name("enstro");
  app.require_subcommand(1, 1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.fallthrough();

  // Flag values stay strings until the schema types them.
  std::map<std::string, std::map<std::string, std::pair<CLI::Option*, std::unique_ptr<std::string>>>> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : table) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    for (const auto& key : cmd.keys) {
      const ConfigKey* k = nullptr;
      for (const auto& s : schema)
        if (s.name == key) k = &s;
      auto holder = std::make_unique<std::string>();
      CLI::Option* opt = sub->add_option(flag_for(key), *holder, k->help);
      const auto d = cmd.defaults.find(key);
      const std::string shown = d != cmd.defaults.end() ? d->second : k->default_value;
      opt->default_str(shown.empty() ? "\"\"" : shown);
      opt->type_name(k->type == ValueType::real ? "REAL" : k->type == ValueType::integer ? "INT" : "TEXT");
      flags[cmd.name][key] = {opt, std::move(holder)};
    }
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help arrives as CallForHelp above; everything else is a usage error.
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : table)
    if (subs[c.name]->parsed()) cmd = &c;

  // Precedence: schema default < command default < config file < flag.
  Config cfg(schema);
  try {
    for (const auto& [key, value] : cmd->defaults) cfg.set(key, value, cmd->name + " default");
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      apply_config(cfg, is, config_path);
    }
    for (auto& [key, entry] : flags[cmd->name]) {
      if (entry.first->count() > 0) cfg.set(key, *entry.second, flag_for(key));
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  fs::path dir;
  try {
    dir = create_run_directory(cmd->name);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAssertion;
  }
  Context ctx{cfg, dir, Manifest{}, out};
  ctx.manifest.command = cmd->name;
  std::vector<std::string> keys = cmd->keys;
  ctx.manifest.config = cfg.to_json(keys);
  if (!config_path.empty()) ctx.manifest.inputs.push_back(config_path);
  ctx.manifest.started = utc_timestamp();
  int code = kExitOk;
  try {
    cmd->run(ctx);
  } catch (const std::exception& e) {
    ctx.manifest.error = e.what();
    err << "error: " << e.what() << '\n';
  }
  ctx.manifest.finished = utc_timestamp();
  if (!ctx.manifest.passed()) code = kExitAssertion;
  for (const auto& a : ctx.manifest.assertions) {
    out << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
  }
  try {
    write_manifest(dir, ctx.manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAssertion;
  }
  out << "run directory: " << dir.string() << '\n';
  return code;
}

}  // namespace enstro::cli
