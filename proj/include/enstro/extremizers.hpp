#pragma once

// Enstrophy maximization on the sphere {zero mean, E(u) = E0}: the
// instantaneous growth rate and the enstrophy at a fixed horizon T, the
// latter with gradients from the discrete adjoint of the IF-RK4 solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "enstro/burgers.hpp"
#include "enstro/errors.hpp"
#include "enstro/field.hpp"

namespace enstro {

/// Metric for gradients: L2, or the H1 / H2 seminorms (Riesz maps (-d_xx)^{-1}, d_xx^{-2}).
enum class InnerProduct { l2, h1, h2 };

struct OptimConfig {
  double e0 = 1.0;
  double horizon = 0.0;  ///< T, finite-time problem only
  double nu = 0.1;
  std::size_t max_iters = 200;
  double initial_step = 0.1;  ///< relative to the current norm
  double backtrack = 0.5;
  double armijo = 1e-4;
  double grad_tol = 1e-6;
  InnerProduct inner_product = InnerProduct::h1;
  double cfl = 0.4;
  bool dealias = true;
  std::size_t memory_budget = std::size_t{512} << 20;  ///< bytes of adjoint stage storage

  void validate(bool needs_horizon) const {
    if (!(e0 > 0.0)) throw ConfigError("OptimConfig: e0 must be positive");
    if (!(nu > 0.0)) throw ConfigError("OptimConfig: nu must be positive");
    if (needs_horizon && !(horizon > 0.0)) throw ConfigError("OptimConfig: horizon must be positive");
    if (max_iters == 0) throw ConfigError("OptimConfig: max_iters must be positive");
    if (!(initial_step > 0.0)) throw ConfigError("OptimConfig: initial_step must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("OptimConfig: backtrack must lie in (0, 1)");
    if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("OptimConfig: armijo must lie in (0, 1)");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("OptimConfig: cfl must lie in (0, 1]");
  }
};

struct OptimRow {
  std::size_t iter = 0;
  double objective = 0.0;
  double step = 0.0;
  double constraint_residual = 0.0;
  double grad_norm = 0.0;  ///< relative: |P grad| |u| / |J|
};

struct OptimRecord {
  std::vector<OptimRow> rows;
  bool converged = false;
};

inline void write_csv(std::ostream& os, const OptimRecord& rec) {
  os << "iter,objective,step,constraint_residual,grad_norm\n";
  for (const auto& r : rec.rows) {
    os << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.step) << ','
       << format_double(r.constraint_residual) << ',' << format_double(r.grad_norm) << '\n';
  }
}

struct OptimResult {
  Field1D u_star;
  double objective = 0.0;
  OptimRecord record;
};

// ---------------------------------------------------------------------------
// Sphere geometry

/// H1-seminorm inner product int a_x b_x, spectral.
inline double h1_dot(const Field1D& a, const Field1D& b) {
  detail::RealFft fft(a.size());
  const auto ha = detail::half_spectrum(a, fft);
  const auto hb = detail::half_spectrum(b, fft);
  const std::size_t n = a.size(), nyq = n / 2;
  double s = 0.0;
  for (std::size_t k = 1; k < nyq; ++k) {
    const double w = kTwoPi * static_cast<double>(k);
    s += 2.0 * w * w * (ha[k] * std::conj(hb[k])).real();
  }
  const double nn = static_cast<double>(n);
  return s / (nn * nn);
}

/// Riesz representative of an L2 gradient in the chosen metric, mean removed.
inline Field1D riesz(const Field1D& grad, InnerProduct ip) {
  const std::size_t nyq = grad.size() / 2;
  const int power = ip == InnerProduct::l2 ? 0 : ip == InnerProduct::h1 ? 1 : 2;
  return apply_symbol(grad, [&](std::size_t k) -> std::complex<double> {
    if (k == 0 || k == nyq) return 0.0;
    const double w = kTwoPi * static_cast<double>(k);
    return std::pow(w * w, -power);
  });
}

/// The metric operator itself, so that |u|_M^2 = <u, metric_apply(u)>_L2.
inline Field1D metric_apply(const Field1D& u, InnerProduct ip) {
  switch (ip) {
    case InnerProduct::l2: return remove_mean(u);
    case InnerProduct::h1: return -1.0 * derivative(u, 2);
    case InnerProduct::h2: return derivative(u, 4);
  }
  return u;
}

/// Riesz representative in the H1 seminorm: solves -g_xx = grad spectrally.
inline Field1D h1_riesz(const Field1D& grad) { return riesz(grad, InnerProduct::h1); }

/// Zero-mean rescaling of u onto the sphere E = e0.
inline Field1D project_to_sphere(const Field1D& u, double e0) {
  const Field1D v = remove_mean(u);
  const double e = enstrophy(v);
  if (!(e > 0.0)) throw DegenerateInputError("project_to_sphere: field has no gradient");
  return std::sqrt(e0 / e) * v;
}

inline double relative_constraint_residual(const Field1D& u, double e0) {
  return std::abs(enstrophy(u) - e0) / e0;
}

/// An objective J with its L2 gradient.
struct Objective {
  std::function<double(const Field1D&)> value;
  std::function<std::pair<double, Field1D>(const Field1D&)> value_and_gradient;
};

/// Projected gradient ascent on the enstrophy sphere with Armijo backtracking.
/// Steps are taken along the tangent gradient normalized to the current radius,
/// so step sizes are dimensionless and the iteration commutes with rescaling.
inline OptimResult sphere_ascent(const OptimConfig& cfg, const Field1D& seed, const Objective& obj) {
  Field1D u = project_to_sphere(seed, cfg.e0);
  auto [j, grad] = obj.value_and_gradient(u);
  OptimResult out{u, j, {}};
  double s = cfg.initial_step;

  for (std::size_t it = 0;; ++it) {
    // Tangent direction in the chosen metric M: d = Rg - (<Rg, n>_M / <Rn, n>_M) Rn with
    // n the L2 normal of the sphere; <R a, b>_M = <a, b>_L2 keeps this to L2 products.
    const Field1D normal = -2.0 * derivative(u, 2);
    const Field1D rg = riesz(grad, cfg.inner_product);
    const Field1D rn = riesz(normal, cfg.inner_product);
    const Field1D d = Field1D::combine(rg, 1.0, rn, -dot(rg, normal) / dot(rn, normal));
    // |d|_M^2 = <d, g>_L2 for the projected gradient; |u|_M from its L2 pairing.
    const double dnorm = std::sqrt(std::max(dot(d, grad), 0.0));
    const double unorm = std::sqrt(dot(u, metric_apply(u, cfg.inner_product)));
    const double rel_grad = dnorm * unorm / std::max(std::abs(j), std::numeric_limits<double>::min());
    out.record.rows.push_back({it, j, it == 0 ? 0.0 : s, relative_constraint_residual(u, cfg.e0), rel_grad});
    if (rel_grad < cfg.grad_tol || dnorm == 0.0) {
      out.record.converged = true;
      break;
    }
    if (it + 1 >= cfg.max_iters) break;

    const Field1D dir = (unorm / dnorm) * d;
    const double slope = dnorm * unorm;  // dJ along dir
    bool accepted = false;
    while (s > 1e-12) {
      const Field1D trial = project_to_sphere(Field1D::combine(u, 1.0, dir, s), cfg.e0);
      const double jt = obj.value(trial);
      if (std::isfinite(jt) && jt >= j + cfg.armijo * s * slope) {
        u = trial;
        accepted = true;
        break;
      }
      s *= cfg.backtrack;
    }
    if (!accepted) {
      // No ascent along the gradient at any resolvable step: stationary to rounding.
      out.record.converged = true;
      break;
    }
    std::tie(j, grad) = obj.value_and_gradient(u);
    if (j > out.objective) {
      out.u_star = u;
      out.objective = j;
    }
    s = std::min(s / cfg.backtrack, 1.0);
  }
  return out;
}

/// Seeds for multi-start: the first sine mode, a two-mode mixture and random
/// smooth perturbations of the first mode.
inline std::vector<Field1D> default_seeds(const GridSpec1D& grid, std::uint64_t seed, std::size_t count = 5) {
  std::vector<Field1D> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0) {
      out.push_back(Field1D::sample(grid, [](double x) { return std::sin(kTwoPi * x); }));
      continue;
    }
    if (i == 1) {
      out.push_back(Field1D::sample(
          grid, [](double x) { return std::sin(kTwoPi * x) + 0.3 * std::cos(2.0 * kTwoPi * x); }));
      continue;
    }
    std::vector<double> a(9), b(9);
    for (int k = 1; k <= 8; ++k) {
      a[k] = 0.5 * normal(rng) / (k * k);
      b[k] = 0.5 * normal(rng) / (k * k);
    }
    out.push_back(Field1D::sample(grid, [&](double x) {
      double s = std::sin(kTwoPi * x);
      for (int k = 1; k <= 8; ++k) s += a[k] * std::cos(kTwoPi * k * x) + b[k] * std::sin(kTwoPi * k * x);
      return s;
    }));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantaneous growth rate

/// L2 gradient of R(u) = -nu int u_xx^2 - (1/2) int u_x^3, the discrete functional
/// behind enstrophy_rate: -2 nu D^4 u + (3/2) D (Du)^2.
inline Field1D instantaneous_rate_gradient(const Field1D& u, double nu) {
  const Field1D ux = derivative(u, 1);
  std::vector<double> sq(u.size());
  for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = ux[j] * ux[j];
  const Field1D cubic = derivative(Field1D(u.grid(), std::move(sq)), 1);
  return Field1D::combine(derivative(u, 4), -2.0 * nu, cubic, 1.5);
}

inline Objective instantaneous_objective(double nu) {
  return {[nu](const Field1D& u) { return enstrophy_rate(u, nu).total; },
          [nu](const Field1D& u) {
            return std::make_pair(enstrophy_rate(u, nu).total, instantaneous_rate_gradient(u, nu));
          }};
}

inline OptimResult instantaneous_maximize_from(const OptimConfig& cfg, const Field1D& seed) {
  cfg.validate(false);
  return sphere_ascent(cfg, seed, instantaneous_objective(cfg.nu));
}

/// Best result of instantaneous ascent over the default seeds.
inline OptimResult instantaneous_maximize(const OptimConfig& cfg, const GridSpec1D& grid,
                                          std::uint64_t seed = 0, std::size_t starts = 5) {
  cfg.validate(false);
  std::optional<OptimResult> best;
  for (const auto& s : default_seeds(grid, seed, starts)) {
    auto r = instantaneous_maximize_from(cfg, s);
    if (!best || r.objective > best->objective) best = std::move(r);
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Finite-time enstrophy and its adjoint gradient

/// J(u0) = E(u(T)) for the IF-RK4 solver with n_steps uniform steps.
class FiniteTimeProblem {
 public:
  FiniteTimeProblem(GridSpec1D grid, double nu, double horizon, std::size_t n_steps, bool dealias = true,
                    std::size_t memory_budget = std::size_t{512} << 20)
      : grid_(grid), nu_(nu), horizon_(horizon), n_steps_(n_steps), dealias_(dealias),
        stepper_(grid, nu, dealias) {
    if (!(horizon > 0.0)) throw ConfigError("FiniteTimeProblem: horizon must be positive");
    if (n_steps == 0) throw ConfigError("FiniteTimeProblem: n_steps must be positive");
    const std::size_t record_bytes = 4 * grid.n_points() * sizeof(double);
    segment_ = std::clamp<std::size_t>(memory_budget / record_bytes, 1, n_steps);
  }

  /// Steps needed so that the uniform step satisfies the advective CFL bound for
  /// every zero-mean field with |u|_inf <= linf (the maximum principle keeps it there).
  static std::size_t steps_for(const GridSpec1D& grid, double linf, double horizon, double cfl) {
    const double dt = cfl_step(grid, linf, cfl);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / dt)));
  }

  double dt() const noexcept { return horizon_ / static_cast<double>(n_steps_); }
  std::size_t n_steps() const noexcept { return n_steps_; }
  /// Steps per checkpoint segment; equal to n_steps when every stage fits in memory.
  std::size_t segment() const noexcept { return segment_; }

  double value(const Field1D& u0) {
    ComplexVec uhat = stepper_.to_spectral(u0);
    for (std::size_t s = 0; s < n_steps_; ++s) stepper_.advance(uhat, dt());
    return terminal_enstrophy(uhat);
  }

  /// J and its L2 gradient.
  std::pair<double, Field1D> value_and_gradient(const Field1D& u0) {
    const std::size_t n_seg = (n_steps_ + segment_ - 1) / segment_;
    std::vector<ComplexVec> checkpoints;
    checkpoints.reserve(n_seg);
    std::vector<StageRecord> records;
    const bool full = n_seg == 1;
    if (full) records.resize(n_steps_);

    ComplexVec uhat = stepper_.to_spectral(u0);
    for (std::size_t s = 0; s < n_steps_; ++s) {
      if (s % segment_ == 0) checkpoints.push_back(uhat);
      stepper_.advance(uhat, dt(), full ? &records[s] : nullptr);
    }
    const double j = terminal_enstrophy(uhat);
    std::vector<double> check;
    stepper_.physical(uhat, check);
    if (!all_finite(check) || !std::isfinite(j)) {
      throw BlowUpError("FiniteTimeProblem: non-finite forward state", 0.0);
    }

    // Euclidean gradient of dx sum (Du)^2 is -2 dx D^2 u; in FFT coordinates 2 dx (2 pi k)^2 u_k.
    ComplexVec lam(uhat.size());
    const std::size_t nyq = grid_.n_points() / 2;
    for (std::size_t k = 0; k < lam.size(); ++k) {
      const double w = kTwoPi * static_cast<double>(k);
      lam[k] = k == nyq ? 0.0 : 2.0 * grid_.dx() * w * w * uhat[k];
    }

    for (std::size_t seg = n_seg; seg-- > 0;) {
      const std::size_t first = seg * segment_;
      const std::size_t last = std::min(n_steps_, first + segment_);
      if (!full) {
        records.assign(last - first, StageRecord{});
        ComplexVec v = checkpoints[seg];
        for (std::size_t s = first; s < last; ++s) stepper_.advance(v, dt(), &records[s - first]);
      }
      for (std::size_t s = last; s-- > first;) stepper_.adjoint(records[s - first], dt(), lam);
    }

    std::vector<double> g;
    stepper_.physical(lam, g);
    const double inv_dx = 1.0 / grid_.dx();
    for (double& x : g) x *= inv_dx;
    return {j, Field1D(grid_, std::move(g))};
  }

 private:
  double terminal_enstrophy(const ComplexVec& uhat) const {
    const std::size_t nyq = grid_.n_points() / 2;
    return detail::parseval_sum(uhat, grid_.n_points(), [&](std::size_t k) {
      if (k == nyq) return 0.0;
      const double w = kTwoPi * static_cast<double>(k);
      return w * w;
    });
  }

  GridSpec1D grid_;
  double nu_;
  double horizon_;
  std::size_t n_steps_;
  bool dealias_;
  BurgersStepper stepper_;
  std::size_t segment_;
};

/// L2 gradient of u0 -> E(u(T)), with the step count fixed by the CFL bound at u0.
inline Field1D finite_time_gradient(const Field1D& u0, double horizon, double nu, double cfl = 0.4) {
  check_zero_mean(u0, 1e-10);
  const std::size_t steps = FiniteTimeProblem::steps_for(u0.grid(), max_abs(u0.values()), horizon, cfl);
  FiniteTimeProblem p(u0.grid(), nu, horizon, steps);
  return p.value_and_gradient(u0).second;
}

/// Ascent for E(T) over the sphere E(u0) = e0. On the sphere |u0|_inf <= sqrt(e0)/2,
/// which fixes one step count valid for every iterate.
inline OptimResult finite_time_maximize(const OptimConfig& cfg, const GridSpec1D& grid, const Field1D& seed) {
  cfg.validate(true);
  if (!(seed.grid() == grid)) throw ConfigError("finite_time_maximize: seed grid mismatch");
  const double linf_bound = 0.5 * std::sqrt(cfg.e0);
  const std::size_t need = required_points(linf_bound, cfg.nu, SolverConfig{}.min_resolution_per_shock);
  if (grid.n_points() < need) {
    throw ResolutionError("finite_time_maximize: need N >= " + std::to_string(need), need);
  }
  const std::size_t steps = FiniteTimeProblem::steps_for(grid, linf_bound, cfg.horizon, cfg.cfl);
  auto problem = std::make_shared<FiniteTimeProblem>(grid, cfg.nu, cfg.horizon, steps, cfg.dealias,
                                                     cfg.memory_budget);
  Objective obj{[problem](const Field1D& u) { return problem->value(u); },
                [problem](const Field1D& u) { return problem->value_and_gradient(u); }};
  return sphere_ascent(cfg, seed, obj);
}

inline OptimResult finite_time_multistart(const OptimConfig& cfg, const GridSpec1D& grid,
                                          std::uint64_t seed = 0, std::size_t starts = 5) {
  std::optional<OptimResult> best;
  for (const auto& s : default_seeds(grid, seed, starts)) {
    auto r = finite_time_maximize(cfg, grid, s);
    if (!best || r.objective > best->objective) best = std::move(r);
  }
  return std::move(*best);
}

}  // namespace enstro
