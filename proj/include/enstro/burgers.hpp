#pragma once

// Viscous Burgers equation u_t + u u_x = nu u_xx on the unit torus:
// integrating-factor RK4 with the viscous part handled exactly in Fourier
// space and a 2/3-dealiased pseudospectral nonlinearity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "enstro/errors.hpp"
#include "enstro/fft.hpp"
#include "enstro/field.hpp"

namespace enstro {

using ComplexVec = std::vector<std::complex<double>>;

inline constexpr double kCflFloor = 1e-12;

struct SolverConfig {
  double nu = 0.05;
  double t_end = 1.0;
  double cfl = 0.4;
  bool dealias = true;
  std::size_t sample_stride = 100;
  double min_resolution_per_shock = 4.0;

  void validate() const {
    if (!(nu > 0.0)) throw ConfigError("SolverConfig: nu must be positive");
    if (!(t_end > 0.0)) throw ConfigError("SolverConfig: t_end must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("SolverConfig: cfl must lie in (0, 1]");
    if (sample_stride == 0) throw ConfigError("SolverConfig: sample_stride must be positive");
    if (!(min_resolution_per_shock > 0.0)) {
      throw ConfigError("SolverConfig: min_resolution_per_shock must be positive");
    }
  }
};

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;      ///< (1/2) int u^2
  double enstrophy = 0.0;   ///< int u_x^2
  double tv = 0.0;
  double linf = 0.0;
  double min_ux = 0.0;
  double rate_diss = 0.0;   ///< -nu int u_xx^2
  double rate_cubic = 0.0;  ///< -(1/2) int u_x^3; rate_diss + rate_cubic = (1/2) dE/dt
};

class DiagnosticsSeries {
 public:
  void append(const DiagnosticsRow& row) {
    if (!rows_.empty() && !(row.t > rows_.back().t)) {
      throw ConfigError("DiagnosticsSeries: times must be strictly increasing");
    }
    rows_.push_back(row);
  }
  const std::vector<DiagnosticsRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const DiagnosticsRow& operator[](std::size_t i) const { return rows_[i]; }
  const DiagnosticsRow& back() const { return rows_.back(); }

 private:
  std::vector<DiagnosticsRow> rows_;
};

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  Field1D u;
};

/// Snapshots every sample_stride steps; the last entry is always the final state.
struct Trajectory {
  std::vector<Snapshot> snapshots;
  const Field1D& final_state() const { return snapshots.back().u; }
};

struct SimulationResult {
  Trajectory trajectory;
  DiagnosticsSeries diagnostics;
};

/// Stage inputs of one IF-RK4 step, kept for the discrete adjoint.
struct StageRecord {
  std::vector<double> w[4];  ///< physical stage inputs
};

/// Workspace for time stepping on a fixed grid. Not thread-safe; one per run.
class BurgersStepper {
 public:
  BurgersStepper(GridSpec1D grid, double nu, bool dealias = true)
      : grid_(grid), nu_(nu), fft_(grid.n_points()), n_(grid.n_points()), half_(n_ / 2 + 1),
        dmask_(half_), phys_(n_), prod_(n_), tmp_(half_) {
    if (!(nu > 0.0)) throw ConfigError("BurgersStepper: nu must be positive");
    for (std::size_t k = 0; k < half_; ++k) {
      const bool kept = k != n_ / 2 && (!dealias || 3 * k < n_);
      dmask_[k] = kept ? std::complex<double>(0.0, kTwoPi * static_cast<double>(k)) : 0.0;
    }
  }

  const GridSpec1D& grid() const noexcept { return grid_; }
  double nu() const noexcept { return nu_; }
  std::size_t half() const noexcept { return half_; }
  detail::RealFft& fft() noexcept { return fft_; }

  ComplexVec to_spectral(const Field1D& u) { return detail::half_spectrum(u, fft_); }
  Field1D to_physical(const ComplexVec& uhat) { return detail::from_half_spectrum(grid_, uhat, fft_); }

  /// Physical samples u_j of an unnormalized half spectrum.
  void physical(const ComplexVec& uhat, std::vector<double>& out) {
    out.resize(n_);
    fft_.backward(uhat.data(), out.data());
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (double& x : out) x *= inv_n;
  }

  /// Nonlinear term -(1/2) d_x P(u^2) in spectral form; optionally returns u.
  void nonlinear(const ComplexVec& uhat, ComplexVec& out, std::vector<double>* u_phys = nullptr) {
    physical(uhat, phys_);
    for (std::size_t j = 0; j < n_; ++j) prod_[j] = phys_[j] * phys_[j];
    out.resize(half_);
    fft_.forward(prod_.data(), out.data());
    for (std::size_t k = 0; k < half_; ++k) out[k] *= -0.5 * dmask_[k];
    if (u_phys) *u_phys = phys_;
  }

  /// One integrating-factor RK4 step, in place; the mean is projected out.
  void advance(ComplexVec& uhat, double dt, StageRecord* record = nullptr) {
    set_factors(dt);
    ComplexVec& k1 = k_[0];
    ComplexVec& k2 = k_[1];
    ComplexVec& k3 = k_[2];
    ComplexVec& k4 = k_[3];
    ComplexVec& w = w_;
    w.resize(half_);

    nonlinear(uhat, k1, record ? &record->w[0] : nullptr);
    for (std::size_t k = 0; k < half_; ++k) {
      k1[k] *= dt;
      w[k] = eh_[k] * (uhat[k] + 0.5 * k1[k]);
    }
    nonlinear(w, k2, record ? &record->w[1] : nullptr);
    for (std::size_t k = 0; k < half_; ++k) {
      k2[k] *= dt;
      w[k] = eh_[k] * uhat[k] + 0.5 * k2[k];
    }
    nonlinear(w, k3, record ? &record->w[2] : nullptr);
    for (std::size_t k = 0; k < half_; ++k) {
      k3[k] *= dt;
      w[k] = ef_[k] * uhat[k] + eh_[k] * k3[k];
    }
    nonlinear(w, k4, record ? &record->w[3] : nullptr);
    for (std::size_t k = 0; k < half_; ++k) {
      k4[k] *= dt;
      uhat[k] = ef_[k] * uhat[k] +
                (ef_[k] * k1[k] + 2.0 * eh_[k] * (k2[k] + k3[k]) + k4[k]) / 6.0;
    }
    uhat[0] = 0.0;
  }

  /// Transposed step: maps the Euclidean gradient with respect to the state
  /// after advance() to the gradient with respect to the state before it.
  /// `record` must come from the forward step with the same dt.
  void adjoint(const StageRecord& record, double dt, ComplexVec& lam) {
    set_factors(dt);
    lam[0] = 0.0;
    ComplexVec bu(half_), b1(half_), b2(half_), b3(half_), b4(half_), bw(half_);
    for (std::size_t k = 0; k < half_; ++k) {
      bu[k] = ef_[k] * lam[k];
      b1[k] = ef_[k] * lam[k] / 6.0;
      b2[k] = eh_[k] * lam[k] / 3.0;
      b3[k] = b2[k];
      b4[k] = lam[k] / 6.0;
    }
    stage_transpose(record.w[3], b4, dt, bw);
    for (std::size_t k = 0; k < half_; ++k) {
      bu[k] += ef_[k] * bw[k];
      b3[k] += eh_[k] * bw[k];
    }
    stage_transpose(record.w[2], b3, dt, bw);
    for (std::size_t k = 0; k < half_; ++k) {
      bu[k] += eh_[k] * bw[k];
      b2[k] += 0.5 * bw[k];
    }
    stage_transpose(record.w[1], b2, dt, bw);
    for (std::size_t k = 0; k < half_; ++k) {
      bu[k] += eh_[k] * bw[k];
      b1[k] += 0.5 * eh_[k] * bw[k];
    }
    stage_transpose(record.w[0], b1, dt, bw);
    for (std::size_t k = 0; k < half_; ++k) lam[k] = bu[k] + bw[k];
  }

  /// Diagnostics of the state uhat at time t; fills u and u_x samples.
  DiagnosticsRow diagnose(double t, const ComplexVec& uhat, std::vector<double>& u,
                          std::vector<double>& ux) {
    DiagnosticsRow row;
    row.t = t;
    physical(uhat, u);
    for (std::size_t k = 0; k < half_; ++k) tmp_[k] = deriv_symbol(k) * uhat[k];
    physical(tmp_, ux);
    const std::size_t nyq = n_ / 2;
    row.energy = 0.5 * detail::parseval_sum(uhat, n_, [](std::size_t) { return 1.0; });
    row.enstrophy = detail::parseval_sum(uhat, n_, [&](std::size_t k) {
      if (k == nyq) return 0.0;
      const double w = kTwoPi * static_cast<double>(k);
      return w * w;
    });
    row.rate_diss = -nu_ * detail::parseval_sum(uhat, n_, [&](std::size_t k) {
      if (k == nyq) return 0.0;
      const double w = kTwoPi * static_cast<double>(k);
      return w * w * w * w;
    });
    double cube = 0.0, min_ux = std::numeric_limits<double>::infinity(), linf = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      cube += ux[j] * ux[j] * ux[j];
      min_ux = std::min(min_ux, ux[j]);
      linf = std::max(linf, std::abs(u[j]));
    }
    row.rate_cubic = -0.5 * cube * grid_.dx();
    row.min_ux = min_ux;
    row.linf = linf;
    row.tv = total_variation(u);
    return row;
  }

  std::complex<double> deriv_symbol(std::size_t k) const {
    if (k == n_ / 2) return 0.0;
    return {0.0, kTwoPi * static_cast<double>(k)};
  }

 private:
  void set_factors(double dt) {
    if (dt == factors_dt_) return;
    eh_.resize(half_);
    ef_.resize(half_);
    for (std::size_t k = 0; k < half_; ++k) {
      const double w = kTwoPi * static_cast<double>(k);
      eh_[k] = std::exp(-0.5 * nu_ * w * w * dt);
      ef_[k] = eh_[k] * eh_[k];
    }
    factors_dt_ = dt;
  }

  // bw = FFT( dt * w .* IFFT(DP * bk) ), the transposed linearized stage.
  void stage_transpose(const std::vector<double>& w, const ComplexVec& bk, double dt, ComplexVec& bw) {
    for (std::size_t k = 0; k < half_; ++k) tmp_[k] = dmask_[k] * bk[k];
    physical(tmp_, phys_);
    for (std::size_t j = 0; j < n_; ++j) prod_[j] = dt * w[j] * phys_[j];
    bw.resize(half_);
    fft_.forward(prod_.data(), bw.data());
  }

  GridSpec1D grid_;
  double nu_;
  detail::RealFft fft_;
  std::size_t n_;
  std::size_t half_;
  ComplexVec dmask_;
  std::vector<double> phys_, prod_;
  ComplexVec tmp_;
  ComplexVec k_[4];
  ComplexVec w_;
  std::vector<double> eh_, ef_;
  double factors_dt_ = std::numeric_limits<double>::quiet_NaN();
};

/// Largest stable advective step cfl*dx/max(|u|, floor).
inline double cfl_step(const GridSpec1D& grid, double linf, double cfl) {
  return cfl * grid.dx() / std::max(linf, kCflFloor);
}

/// One IF-RK4 step of the field u.
inline Field1D step(const Field1D& u, double dt, double nu, double cfl = 0.4, bool dealias = true) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  const double limit = cfl_step(u.grid(), max_abs(u.values()), cfl);
  if (dt > limit * (1.0 + 1e-12)) throw DomainError("step: dt violates the advective CFL limit");
  BurgersStepper stepper(u.grid(), nu, dealias);
  ComplexVec uhat = stepper.to_spectral(u);
  stepper.advance(uhat, dt);
  std::vector<double> out;
  stepper.physical(uhat, out);
  if (!all_finite(out)) throw BlowUpError("step: non-finite state", 0.0);
  return Field1D(u.grid(), std::move(out));
}

/// Grid points needed so that dx <= (nu / linf) / per_shock.
inline std::size_t required_points(double linf, double nu, double per_shock) {
  if (linf <= 0.0) return 8;
  return std::max<std::size_t>(8, next_power_of_two(linf * per_shock / nu));
}

inline void check_resolution(const Field1D& u0, double nu, double per_shock) {
  const double linf = max_abs(u0.values());
  const std::size_t need = required_points(linf, nu, per_shock);
  if (u0.size() < need) {
    throw ResolutionError("grid of " + std::to_string(u0.size()) +
                              " points under-resolves the shock width nu/|u0|_inf; need N >= " +
                              std::to_string(need),
                          need);
  }
}

inline void check_zero_mean(const Field1D& u0, double tol = 1e-12) {
  const double m = norms(u0).mean;
  if (std::abs(m) > tol) {
    throw DomainError("initial field must have zero mean (mean = " + format_double(m) + ")");
  }
}

/// Called after every accepted step with (t, u, u_x) samples.
using StepObserver = std::function<void(double, std::span<const double>, std::span<const double>)>;

inline SimulationResult simulate(const Field1D& u0, const SolverConfig& cfg,
                                 const StepObserver& observer = {}) {
  cfg.validate();
  check_zero_mean(u0);
  check_resolution(u0, cfg.nu, cfg.min_resolution_per_shock);

  const GridSpec1D grid = u0.grid();
  BurgersStepper stepper(grid, cfg.nu, cfg.dealias);
  ComplexVec uhat = stepper.to_spectral(u0);
  std::vector<double> u, ux;

  SimulationResult out;
  double t = 0.0;
  std::size_t steps = 0;
  DiagnosticsRow row = stepper.diagnose(t, uhat, u, ux);
  out.diagnostics.append(row);
  out.trajectory.snapshots.push_back({0, 0.0, u0});
  if (observer) observer(t, u, ux);

  while (t < cfg.t_end) {
    double dt = cfl_step(grid, row.linf, cfg.cfl);
    const bool last = t + dt >= cfg.t_end;
    if (last) dt = cfg.t_end - t;
    stepper.advance(uhat, dt);
    const double t_next = last ? cfg.t_end : t + dt;
    row = stepper.diagnose(t_next, uhat, u, ux);
    if (!all_finite(u) || !std::isfinite(row.enstrophy)) {
      throw BlowUpError("simulate: non-finite state after t = " + format_double(t), t);
    }
    t = t_next;
    ++steps;
    out.diagnostics.append(row);
    if (observer) observer(t, u, ux);
    if (steps % cfg.sample_stride == 0 || last) {
      out.trajectory.snapshots.push_back({steps, t, Field1D(grid, u)});
    }
  }
  return out;
}

/// Uniform-step integration, the forward map used by the adjoint.
inline Field1D integrate_fixed(const Field1D& u0, double nu, double dt, std::size_t n_steps,
                               bool dealias = true) {
  BurgersStepper stepper(u0.grid(), nu, dealias);
  ComplexVec uhat = stepper.to_spectral(u0);
  for (std::size_t s = 0; s < n_steps; ++s) stepper.advance(uhat, dt);
  std::vector<double> out;
  stepper.physical(uhat, out);
  if (!all_finite(out)) throw BlowUpError("integrate_fixed: non-finite state", 0.0);
  return Field1D(u0.grid(), std::move(out));
}

struct EnstrophyRate {
  double total = 0.0;        ///< (1/2) dE/dt
  double dissipation = 0.0;  ///< -nu int u_xx^2
  double cubic = 0.0;        ///< -(1/2) int u_x^3
};

/// Instantaneous enstrophy growth (1/2) dE/dt of the Burgers flow at state u.
inline EnstrophyRate enstrophy_rate(const Field1D& u, double nu) {
  BurgersStepper stepper(u.grid(), nu, false);
  ComplexVec uhat = stepper.to_spectral(u);
  std::vector<double> phys, ux;
  const DiagnosticsRow row = stepper.diagnose(0.0, uhat, phys, ux);
  return {row.rate_diss + row.rate_cubic, row.rate_diss, row.rate_cubic};
}

struct SupEnstrophy {
  double t_star = 0.0;
  double e_star = 0.0;
};

/// Maximum of E(t) over the series, refined by the parabola through the
/// samples around the discrete argmax.
inline SupEnstrophy sup_enstrophy(const DiagnosticsSeries& diag) {
  if (diag.empty()) throw DomainError("sup_enstrophy: empty series");
  const auto& r = diag.rows();
  std::size_t i = 0;
  for (std::size_t j = 1; j < r.size(); ++j) {
    if (r[j].enstrophy > r[i].enstrophy) i = j;
  }
  SupEnstrophy out{r[i].t, r[i].enstrophy};
  if (i == 0 || i + 1 >= r.size()) return out;

  const double t0 = r[i - 1].t, t1 = r[i].t, t2 = r[i + 1].t;
  const double e0 = r[i - 1].enstrophy, e1 = r[i].enstrophy, e2 = r[i + 1].enstrophy;
  // Newton form: e(t) = e0 + d1 (t - t0) + d2 (t - t0)(t - t1).
  const double d01 = (e1 - e0) / (t1 - t0);
  const double d12 = (e2 - e1) / (t2 - t1);
  const double d2 = (d12 - d01) / (t2 - t0);
  if (!(d2 < 0.0)) return out;
  const double tv = 0.5 * (t0 + t1) - d01 / (2.0 * d2);
  const double tc = std::clamp(tv, t0, t2);
  const double ev = e0 + d01 * (tc - t0) + d2 * (tc - t0) * (tc - t1);
  if (ev > out.e_star) out = {tc, ev};
  return out;
}

/// Largest relative step-to-step growth of |u|_inf and TV over a series.
struct MonotoneIncreases {
  double linf = 0.0;
  double tv = 0.0;
};

inline MonotoneIncreases monotone_increases(const DiagnosticsSeries& diag) {
  MonotoneIncreases m;
  const auto& r = diag.rows();
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i - 1].linf > 0.0) m.linf = std::max(m.linf, r[i].linf / r[i - 1].linf - 1.0);
    if (r[i - 1].tv > 0.0) m.tv = std::max(m.tv, r[i].tv / r[i - 1].tv - 1.0);
  }
  return m;
}

inline const char* kDiagnosticsHeader = "t,energy,enstrophy,tv,linf,min_ux,rate_diss,rate_cubic";

inline void write_csv_row(std::ostream& os, const DiagnosticsRow& r) {
  os << format_double(r.t) << ',' << format_double(r.energy) << ',' << format_double(r.enstrophy)
     << ',' << format_double(r.tv) << ',' << format_double(r.linf) << ','
     << format_double(r.min_ux) << ',' << format_double(r.rate_diss) << ','
     << format_double(r.rate_cubic);
}

inline void write_csv(std::ostream& os, const DiagnosticsSeries& diag) {
  os << kDiagnosticsHeader << '\n';
  for (const auto& r : diag.rows()) {
    write_csv_row(os, r);
    os << '\n';
  }
}

inline std::string snapshot_name(std::size_t index, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%zu_t%.6f.dat", index, t);
  return buf;
}

/// Writes one dump per snapshot into dir; returns the file names.
inline std::vector<std::string> write_trajectory(const std::filesystem::path& dir,
                                                 const Trajectory& traj) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const std::string name = snapshot_name(i, traj.snapshots[i].t);
    save_dump((dir / name).string(), traj.snapshots[i].u);
    names.push_back(name);
  }
  return names;
}

}  // namespace enstro
