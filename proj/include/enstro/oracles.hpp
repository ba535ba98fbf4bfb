#pragma once

// Closed-form references: Hopf-Cole solutions, the tanh shock profile,
// heat-smoothing ratios and the Gronwall envelope.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "enstro/errors.hpp"
#include "enstro/field.hpp"

namespace enstro {

/// Zero-mean periodic primitive Phi with d_x Phi = u (u must have zero mean).
inline Field1D antiderivative(const Field1D& u) {
  const std::size_t nyq = u.size() / 2;
  return apply_symbol(u, [&](std::size_t k) -> std::complex<double> {
    if (k == 0 || k == nyq) return 0.0;
    return 1.0 / std::complex<double>(0.0, kTwoPi * static_cast<double>(k));
  });
}

/// Exact viscous Burgers solution via u = -2 nu d_x log(theta), theta solving the heat equation.
/// Throws UnderflowError when theta leaves the range where the quotient is trustworthy.
inline Field1D hopf_cole_solution(const Field1D& u0, double nu, double t) {
  if (!(nu > 0.0)) throw DomainError("hopf_cole_solution: nu must be positive");
  if (!(t >= 0.0)) throw DomainError("hopf_cole_solution: t must be nonnegative");
  if (std::abs(norms(u0).mean) > 1e-12) {
    throw DomainError("hopf_cole_solution: u0 must have zero mean for a periodic potential");
  }
  const Field1D phi = antiderivative(u0);
  const double phi_min = *std::min_element(phi.values().begin(), phi.values().end());
  std::vector<double> theta0(u0.size());
  for (std::size_t j = 0; j < theta0.size(); ++j) {
    theta0[j] = std::exp(-(phi[j] - phi_min) / (2.0 * nu));
  }
  const double floor = 1e-300;
  if (*std::min_element(theta0.begin(), theta0.end()) < floor) {
    throw UnderflowError("hopf_cole_solution: exp(-Phi/(2 nu)) underflows; increase nu");
  }
  const Field1D theta = heat_propagate(Field1D(u0.grid(), std::move(theta0)), nu * t);
  const auto [lo, hi] = std::minmax_element(theta.values().begin(), theta.values().end());
  // Spectral round-off is relative to max theta; below this ratio the log-derivative is noise.
  if (*lo < floor || *lo < 1e-10 * *hi) {
    throw UnderflowError("hopf_cole_solution: theta dynamic range too large; increase nu or reduce t");
  }
  const Field1D theta_x = derivative(theta, 1);
  std::vector<double> u(u0.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = -2.0 * nu * theta_x[j] / theta[j];
  return Field1D(u0.grid(), std::move(u));
}

/// u(x) = -U tanh(x / ell) with ell = nu / U.
struct ShockProfile {
  double amplitude;
  double nu;

  ShockProfile(double U, double nu_) : amplitude(U), nu(nu_) {
    if (!(U > 0.0) || !(nu_ > 0.0)) throw DomainError("ShockProfile: U and nu must be positive");
  }
  double ell() const noexcept { return nu / amplitude; }
  double operator()(double x) const { return -amplitude * std::tanh(x / ell()); }
  double slope(double x) const {
    const double s = 1.0 / std::cosh(x / ell());
    return -amplitude / ell() * s * s;
  }
};

/// Whole-line enstrophy of the tanh profile, (4/3) U^3 / nu. On a periodic box of
/// half-width a the neglected tail is O(U^3/nu * exp(-4 a / ell)).
inline double shock_enstrophy(double U, double nu) {
  if (!(U > 0.0) || !(nu > 0.0)) throw DomainError("shock_enstrophy: U and nu must be positive");
  return 4.0 / 3.0 * U * U * U / nu;
}

struct HeatRatios {
  double r1 = 0.0;  ///< |d_x e^{nu t Lap} v0|_2 (nu t)^{1/4} / (|v0|_inf |d_x v0|_1)^{1/2}
  double r2 = 0.0;  ///< same with d_xx and (nu t)^{3/4}
};

/// Smoothing ratios whose boundedness in t is the content of the heat estimates.
/// |d_x v0|_1 is the discrete total variation.
inline HeatRatios heat_estimate_ratios(const Field1D& v0, double nu, double t) {
  if (!(nu > 0.0) || !(t > 0.0)) throw DomainError("heat_estimate_ratios: nu and t must be positive");
  const Norms n0 = norms(v0);
  const double denom = std::sqrt(n0.linf * n0.tv);
  if (!(n0.tv > 0.0) || !(denom > 0.0)) {
    throw DegenerateInputError("heat_estimate_ratios: v0 is constant");
  }
  const double s = nu * t;
  const Field1D v = heat_propagate(v0, s);
  const double g1 = norms(derivative(v, 1)).l2;
  const double g2 = norms(derivative(v, 2)).l2;
  return {g1 * std::pow(s, 0.25) / denom, g2 * std::pow(s, 0.75) / denom};
}

/// Rigorous 1D constants for the ratios: the periodized heat kernel satisfies
/// |d_x G|_1 <= (pi s)^{-1/2}, and |k| e^{-k^2 s/2} <= (e s)^{-1/2}.
inline double heat_ratio_bound_r1() { return std::pow(std::numbers::pi, -0.25); }
inline double heat_ratio_bound_r2() {
  return std::pow(2.0, 0.25) * std::exp(-0.5) * std::pow(std::numbers::pi, -0.25);
}

/// E0 exp(lip^2 t / nu).
inline double gronwall_envelope(double e0, double lip, double nu, double t) {
  if (!(nu > 0.0)) throw DomainError("gronwall_envelope: nu must be positive");
  return e0 * std::exp(lip * lip * t / nu);
}

}  // namespace enstro
