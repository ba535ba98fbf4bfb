#pragma once

// Viscous scalar conservation law u_t + div f(u) = nu Lap u on periodic boxes
// [0, L)^n: MUSCL/minmod reconstruction, local Lax-Friedrichs fluxes, centered
// explicit diffusion, SSP-RK2 per dimensional sweep.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "enstro/burgers.hpp"
#include "enstro/errors.hpp"
#include "enstro/field.hpp"

namespace enstro {

class GridSpecND {
 public:
  GridSpecND(std::size_t dim, std::size_t n_points, double length = 1.0)
      : dim_(dim), n_(n_points), length_(length) {
    if (dim == 0) throw ConfigError("GridSpecND: dim must be positive");
    if (n_points < 8 || !is_power_of_two(n_points)) {
      throw ConfigError("GridSpecND: points per axis must be a power of two >= 8");
    }
    if (!(length >= 1.0) || !std::isfinite(length)) throw ConfigError("GridSpecND: box length must be >= 1");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_points() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_); }
  double cell_volume() const noexcept { return std::pow(dx(), static_cast<double>(dim_)); }

  std::size_t size() const noexcept {
    std::size_t s = 1;
    for (std::size_t a = 0; a < dim_; ++a) s *= n_;
    return s;
  }
  /// Distance between neighbours along axis a in the row-major layout.
  std::size_t stride(std::size_t axis) const noexcept {
    std::size_t s = 1;
    for (std::size_t a = axis + 1; a < dim_; ++a) s *= n_;
    return s;
  }

  friend bool operator==(const GridSpecND&, const GridSpecND&) = default;

 private:
  std::size_t dim_;
  std::size_t n_;
  double length_;
};

/// Cell averages, row-major (last axis contiguous). Cell centres sit at idx*dx.
class FieldND {
 public:
  FieldND(GridSpecND grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw ConfigError("FieldND: shape does not match grid");
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("FieldND: non-finite value");
    }
  }

  static FieldND zeros(GridSpecND grid) { return FieldND(grid, std::vector<double>(grid.size(), 0.0)); }

  /// Samples f(x) with x the vector of cell-centre coordinates.
  template <class F>
  static FieldND sample(GridSpecND grid, F&& f) {
    std::vector<double> v(grid.size());
    std::vector<double> x(grid.dim());
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t a = grid.dim(); a-- > 0;) {
        x[a] = static_cast<double>(rem % grid.n_points()) * grid.dx();
        rem /= grid.n_points();
      }
      v[flat] = f(static_cast<const std::vector<double>&>(x));
    }
    return FieldND(grid, std::move(v));
  }

  static FieldND from_1d(const Field1D& f) {
    const std::vector<double> v(f.values().begin(), f.values().end());
    return FieldND(GridSpecND(1, f.size(), 1.0), v);
  }

  const GridSpecND& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend FieldND operator*(double s, const FieldND& f) {
    std::vector<double> v(f.values_);
    for (double& x : v) x *= s;
    return FieldND(f.grid_, std::move(v));
  }

 private:
  GridSpecND grid_;
  std::vector<double> values_;
};

enum class FluxShape { quadratic, linear, cubic };

/// f(u) = (w_1 phi(u), ..., w_n phi(u)) with phi one of u^2/2, u, u^3/3.
struct FluxSpec {
  std::string name;
  std::vector<double> weights;
  FluxShape shape = FluxShape::quadratic;
  double lip_on_unit = 0.0;  ///< max over |u| <= 1 of |f'(u)|

  std::size_t dim() const noexcept { return weights.size(); }

  double phi(double u) const noexcept {
    switch (shape) {
      case FluxShape::quadratic: return 0.5 * u * u;
      case FluxShape::linear: return u;
      case FluxShape::cubic: return u * u * u / 3.0;
    }
    return 0.0;
  }
  double dphi(double u) const noexcept {
    switch (shape) {
      case FluxShape::quadratic: return u;
      case FluxShape::linear: return 1.0;
      case FluxShape::cubic: return u * u;
    }
    return 0.0;
  }

  std::vector<double> eval(double u) const {
    std::vector<double> out(weights);
    for (double& w : out) w *= phi(u);
    return out;
  }
  std::vector<double> deriv(double u) const {
    std::vector<double> out(weights);
    for (double& w : out) w *= dphi(u);
    return out;
  }
};

namespace detail {

inline FluxSpec make_flux(std::string name, std::vector<double> w, FluxShape shape) {
  double norm = 0.0;
  for (double x : w) norm += x * x;
  // |phi'| <= 1 on [-1, 1] for every shape.
  return {std::move(name), std::move(w), shape, std::sqrt(norm)};
}

}  // namespace detail

/// Looks a flux up by name for dimension dim. Recognized: "burgers" (u^2/2 per
/// axis, scaled by 1/sqrt(n)), "burgers1d" (u^2/2 along the first axis only),
/// "linear(c=<c>)" (c u / sqrt(n) per axis), "cubic" (u^3/3 per axis / sqrt(n)).
inline FluxSpec find_flux(const std::string& name, std::size_t dim) {
  if (dim == 0) throw ConfigError("find_flux: dim must be positive");
  const double iso = 1.0 / std::sqrt(static_cast<double>(dim));
  const std::vector<double> diag(dim, iso);
  if (name == "burgers") return detail::make_flux(name, diag, FluxShape::quadratic);
  if (name == "burgers1d") {
    std::vector<double> w(dim, 0.0);
    w[0] = 1.0;
    return detail::make_flux(name, w, FluxShape::quadratic);
  }
  if (name == "cubic") return detail::make_flux(name, diag, FluxShape::cubic);
  static const std::regex linear(R"(linear\(c=([-+0-9.eE]+)\))");
  std::smatch m;
  if (std::regex_match(name, m, linear)) {
    double c = 0.0;
    try {
      c = std::stod(m[1].str());
    } catch (const std::exception&) {
      throw LookupError("find_flux: bad coefficient in '" + name + "'");
    }
    return detail::make_flux(name, std::vector<double>(dim, c * iso), FluxShape::linear);
  }
  throw LookupError("unknown flux '" + name + "'; known: burgers, burgers1d, linear(c=<c>), cubic");
}

inline std::vector<FluxSpec> flux_registry(std::size_t dim) {
  std::vector<FluxSpec> out;
  for (const char* n : {"burgers", "burgers1d", "linear(c=1)", "cubic"}) out.push_back(find_flux(n, dim));
  return out;
}

struct NdConfig {
  double t_end = 0.5;
  double cfl = 0.4;
  std::size_t sample_stride = 10;
  /// Cells from each face whose TV is monitored when the box stands in for R^n; 0 disables.
  std::size_t boundary_band = 0;

  void validate() const {
    if (!(t_end > 0.0)) throw ConfigError("NdConfig: t_end must be positive");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("NdConfig: cfl must lie in (0, 0.5]");
    if (sample_stride == 0) throw ConfigError("NdConfig: sample_stride must be positive");
  }
};

struct NdDiagnostics {
  double linf = 0.0;
  double tv = 0.0;         ///< sum over axes of sum |Delta_a u| * cell_volume / dx
  double enstrophy = 0.0;  ///< |grad u|^2 with centred differences
  double energy = 0.0;
  double mean = 0.0;
  double min_ux = 0.0;     ///< smallest centred difference along the first axis
  double rate_diss = 0.0;  ///< -nu int (Lap u)^2
  double rate_flux = 0.0;  ///< int Lap u * f'(u) . grad u
  double boundary_tv = 0.0;
};

struct NdResult {
  DiagnosticsSeries diagnostics;  ///< rate_cubic holds the flux contribution
  FieldND final_state;
  std::size_t steps = 0;
  bool hypothesis_ok = true;      ///< |u0|_inf <= 1
  double max_boundary_tv = 0.0;
  double max_linf_increase = 0.0; ///< largest relative step-to-step growth of |u|_inf
  double max_tv_increase = 0.0;   ///< same for TV
  double max_mean_drift = 0.0;
};

namespace detail {

inline double minmod(double a, double b) {
  const double m = std::min(std::abs(a), std::abs(b));
  return a * b > 0.0 ? std::copysign(m, a) : 0.0;
}

template <FluxShape S>
inline double shape_phi(double u) {
  if constexpr (S == FluxShape::quadratic) return 0.5 * u * u;
  if constexpr (S == FluxShape::linear) return u;
  if constexpr (S == FluxShape::cubic) return u * u * u / 3.0;
}

template <FluxShape S>
inline double shape_dphi(double u) {
  if constexpr (S == FluxShape::quadratic) return u;
  if constexpr (S == FluxShape::linear) return 1.0;
  if constexpr (S == FluxShape::cubic) return u * u;
}

/// One periodic line of cells: SSP-RK2 on the semi-discrete flux/diffusion operator.
/// Buffers carry two ghost cells on each side.
class LineSolver {
 public:
  /// u holds m cells; it is overwritten with the state after one step.
  void step(double* u, std::size_t m, double w, FluxShape shape, double nu, double h, double dt) {
    switch (shape) {
      case FluxShape::quadratic: return step<FluxShape::quadratic>(u, m, w, nu, h, dt);
      case FluxShape::linear: return step<FluxShape::linear>(u, m, w, nu, h, dt);
      case FluxShape::cubic: return step<FluxShape::cubic>(u, m, w, nu, h, dt);
    }
  }

 private:
  template <FluxShape S>
  void step(double* u, std::size_t m, double w, double nu, double h, double dt) {
    a_.resize(m + 4);
    b_.resize(m + 4);
    rhs_.resize(m);
    slope_.resize(m + 2);
    face_.resize(m + 1);
    std::copy(u, u + m, a_.begin() + 2);
    rhs<S>(a_.data(), m, w, nu, h);
    for (std::size_t i = 0; i < m; ++i) b_[i + 2] = a_[i + 2] + dt * rhs_[i];
    rhs<S>(b_.data(), m, w, nu, h);
    for (std::size_t i = 0; i < m; ++i) u[i] = 0.5 * a_[i + 2] + 0.5 * (b_[i + 2] + dt * rhs_[i]);
  }

  template <FluxShape S>
  void rhs(double* v, std::size_t m, double w, double nu, double h) {
    v[0] = v[m];
    v[1] = v[m + 1];
    v[m + 2] = v[2];
    v[m + 3] = v[3];
    double* slope = slope_.data();
    double* face = face_.data();
    double* out = rhs_.data();
    // slope[i] belongs to buffer cell i + 1, i.e. cells -1..m.
    for (std::size_t i = 0; i < m + 2; ++i) slope[i] = minmod(v[i + 1] - v[i], v[i + 2] - v[i + 1]);
    const double inv_h = 1.0 / h, diff = nu / (h * h), aw = std::abs(w);
    // face[i] is the flux between cells i-1 and i.
    for (std::size_t i = 0; i <= m; ++i) {
      const double ul = v[i + 1] + 0.5 * slope[i];
      const double ur = v[i + 2] - 0.5 * slope[i + 1];
      const double alpha = aw * std::max(std::abs(shape_dphi<S>(ul)), std::abs(shape_dphi<S>(ur)));
      face[i] = 0.5 * w * (shape_phi<S>(ul) + shape_phi<S>(ur)) - 0.5 * alpha * (ur - ul);
    }
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = -(face[i + 1] - face[i]) * inv_h + diff * (v[i + 3] - 2.0 * v[i + 2] + v[i + 1]);
    }
  }

  std::vector<double> a_, b_, rhs_, slope_, face_;
};

/// Calls fn(base) for the first cell of every line along axis.
template <class Fn>
void for_each_line(const GridSpecND& g, std::size_t axis, Fn&& fn) {
  const std::size_t s = g.stride(axis), block = s * g.n_points();
  for (std::size_t outer = 0; outer < g.size(); outer += block) {
    for (std::size_t inner = 0; inner < s; ++inner) fn(outer + inner);
  }
}

/// 1 for cells within band cells of a face of the box.
inline std::vector<char> band_mask(const GridSpecND& g, std::size_t band) {
  std::vector<char> mask(g.size(), 0);
  const std::size_t n = g.n_points();
  for (std::size_t flat = 0; flat < mask.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const std::size_t idx = rem % n;
      rem /= n;
      if (idx < band || idx + band >= n) mask[flat] = 1;
    }
  }
  return mask;
}

inline NdDiagnostics diagnose(const GridSpecND& g, const std::vector<double>& v, const FluxSpec& f,
                              double nu, const std::vector<char>* band) {
  const std::size_t n = g.n_points(), total = g.size();
  const double dx = g.dx(), vol = g.cell_volume();
  NdDiagnostics d;
  d.min_ux = std::numeric_limits<double>::infinity();
  std::vector<double> lap(total, 0.0), transport(total, 0.0);
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    for_each_line(g, a, [&](std::size_t base) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = base + i * s;
        const std::size_t fwd = base + (i + 1 == n ? 0 : i + 1) * s;
        const std::size_t bwd = base + (i == 0 ? n - 1 : i - 1) * s;
        const double jump = std::abs(v[fwd] - v[c]) * vol / dx;
        d.tv += jump;
        if (band && (*band)[c]) d.boundary_tv += jump;
        const double grad = (v[fwd] - v[bwd]) / (2.0 * dx);
        d.enstrophy += grad * grad * vol;
        if (a == 0) d.min_ux = std::min(d.min_ux, grad);
        lap[c] += (v[fwd] - 2.0 * v[c] + v[bwd]) / (dx * dx);
        transport[c] += f.weights[a] * f.dphi(v[c]) * grad;
      }
    });
  }
  for (std::size_t i = 0; i < total; ++i) {
    d.linf = std::max(d.linf, std::abs(v[i]));
    d.energy += 0.5 * v[i] * v[i] * vol;
    d.mean += v[i];
    d.rate_diss -= nu * lap[i] * lap[i] * vol;
    d.rate_flux += lap[i] * transport[i] * vol;
  }
  d.mean /= static_cast<double>(total);
  return d;
}

}  // namespace detail

inline NdDiagnostics diagnose_nd(const FieldND& u, const FluxSpec& f, double nu, std::size_t band = 0) {
  const auto mask = detail::band_mask(u.grid(), band);
  return detail::diagnose(u.grid(), u.values(), f, nu, band > 0 ? &mask : nullptr);
}

/// Largest stable step: cfl / (max|f'|/dx + 2 n nu / dx^2).
inline double nd_time_step(const GridSpecND& g, const FluxSpec& f, double linf, double nu, double cfl) {
  double speed = 0.0;
  for (double w : f.weights) {
    speed = std::max(speed, std::abs(w) * std::max(std::abs(f.dphi(linf)), std::abs(f.dphi(-linf))));
  }
  // |phi'| is maximized at the ends of [-linf, linf] for every registered flux.
  const double dx = g.dx();
  const double rate = speed / dx + 2.0 * static_cast<double>(g.dim()) * nu / (dx * dx);
  return rate > 0.0 ? cfl / rate : std::numeric_limits<double>::infinity();
}

inline NdResult simulate_nd(const FieldND& u0, const FluxSpec& flux, double nu, const NdConfig& cfg) {
  cfg.validate();
  const GridSpecND g = u0.grid();
  if (g.dim() > 2) throw ConfigError("simulate_nd: only n = 1 and n = 2 are supported");
  if (flux.dim() != g.dim()) throw ConfigError("simulate_nd: flux dimension does not match grid");
  if (!(nu > 0.0)) throw ConfigError("simulate_nd: nu must be positive");

  std::vector<double> u = u0.values();
  const std::size_t n = g.n_points();
  detail::LineSolver line_solver;
  const auto mask = detail::band_mask(g, cfg.boundary_band);
  const std::vector<char>* band = cfg.boundary_band > 0 ? &mask : nullptr;

  std::vector<double> transposed(g.dim() == 2 ? g.size() : 0);
  auto transpose = [n](const std::vector<double>& from, std::vector<double>& to) {
    constexpr std::size_t tile = 16;
    for (std::size_t i0 = 0; i0 < n; i0 += tile)
      for (std::size_t j0 = 0; j0 < n; j0 += tile)
        for (std::size_t i = i0; i < std::min(n, i0 + tile); ++i)
          for (std::size_t j = j0; j < std::min(n, j0 + tile); ++j) to[j * n + i] = from[i * n + j];
  };

  // Lines along the last axis are contiguous; the first axis of a 2D box is
  // swept on the transposed array.
  auto sweep = [&](std::size_t axis, double dt) {
    const double w = flux.weights[axis];
    const bool strided = g.stride(axis) != 1;
    std::vector<double>& data = strided ? transposed : u;
    if (strided) transpose(u, data);
    for (std::size_t base = 0; base < data.size(); base += n) {
      line_solver.step(data.data() + base, n, w, flux.shape, nu, g.dx(), dt);
    }
    if (strided) transpose(data, u);
  };

  auto row_of = [&](double t, const NdDiagnostics& d) {
    DiagnosticsRow r;
    r.t = t;
    r.energy = d.energy;
    r.enstrophy = d.enstrophy;
    r.tv = d.tv;
    r.linf = d.linf;
    r.min_ux = d.min_ux;
    r.rate_diss = d.rate_diss;
    r.rate_cubic = d.rate_flux;
    return r;
  };

  NdResult out{{}, u0, 0, true, 0.0, 0.0, 0.0, 0.0};
  NdDiagnostics d = detail::diagnose(g, u, flux, nu, band);
  out.hypothesis_ok = d.linf <= 1.0 + 1e-12;
  out.max_boundary_tv = d.boundary_tv;
  out.diagnostics.append(row_of(0.0, d));
  const double mean0 = d.mean;

  double t = 0.0;
  while (t < cfg.t_end) {
    double dt = nd_time_step(g, flux, d.linf, nu, cfg.cfl);
    const bool last = t + dt >= cfg.t_end;
    if (last) dt = cfg.t_end - t;
    const bool forward = out.steps % 2 == 0;
    for (std::size_t k = 0; k < g.dim(); ++k) sweep(forward ? k : g.dim() - 1 - k, dt);
    if (!all_finite(u)) throw BlowUpError("simulate_nd: non-finite state after t = " + format_double(t), t);
    t = last ? cfg.t_end : t + dt;
    ++out.steps;

    // Monotone quantities are compared between consecutive samples.
    const bool sample = out.steps % cfg.sample_stride == 0 || last;
    if (!sample) {
      d.linf = max_abs(u);
      continue;
    }
    const NdDiagnostics prev = d;
    d = detail::diagnose(g, u, flux, nu, band);
    if (prev.linf > 0.0) out.max_linf_increase = std::max(out.max_linf_increase, d.linf / prev.linf - 1.0);
    if (prev.tv > 0.0) out.max_tv_increase = std::max(out.max_tv_increase, d.tv / prev.tv - 1.0);
    out.max_mean_drift = std::max(out.max_mean_drift, std::abs(d.mean - mean0));
    out.max_boundary_tv = std::max(out.max_boundary_tv, d.boundary_tv);
    if (sample) out.diagnostics.append(row_of(t, d));
  }
  out.final_state = FieldND(g, std::move(u));
  return out;
}

/// Scales u so that |u|_inf, the discrete |grad u|_1 and |grad u|_2^2 are all <= 1,
/// with equality in the binding one.
inline FieldND hypothesis_normalize(const FieldND& u) {
  const NdDiagnostics d = diagnose_nd(u, find_flux("burgers", u.grid().dim()), 1.0);
  const double s = std::max({d.linf, d.tv, std::sqrt(d.enstrophy)});
  if (!(s > 0.0)) throw DegenerateInputError("hypothesis_normalize: zero field");
  return (1.0 / s) * u;
}

/// Named multi-D data before normalization: "sine" (product of first modes),
/// "random" (seeded low-mode trigonometric sum), "bump" (compact C-infinity bump of
/// radius L/4 at the box centre).
inline FieldND make_nd_datum(const std::string& name, const GridSpecND& g, std::uint64_t seed = 0) {
  const double L = g.length();
  if (name == "sine") {
    return FieldND::sample(g, [L](const std::vector<double>& x) {
      double p = 1.0;
      for (double xi : x) p *= std::sin(kTwoPi * xi / L);
      return p;
    });
  }
  if (name == "bump") {
    return FieldND::sample(g, [L](const std::vector<double>& x) {
      double r2 = 0.0;
      for (double xi : x) r2 += (xi - 0.5 * L) * (xi - 0.5 * L);
      r2 /= (0.25 * L) * (0.25 * L);
      return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    });
  }
  if (name == "random") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    constexpr int K = 4;
    // Coefficient per (axis-wavenumber tuple): modes with every |k_a| <= K - 1.
    std::size_t count = 1;
    for (std::size_t a = 0; a < g.dim(); ++a) count *= 2 * K - 1;
    std::vector<double> cs(count), sn(count);
    for (std::size_t i = 0; i < count; ++i) {
      cs[i] = normal(rng);
      sn[i] = normal(rng);
    }
    return FieldND::sample(g, [&](const std::vector<double>& x) {
      double s = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t rem = i;
        double phase = 0.0, k2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
          const double k = static_cast<double>(static_cast<int>(rem % (2 * K - 1)) - (K - 1));
          rem /= 2 * K - 1;
          phase += k * x[a];
          k2 += k * k;
        }
        if (k2 == 0.0) continue;
        phase *= kTwoPi / L;
        s += (cs[i] * std::cos(phase) + sn[i] * std::sin(phase)) / (1.0 + k2);
      }
      return s;
    });
  }
  throw LookupError("unknown multi-D datum '" + name + "'; known: sine, random, bump");
}

// Dump format: "DIM=<n> N=<points> L=<len>" then row-major values, one per line.

inline void write_dump(std::ostream& os, const FieldND& f) {
  os << "DIM=" << f.grid().dim() << " N=" << f.grid().n_points()
     << " L=" << format_double(f.grid().length()) << '\n';
  for (double v : f.values()) os << format_double(v) << '\n';
}

inline FieldND read_dump_nd(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("read_dump_nd: missing header");
  std::size_t dim = 0, n = 0;
  double len = 0.0;
  if (std::sscanf(header.c_str(), "DIM=%zu N=%zu L=%lf", &dim, &n, &len) != 3) {
    throw ConfigError("read_dump_nd: malformed header '" + header + "'");
  }
  GridSpecND grid(dim, n, len);
  std::vector<double> v;
  v.reserve(grid.size());
  std::string line;
  while (v.size() < grid.size() && std::getline(is, line)) {
    if (!line.empty()) v.push_back(std::stod(line));
  }
  return FieldND(grid, std::move(v));
}

inline void save_dump(const std::string& path, const FieldND& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_dump(os, f);
}

inline const char* kNdDiagnosticsHeader = "t,energy,enstrophy,tv,linf,min_ux,rate_diss,rate_cubic,dim,L";

inline void write_csv(std::ostream& os, const NdResult& r) {
  const GridSpecND& g = r.final_state.grid();
  os << kNdDiagnosticsHeader << '\n';
  for (const auto& row : r.diagnostics.rows()) {
    write_csv_row(os, row);
    os << ',' << g.dim() << ',' << format_double(g.length()) << '\n';
  }
}

}  // namespace enstro
