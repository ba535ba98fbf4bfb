#pragma once

// Periodic 1D fields on the unit torus and their Fourier representation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "enstro/errors.hpp"
#include "enstro/fft.hpp"

namespace enstro {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(double n) {
  std::size_t p = 1;
  while (static_cast<double>(p) < n) p <<= 1;
  return p;
}

/// Uniform grid x_j = j dx on the unit torus R/Z.
class GridSpec1D {
 public:
  explicit GridSpec1D(std::size_t n_points) : n_(n_points) {
    if (n_points < 8 || !is_power_of_two(n_points)) {
      throw ConfigError("GridSpec1D: n_points must be a power of two >= 8, got " +
                        std::to_string(n_points));
    }
  }

  std::size_t n_points() const noexcept { return n_; }
  double length() const noexcept { return 1.0; }
  double dx() const noexcept { return length() / static_cast<double>(n_); }
  double x(std::size_t j) const noexcept { return static_cast<double>(j) * dx(); }

  friend bool operator==(const GridSpec1D&, const GridSpec1D&) = default;

 private:
  std::size_t n_;
};

/// Real samples of a periodic function at the grid nodes.
class Field1D {
 public:
  Field1D(GridSpec1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_points()) {
      throw ConfigError("Field1D: expected " + std::to_string(grid_.n_points()) + " values, got " +
                        std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("Field1D: non-finite sample");
    }
  }

  static Field1D zeros(GridSpec1D grid) {
    return Field1D(grid, std::vector<double>(grid.n_points(), 0.0));
  }

  template <class F>
  static Field1D sample(GridSpec1D grid, F&& f) {
    std::vector<double> v(grid.n_points());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
    return Field1D(grid, std::move(v));
  }

  const GridSpec1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  /// Moves the samples out, leaving the field empty.
  std::vector<double> release() && { return std::move(values_); }

  friend Field1D operator+(const Field1D& a, const Field1D& b) { return combine(a, 1.0, b, 1.0); }
  friend Field1D operator-(const Field1D& a, const Field1D& b) { return combine(a, 1.0, b, -1.0); }
  friend Field1D operator*(double s, const Field1D& a) {
    std::vector<double> v(a.values_);
    for (double& x : v) x *= s;
    return Field1D(a.grid_, std::move(v));
  }

  /// a*x + b*y, samplewise.
  static Field1D combine(const Field1D& x, double a, const Field1D& y, double b) {
    if (!(x.grid_ == y.grid_)) throw ConfigError("Field1D: grid mismatch");
    std::vector<double> v(x.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a * x.values_[j] + b * y.values_[j];
    return Field1D(x.grid_, std::move(v));
  }

 private:
  GridSpec1D grid_;
  std::vector<double> values_;
};

/// Normalized Fourier coefficients c_k = (1/N) sum_j u_j e^{-2 pi i k x_j},
/// addressed by wavenumber k in [-N/2, N/2).
class Spectrum1D {
 public:
  Spectrum1D(GridSpec1D grid, std::vector<std::complex<double>> fft_ordered)
      : grid_(grid), coeffs_(std::move(fft_ordered)) {
    if (coeffs_.size() != grid_.n_points()) throw ConfigError("Spectrum1D: size mismatch");
  }

  const GridSpec1D& grid() const noexcept { return grid_; }

  std::complex<double> at(long k) const {
    const long n = static_cast<long>(grid_.n_points());
    if (k < -n / 2 || k >= n / 2) throw DomainError("Spectrum1D: wavenumber out of range");
    return coeffs_[static_cast<std::size_t>(k < 0 ? k + n : k)];
  }

  /// Coefficients in FFT order: k = 0..N/2-1, then -N/2..-1.
  std::span<const std::complex<double>> coeffs() const noexcept { return coeffs_; }

 private:
  GridSpec1D grid_;
  std::vector<std::complex<double>> coeffs_;
};

namespace detail {

/// Half spectrum (k = 0..N/2) of a field, unnormalized.
inline std::vector<std::complex<double>> half_spectrum(const Field1D& f, RealFft& fft) {
  std::vector<std::complex<double>> out(fft.half());
  fft.forward(f.values().data(), out.data());
  return out;
}

/// Field from an unnormalized half spectrum.
inline Field1D from_half_spectrum(const GridSpec1D& grid, const std::vector<std::complex<double>>& h,
                                  RealFft& fft) {
  std::vector<double> v(grid.n_points());
  fft.backward(h.data(), v.data());
  const double inv_n = 1.0 / static_cast<double>(grid.n_points());
  for (double& x : v) x *= inv_n;
  return Field1D(grid, std::move(v));
}

/// Sum over all wavenumbers of w(k) |X_k|^2 / N^2 using the half spectrum.
/// The Nyquist mode is included once, interior modes twice.
template <class W>
double parseval_sum(std::span<const std::complex<double>> half, std::size_t n, W&& weight) {
  const std::size_t nyq = n / 2;
  double s = weight(std::size_t{0}) * std::norm(half[0]);
  for (std::size_t k = 1; k < nyq; ++k) s += 2.0 * weight(k) * std::norm(half[k]);
  s += weight(nyq) * std::norm(half[nyq]);
  const double nn = static_cast<double>(n);
  return s / (nn * nn);
}

}  // namespace detail

inline Spectrum1D transform(const Field1D& field) {
  const std::size_t n = field.size();
  detail::RealFft fft(n);
  const auto half = detail::half_spectrum(field, fft);
  std::vector<std::complex<double>> full(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k <= n / 2; ++k) full[k] = half[k] * inv_n;
  for (std::size_t k = 1; k < n / 2; ++k) full[n - k] = std::conj(full[k]);
  return Spectrum1D(field.grid(), std::move(full));
}

/// Real part of the inverse transform. Non-Hermitian input is symmetrized first.
inline Field1D inverse(const Spectrum1D& spec) {
  const std::size_t n = spec.grid().n_points();
  const auto c = spec.coeffs();
  std::vector<std::complex<double>> half(n / 2 + 1);
  const double nn = static_cast<double>(n);
  half[0] = std::complex<double>(c[0].real(), 0.0) * nn;
  for (std::size_t k = 1; k < n / 2; ++k) half[k] = 0.5 * (c[k] + std::conj(c[n - k])) * nn;
  half[n / 2] = std::complex<double>(c[n / 2].real(), 0.0) * nn;
  detail::RealFft fft(n);
  return detail::from_half_spectrum(spec.grid(), half, fft);
}

/// Applies a Fourier multiplier symbol(k), k = 0..N/2, to the field.
/// The symbol must satisfy symbol(-k) = conj(symbol(k)) for the result to be real,
/// and its Nyquist value must be real.
template <class Symbol>
Field1D apply_symbol(const Field1D& field, Symbol&& symbol) {
  detail::RealFft fft(field.size());
  auto half = detail::half_spectrum(field, fft);
  for (std::size_t k = 0; k < half.size(); ++k) half[k] *= symbol(k);
  return detail::from_half_spectrum(field.grid(), half, fft);
}

/// Spectral derivative (i 2 pi k)^order. The Nyquist mode is dropped for every
/// order so that derivative(derivative(u,1),1) == derivative(u,2).
inline Field1D derivative(const Field1D& field, int order) {
  if (order < 1) throw DomainError("derivative: order must be positive");
  const std::size_t nyq = field.size() / 2;
  return apply_symbol(field, [&](std::size_t k) -> std::complex<double> {
    if (k == nyq) return 0.0;
    return std::pow(std::complex<double>(0.0, kTwoPi * static_cast<double>(k)), order);
  });
}

/// Exact heat semigroup exp(nu_t d_xx): mode k is damped by exp(-nu_t (2 pi k)^2).
inline Field1D heat_propagate(const Field1D& field, double nu_t) {
  if (!(nu_t >= 0.0)) throw DomainError("heat_propagate: nu_t must be nonnegative");
  if (nu_t == 0.0) return field;
  return apply_symbol(field, [&](std::size_t k) -> std::complex<double> {
    const double w = kTwoPi * static_cast<double>(k);
    return std::exp(-nu_t * w * w);
  });
}

struct Norms {
  double l2 = 0.0;         ///< (int u^2 dx)^{1/2} by the rectangle rule
  double linf = 0.0;       ///< max |u_j|
  double tv = 0.0;         ///< sum |u_{j+1} - u_j| with wrap-around
  double mean = 0.0;       ///< average of samples
  double enstrophy = 0.0;  ///< || d_x u ||_{L2}^2, spectral
};

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Discrete total variation of periodic samples. For smooth fields the
/// quadrature of |d_x u| is an alternative with the same continuum limit.
inline double total_variation(std::span<const double> v) {
  double tv = 0.0;
  const std::size_t n = v.size();
  for (std::size_t j = 0; j < n; ++j) tv += std::abs(v[(j + 1) % n] - v[j]);
  return tv;
}

inline double enstrophy(const Field1D& field) {
  detail::RealFft fft(field.size());
  const auto half = detail::half_spectrum(field, fft);
  const std::size_t nyq = field.size() / 2;
  return detail::parseval_sum(half, field.size(), [&](std::size_t k) {
    if (k == nyq) return 0.0;
    const double w = kTwoPi * static_cast<double>(k);
    return w * w;
  });
}

inline Norms norms(const Field1D& field) {
  Norms out;
  const auto v = field.values();
  double sum = 0.0, sq = 0.0;
  for (double x : v) {
    sum += x;
    sq += x * x;
    out.linf = std::max(out.linf, std::abs(x));
  }
  const double dx = field.grid().dx();
  out.l2 = std::sqrt(sq * dx);
  out.mean = sum / static_cast<double>(v.size());
  out.tv = total_variation(v);
  out.enstrophy = enstrophy(field);
  return out;
}

/// L2(T) inner product by the rectangle rule.
inline double dot(const Field1D& a, const Field1D& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("dot: grid mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * a.grid().dx();
}

/// Amplitude part of the symmetry u -> lambda u(lambda t, x). The rescaled
/// datum evolves under viscosity lambda*nu along the original trajectory
/// with time compressed by lambda.
inline Field1D rescale(const Field1D& u0, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("rescale: lambda must be positive");
  return lambda * u0;
}

/// Subtracts the sample mean.
inline Field1D remove_mean(const Field1D& u) {
  const double m = norms(u).mean;
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x -= m;
  return Field1D(u.grid(), std::move(v));
}

// Dump format: "N=<n> L=<length>" then one sample per line.

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_dump(std::ostream& os, const Field1D& f) {
  os << "N=" << f.size() << " L=" << format_double(f.grid().length()) << '\n';
  for (double v : f.values()) os << format_double(v) << '\n';
}

inline Field1D read_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("read_dump: missing header");
  std::size_t n = 0;
  double len = 0.0;
  if (std::sscanf(header.c_str(), "N=%zu L=%lf", &n, &len) != 2) {
    throw ConfigError("read_dump: malformed header '" + header + "'");
  }
  if (len != 1.0) throw ConfigError("read_dump: 1D fields live on the unit torus (L=1)");
  GridSpec1D grid(n);
  std::vector<double> v;
  v.reserve(n);
  std::string line;
  while (v.size() < n && std::getline(is, line)) {
    if (line.empty()) continue;
    v.push_back(std::stod(line));
  }
  return Field1D(grid, std::move(v));
}

inline void save_dump(const std::string& path, const Field1D& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_dump(os, f);
}

inline Field1D load_dump(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  return read_dump(is);
}

}  // namespace enstro
