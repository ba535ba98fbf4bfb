#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "enstro/field.hpp"

namespace enstro::testing {

/// Zero-mean trigonometric polynomial with random coefficients decaying like 1/k^2.
inline Field1D random_smooth_field(const GridSpec1D& grid, std::mt19937_64& rng, int kmax = 8,
                                   double amplitude = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(kmax + 1), b(kmax + 1);
  for (int k = 1; k <= kmax; ++k) {
    a[k] = amplitude * normal(rng) / (k * k);
    b[k] = amplitude * normal(rng) / (k * k);
  }
  return Field1D::sample(grid, [&](double x) {
    double s = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      s += a[k] * std::cos(kTwoPi * k * x) + b[k] * std::sin(kTwoPi * k * x);
    }
    return s;
  });
}

inline double max_abs_diff(const Field1D& a, const Field1D& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

/// Relative discrete L2 distance ||a - b|| / ||b||.
inline double rel_l2(const Field1D& a, const Field1D& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num += (a[j] - b[j]) * (a[j] - b[j]);
    den += b[j] * b[j];
  }
  return std::sqrt(num / den);
}

/// Composite Gauss-Legendre (5 points per panel) on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 200) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) s += ws[i] * f(mid + 0.5 * h * xs[i]);
  }
  return 0.5 * h * s;
}

}  // namespace enstro::testing
