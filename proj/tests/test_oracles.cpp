#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "enstro/oracles.hpp"
#include "test_util.hpp"

using namespace enstro;
using enstro::testing::gauss_legendre;
using enstro::testing::max_abs_diff;
using enstro::testing::random_smooth_field;

namespace {

constexpr double kPi = std::numbers::pi;

Field1D sine(const GridSpec1D& g, double a = 1.0) {
  return Field1D::sample(g, [&](double x) { return a * std::sin(kTwoPi * x); });
}

Field1D smoothed_square(const GridSpec1D& g, double w) {
  return Field1D::sample(g, [&](double x) { return std::tanh(std::sin(kTwoPi * x) / w) / std::tanh(1.0 / w); });
}

}  // namespace

TEST(HopfCole, IdentityAtTimeZero) {
  const auto u0 = sine(GridSpec1D(1024));
  EXPECT_LT(max_abs_diff(hopf_cole_solution(u0, 0.05, 0.0), u0), 1e-10);
}

TEST(HopfCole, DecaysToTheMean) {
  const auto u = hopf_cole_solution(sine(GridSpec1D(256)), 0.05, 10.0);
  EXPECT_LT(max_abs(u.values()), 1e-6);
}

TEST(HopfCole, ZeroMeanAndMaximumPrinciple) {
  std::mt19937_64 rng(4);
  const GridSpec1D g(512);
  const auto u0 = random_smooth_field(g, rng, 6, 0.5);
  for (double t : {0.05, 0.2, 0.6}) {
    const auto u = hopf_cole_solution(u0, 0.05, t);
    EXPECT_LT(std::abs(norms(u).mean), 1e-12);
    EXPECT_LE(norms(u).linf, norms(u0).linf * (1 + 1e-8));
  }
}

TEST(HopfCole, SemigroupProperty) {
  std::mt19937_64 rng(8);
  const GridSpec1D g(512);
  const auto u0 = random_smooth_field(g, rng, 6, 0.5);
  const double nu = 0.05;
  const auto direct = hopf_cole_solution(u0, nu, 0.35);
  const auto two = hopf_cole_solution(remove_mean(hopf_cole_solution(u0, nu, 0.15)), nu, 0.2);
  EXPECT_LT(max_abs_diff(direct, two), 1e-8);
}

TEST(HopfCole, UnderflowIsReported) {
  EXPECT_THROW(hopf_cole_solution(sine(GridSpec1D(256)), 1e-4, 0.1), UnderflowError);
}

TEST(HopfCole, RejectsNonzeroMean) {
  const GridSpec1D g(64);
  EXPECT_THROW(hopf_cole_solution(sine(g) + Field1D::sample(g, [](double) { return 1.0; }), 0.1, 0.1),
               DomainError);
}

TEST(ShockEnstrophy, UnitCaseMatchesSech4Quadrature) {
  const double oracle = gauss_legendre(
      [](double s) { return std::pow(1.0 / std::cosh(s), 4); }, -40.0, 40.0, 4000);
  EXPECT_NEAR(oracle, 4.0 / 3.0, 1e-13);
  EXPECT_NEAR(shock_enstrophy(1.0, 1.0), oracle, 1e-13);
}

TEST(ShockEnstrophy, CubicHomogeneity) {
  EXPECT_NEAR(shock_enstrophy(0.6, 0.01) * 8.0, shock_enstrophy(1.2, 0.01), 1e-10);
  EXPECT_THROW(shock_enstrophy(-1.0, 0.1), DomainError);
}

TEST(ShockEnstrophy, MatchesSampledProfileOnWideDomain) {
  const ShockProfile p(0.8, 0.004);
  const double half_width = 40.0 * p.ell();
  const int n = 20000;
  const double dx = 2.0 * half_width / n;
  std::vector<double> u(n + 1);
  for (int j = 0; j <= n; ++j) u[j] = p(-half_width + j * dx);
  // 8th-order centered differences on the interior.
  static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double e = 0.0;
  for (int j = 4; j <= n - 4; ++j) {
    double d = 0.0;
    for (int m = 1; m <= 4; ++m) d += c[m - 1] * (u[j + m] - u[j - m]);
    d /= dx;
    e += d * d * dx;
  }
  const double ref = shock_enstrophy(p.amplitude, p.nu);
  EXPECT_NEAR(e / ref, 1.0, 1e-6);
}

TEST(HeatRatios, SingleModeClosedForm) {
  const GridSpec1D g(256);
  const double nu = 0.3, t = 0.01, s = nu * t;
  const auto r = heat_estimate_ratios(sine(g), nu, t);
  // |d_x e^{s Lap} sin|_2 by quadrature, |sin|_inf = 1, |cos 2 pi x|_1 * 2 pi = 4.
  const double grad_l2 = std::sqrt(gauss_legendre(
      [&](double x) { return std::pow(kTwoPi * std::exp(-4 * kPi * kPi * s) * std::cos(kTwoPi * x), 2); },
      0.0, 1.0));
  const double quad = grad_l2 * std::pow(s, 0.25) / 2.0;
  const double closed = kPi / std::sqrt(2.0) * std::exp(-4 * kPi * kPi * s) * std::pow(s, 0.25);
  EXPECT_NEAR(quad, closed, 1e-12);
  EXPECT_NEAR(r.r1, closed, 1e-8);
  const double closed2 = kTwoPi * kTwoPi / std::sqrt(2.0) * std::exp(-4 * kPi * kPi * s) *
                         std::pow(s, 0.75) / 2.0;
  EXPECT_NEAR(r.r2, closed2, 1e-8);
}

TEST(HeatRatios, BoundedOverShortAndLongTimes) {
  const GridSpec1D g(8192);
  const auto v0 = smoothed_square(g, 0.05);
  for (double t = 1e-6; t <= 1.0; t *= 3.0) {
    const auto r = heat_estimate_ratios(v0, 1.0, t);
    EXPECT_TRUE(std::isfinite(r.r1) && std::isfinite(r.r2));
    EXPECT_LE(r.r1, heat_ratio_bound_r1()) << "t=" << t;
    EXPECT_LE(r.r2, heat_ratio_bound_r2()) << "t=" << t;
  }
}

TEST(HeatRatios, ScaleInvariant) {
  std::mt19937_64 rng(6);
  const auto v0 = random_smooth_field(GridSpec1D(256), rng);
  const auto a = heat_estimate_ratios(v0, 0.5, 1e-3);
  const auto b = heat_estimate_ratios(4.5 * v0, 0.5, 1e-3);
  EXPECT_NEAR(a.r1, b.r1, 1e-12);
  EXPECT_NEAR(a.r2, b.r2, 1e-12);
}

TEST(HeatRatios, ConstantInputIsDegenerate) {
  const GridSpec1D g(64);
  EXPECT_THROW(heat_estimate_ratios(Field1D::sample(g, [](double) { return 2.0; }), 1.0, 0.1),
               DegenerateInputError);
}

TEST(Gronwall, EnvelopeValues) {
  EXPECT_EQ(gronwall_envelope(3.0, 1.0, 0.1, 0.0), 3.0);
  EXPECT_EQ(gronwall_envelope(3.0, 0.0, 0.1, 7.0), 3.0);
  EXPECT_NEAR(gronwall_envelope(1.0, 1.0, 0.02, 0.02), std::exp(1.0), 1e-15);
  EXPECT_THROW(gronwall_envelope(1.0, 1.0, 0.0, 1.0), DomainError);
}
