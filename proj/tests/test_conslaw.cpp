#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "enstro/burgers.hpp"
#include "enstro/conslaw.hpp"
#include "test_util.hpp"

using namespace enstro;
using enstro::testing::rel_l2;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

NdConfig nd_config(double t_end) {
  NdConfig c;
  c.t_end = t_end;
  return c;
}

/// Heat evolution of f followed by translation by shift.
Field1D translated_heat(const Field1D& f, double nu_t, double shift) {
  return apply_symbol(heat_propagate(f, nu_t), [&](std::size_t k) {
    if (k == f.size() / 2) return std::complex<double>(0.0);
    return std::exp(std::complex<double>(0.0, -kTwoPi * static_cast<double>(k) * shift));
  });
}

FieldND random_2d(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double c[4][4][2];
  for (auto& a : c)
    for (auto& b : a)
      for (double& x : b) x = normal(rng);
  return FieldND::sample(GridSpecND(2, n), [&](const std::vector<double>& x) {
    double s = 0.0;
    for (int p = 1; p < 4; ++p)
      for (int q = 1; q < 4; ++q) {
        s += (c[p][q][0] * std::sin(kTwoPi * (p * x[0] + q * x[1])) +
              c[p][q][1] * std::cos(kTwoPi * (p * x[0] - q * x[1]))) /
             (p * p + q * q);
      }
    return s;
  });
}

}  // namespace

TEST(Flux, RegistryConstantsAndDerivatives) {
  for (std::size_t dim : {1u, 2u}) {
    for (const auto& f : flux_registry(dim)) {
      EXPECT_NEAR(f.lip_on_unit, 1.0, 1e-15) << f.name;
      const double h = 1e-6;
      for (double u = -1.0; u <= 1.0; u += 0.05) {
        const auto fp = f.eval(u + h), fm = f.eval(u - h), d = f.deriv(u);
        double speed = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
          EXPECT_NEAR((fp[a] - fm[a]) / (2 * h), d[a], 1e-6) << f.name;
          speed += d[a] * d[a];
        }
        EXPECT_LE(std::sqrt(speed), f.lip_on_unit + 1e-12) << f.name;
      }
    }
  }
  EXPECT_EQ(find_flux("burgers1d", 1).name, "burgers1d");
  EXPECT_NEAR(find_flux("linear(c=2.5)", 1).lip_on_unit, 2.5, 1e-15);
  EXPECT_THROW(find_flux("quartic", 2), LookupError);
}

TEST(ConsLaw, ZeroDataStaysZero) {
  const auto r = simulate_nd(FieldND::zeros(GridSpecND(2, 16)), find_flux("burgers", 2), 0.1,
                             nd_config(0.05));
  for (const auto& row : r.diagnostics.rows()) {
    EXPECT_EQ(row.enstrophy, 0.0);
    EXPECT_EQ(row.tv, 0.0);
    EXPECT_EQ(row.linf, 0.0);
  }
  EXPECT_EQ(max_abs(r.final_state.values()), 0.0);
}

TEST(ConsLaw, AgreesWithSpectralSolverBeforeShock) {
  const GridSpec1D g(1024);
  const auto u0 = Field1D::sample(g, [](double x) { return 0.5 * std::sin(kTwoPi * x); });
  SolverConfig sc;
  sc.nu = 0.05;
  sc.t_end = 0.2;
  const auto spectral = simulate(u0, sc).trajectory.final_state();
  const auto fv = simulate_nd(FieldND::from_1d(u0), find_flux("burgers", 1), 0.05, nd_config(0.2));
  const std::vector<double> ref(spectral.values().begin(), spectral.values().end());
  EXPECT_LT(rel_l2(fv.final_state.values(), ref), 1e-3);
}

TEST(ConsLaw, LinearFluxIsTranslatedHeatFlow1D) {
  const GridSpec1D g(512);
  const auto u0 = Field1D::sample(g, [](double x) {
    return std::sin(kTwoPi * x) + 0.3 * std::cos(3 * kTwoPi * x);
  });
  const double nu = 0.02, t = 0.3;
  const auto fv = simulate_nd(FieldND::from_1d(0.5 * u0), find_flux("linear(c=1)", 1), nu, nd_config(t));
  const auto ref = translated_heat(0.5 * u0, nu * t, 1.0 * t);
  const std::vector<double> rv(ref.values().begin(), ref.values().end());
  EXPECT_LT(rel_l2(fv.final_state.values(), rv), 1e-3);
}

TEST(ConsLaw, LinearFluxIsTranslatedHeatFlow2D) {
  // Separable data: the exact solution is the product of two 1D translated heat flows.
  const std::size_t n = 256;
  const GridSpec1D g(n);
  const auto gx = Field1D::sample(g, [](double x) { return std::sin(kTwoPi * x); });
  const auto hy = Field1D::sample(g, [](double y) { return 0.8 + 0.4 * std::cos(kTwoPi * y); });
  const double nu = 0.01, t = 0.2, speed = 1.0 / std::sqrt(2.0);
  std::vector<double> u0(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) u0[i * n + j] = 0.5 * gx[i] * hy[j];
  const auto fv = simulate_nd(FieldND(GridSpecND(2, n), u0), find_flux("linear(c=1)", 2), nu,
                              nd_config(t));
  const auto rx = translated_heat(gx, nu * t, speed * t);
  const auto ry = translated_heat(hy, nu * t, speed * t);
  std::vector<double> ref(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ref[i * n + j] = 0.5 * rx[i] * ry[j];
  EXPECT_LT(rel_l2(fv.final_state.values(), ref), 1e-3);
}

TEST(ConsLaw, MonotoneQuantitiesAndConservation) {
  for (const char* name : {"burgers", "cubic", "burgers1d"}) {
    const FieldND u0 = hypothesis_normalize(random_2d(64, 3));
    NdConfig c = nd_config(0.5);
    c.sample_stride = 1;
    const auto r = simulate_nd(u0, find_flux(name, 2), 0.005, c);
    EXPECT_TRUE(r.hypothesis_ok);
    EXPECT_LE(r.max_linf_increase, 1e-10) << name;
    EXPECT_LE(r.max_tv_increase, 1e-8) << name;
    EXPECT_LE(r.max_mean_drift, 1e-12) << name;
  }
}

TEST(ConsLaw, HypothesisNormalization) {
  const FieldND u = hypothesis_normalize(7.0 * random_2d(64, 9));
  const auto d = diagnose_nd(u, find_flux("burgers", 2), 1.0);
  EXPECT_LE(d.linf, 1.0 + 1e-12);
  EXPECT_LE(d.tv, 1.0 + 1e-12);
  EXPECT_LE(d.enstrophy, 1.0 + 1e-12);
  EXPECT_NEAR(std::max({d.linf, d.tv, std::sqrt(d.enstrophy)}), 1.0, 1e-12);
  EXPECT_THROW(hypothesis_normalize(FieldND::zeros(GridSpecND(2, 16))), DegenerateInputError);
}

TEST(ConsLaw, CompactDataNeverReachesTheBoundaryBand) {
  const GridSpecND g(2, 128, 8.0);
  const FieldND u0 = hypothesis_normalize(FieldND::sample(g, [](const std::vector<double>& x) {
    const double r2 = (x[0] - 4.0) * (x[0] - 4.0) + (x[1] - 4.0) * (x[1] - 4.0);
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  }));
  NdConfig c = nd_config(0.5);
  c.boundary_band = 8;
  const auto r = simulate_nd(u0, find_flux("burgers", 2), 0.01, c);
  EXPECT_LT(r.max_boundary_tv, 1e-10);
}

TEST(ConsLaw, RejectsUnsupportedConfigurations) {
  EXPECT_THROW(simulate_nd(FieldND::zeros(GridSpecND(3, 8)), find_flux("burgers", 3), 0.1, nd_config(0.1)),
               ConfigError);
  EXPECT_THROW(simulate_nd(FieldND::zeros(GridSpecND(2, 8)), find_flux("burgers", 1), 0.1, nd_config(0.1)),
               ConfigError);
  EXPECT_THROW(GridSpecND(2, 64, 0.5), ConfigError);
}

TEST(ConsLaw, DumpAndCsvFormats) {
  const FieldND u = random_2d(8, 1);
  std::stringstream ss;
  write_dump(ss, u);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "DIM=2 N=8 L=1");
  const FieldND back = read_dump_nd(ss);
  EXPECT_EQ(back.values(), u.values());

  const auto r = simulate_nd(u, find_flux("burgers", 2), 0.1, nd_config(0.01));
  std::ostringstream os;
  write_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "t,energy,enstrophy,tv,linf,min_ux,rate_diss,rate_cubic,dim,L");
}
