#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "enstro/burgers.hpp"
#include "enstro/oracles.hpp"
#include "test_util.hpp"

using namespace enstro;
using enstro::testing::max_abs_diff;
using enstro::testing::random_smooth_field;
using enstro::testing::rel_l2;

namespace {

constexpr double kPi = std::numbers::pi;

Field1D sine(const GridSpec1D& g, double a = 1.0) {
  return Field1D::sample(g, [&](double x) { return a * std::sin(kTwoPi * x); });
}

SolverConfig config(double nu, double t_end) {
  SolverConfig c;
  c.nu = nu;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST(Step, ZeroStaysZero) {
  const GridSpec1D g(64);
  EXPECT_EQ(max_abs_diff(step(Field1D::zeros(g), 1e-3, 0.1), Field1D::zeros(g)), 0.0);
}

TEST(Step, MatchesFirstOrderTaylorExpansionToSecondOrder) {
  const GridSpec1D g(64);
  const double nu = 0.05;
  const Field1D u = sine(g);
  auto taylor_error = [&](double dt) {
    const Field1D u1 = step(u, dt, nu);
    const Field1D ref = Field1D::sample(g, [&](double x) {
      const double s = std::sin(kTwoPi * x), c = std::cos(kTwoPi * x);
      return s - dt * (s * kTwoPi * c + nu * kTwoPi * kTwoPi * s);
    });
    return max_abs_diff(u1, ref);
  };
  const double e1 = taylor_error(1e-3), e2 = taylor_error(5e-4);
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Step, OutputHasZeroMean) {
  std::mt19937_64 rng(2);
  const GridSpec1D g(128);
  const Field1D u = random_smooth_field(g, rng);
  EXPECT_LT(std::abs(norms(step(u, 1e-3, 0.02)).mean), 1e-15);
}

TEST(Step, RejectsCflViolation) {
  const GridSpec1D g(64);
  EXPECT_THROW(step(sine(g), 0.1, 0.05), DomainError);
}

TEST(Simulate, ZeroInitialDataGivesZeroDiagnostics) {
  const auto res = simulate(Field1D::zeros(GridSpec1D(32)), config(0.1, 1e-9));
  for (const auto& r : res.diagnostics.rows()) {
    EXPECT_EQ(r.energy, 0.0);
    EXPECT_EQ(r.enstrophy, 0.0);
    EXPECT_EQ(r.tv, 0.0);
    EXPECT_EQ(r.linf, 0.0);
  }
  EXPECT_EQ(max_abs_diff(res.trajectory.final_state(), Field1D::zeros(GridSpec1D(32))), 0.0);
}

TEST(Simulate, MatchesHopfColeAtAcceptanceResolution) {
  const GridSpec1D g(1024);
  const Field1D u0 = sine(g);
  const auto start = std::chrono::steady_clock::now();
  const auto res = simulate(u0, config(0.05, 0.5));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Field1D exact = hopf_cole_solution(u0, 0.05, 0.5);
  EXPECT_LT(rel_l2(res.trajectory.final_state(), exact), 1e-6);
  EXPECT_LT(secs, 5.0);
  EXPECT_DOUBLE_EQ(res.diagnostics.back().t, 0.5);
}

TEST(Simulate, EnergyBalanceHolds) {
  const auto res = simulate(sine(GridSpec1D(1024)), config(0.05, 0.5));
  const auto& r = res.diagnostics.rows();
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 1; i + 2 < r.size(); ++i) {
    const double fd = (r[i + 1].energy - r[i - 1].energy) / (r[i + 1].t - r[i - 1].t);
    worst = std::max(worst, std::abs(fd + 0.05 * r[i].enstrophy));
    scale = std::max(scale, 0.05 * r[i].enstrophy);
  }
  EXPECT_LT(worst / scale, 1e-4);
}

TEST(Simulate, EnstrophyRateMatchesTimeDifferences) {
  const auto res = simulate(sine(GridSpec1D(1024)), config(0.05, 0.4));
  const auto& r = res.diagnostics.rows();
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 1; i + 2 < r.size(); ++i) {
    const double fd = 0.5 * (r[i + 1].enstrophy - r[i - 1].enstrophy) / (r[i + 1].t - r[i - 1].t);
    const double rate = r[i].rate_diss + r[i].rate_cubic;
    worst = std::max(worst, std::abs(fd - rate));
    scale = std::max(scale, std::abs(rate));
  }
  EXPECT_LT(worst / scale, 1e-4);
}

TEST(Simulate, RequiresZeroMean) {
  const GridSpec1D g(128);
  const auto u0 = sine(g) + Field1D::sample(g, [](double) { return 0.1; });
  EXPECT_THROW(simulate(u0, config(0.05, 0.1)), DomainError);
}

TEST(Simulate, ReportsRequiredResolution) {
  try {
    simulate(sine(GridSpec1D(256)), config(1e-3, 0.1));
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_EQ(e.required_points(), 4096u);
  }
}

TEST(Simulate, MonotoneQuantitiesAndMeanConservation) {
  std::mt19937_64 rng(17);
  const GridSpec1D g(2048);
  for (int trial = 0; trial < 3; ++trial) {
    Field1D u0 = random_smooth_field(g, rng, 6);
    u0 = (1.0 / max_abs(u0.values())) * u0;
    const auto res = simulate(u0, config(0.005, 0.4));
    const double linf0 = res.diagnostics[0].linf;
    double tv_min = res.diagnostics[0].tv;
    for (const auto& r : res.diagnostics.rows()) {
      EXPECT_LE(r.linf, linf0 * (1 + 1e-8));
      EXPECT_LE(r.tv, tv_min * (1 + 1e-6));
      tv_min = std::min(tv_min, r.tv);
    }
    for (const auto& s : res.trajectory.snapshots) EXPECT_LT(std::abs(norms(s.u).mean), 1e-12);
  }
}

TEST(Simulate, GronwallEnvelopeForShortTimes) {
  const double nu = 0.01;
  const auto res = simulate(sine(GridSpec1D(1024)), config(nu, 0.3));
  const double e0 = res.diagnostics[0].enstrophy;
  for (const auto& r : res.diagnostics.rows()) {
    if (r.t > nu) break;
    EXPECT_LE(r.enstrophy, gronwall_envelope(e0, 1.0, nu, r.t) * (1 + 1e-3));
  }
}

TEST(Simulate, GridRefinementConverges) {
  const auto coarse = simulate(sine(GridSpec1D(1024)), config(0.05, 0.5)).trajectory.final_state();
  const auto fine = simulate(sine(GridSpec1D(2048)), config(0.05, 0.5)).trajectory.final_state();
  std::vector<double> sub(1024);
  for (std::size_t j = 0; j < 1024; ++j) sub[j] = fine[2 * j];
  EXPECT_LT(rel_l2(coarse, Field1D(GridSpec1D(1024), sub)), 1e-6);
}

TEST(Simulate, TimeRescalingSymmetry) {
  // lambda u(lambda t, x) solves Burgers with viscosity lambda * nu.
  std::mt19937_64 rng(23);
  const GridSpec1D g(256);
  const Field1D u0 = random_smooth_field(g, rng, 5, 0.5);
  const double nu = 0.02, lambda = 2.5, t = 0.3;
  const auto base = simulate(u0, config(nu, t)).trajectory.final_state();
  const auto scaled =
      simulate(rescale(u0, lambda), config(lambda * nu, t / lambda)).trajectory.final_state();
  EXPECT_LT(rel_l2(scaled, lambda * base), 1e-10);
}

TEST(Simulate, SnapshotsFollowStride) {
  SolverConfig c = config(0.05, 0.1);
  c.sample_stride = 10;
  const auto res = simulate(sine(GridSpec1D(256)), c);
  ASSERT_GE(res.trajectory.snapshots.size(), 2u);
  for (std::size_t i = 1; i + 1 < res.trajectory.snapshots.size(); ++i) {
    EXPECT_EQ(res.trajectory.snapshots[i].step % 10, 0u);
  }
  EXPECT_DOUBLE_EQ(res.trajectory.snapshots.back().t, 0.1);
  EXPECT_EQ(snapshot_name(3, 0.15), "snap_3_t0.150000.dat");
}

TEST(EnstrophyRate, SineHasNoCubicTerm) {
  const double a = 0.7, nu = 0.03;
  const auto r = enstrophy_rate(sine(GridSpec1D(64), a), nu);
  EXPECT_NEAR(r.cubic, 0.0, 1e-12);
  const double expected = -8.0 * std::pow(kPi, 4) * a * a * nu;
  EXPECT_NEAR(r.dissipation, expected, 1e-10 * std::abs(expected));
  EXPECT_NEAR(r.total, expected, 1e-10 * std::abs(expected));
  EXPECT_EQ(enstrophy_rate(Field1D::zeros(GridSpec1D(64)), nu).total, 0.0);
}

TEST(SupEnstrophy, DecreasingSeriesPeaksAtStart) {
  DiagnosticsSeries d;
  for (int i = 0; i < 10; ++i) d.append({.t = 0.1 * i, .enstrophy = 5.0 - i});
  const auto s = sup_enstrophy(d);
  EXPECT_EQ(s.t_star, 0.0);
  EXPECT_EQ(s.e_star, 5.0);
  EXPECT_THROW(sup_enstrophy(DiagnosticsSeries{}), DomainError);
}

TEST(SupEnstrophy, QuadraticRefinementRecoversVertex) {
  DiagnosticsSeries d;
  const double ts[] = {0.0, 0.13, 0.29, 0.41, 0.5, 0.77, 1.0};
  for (double t : ts) d.append({.t = t, .enstrophy = 5.0 - 3.0 * (t - 0.37) * (t - 0.37)});
  const auto s = sup_enstrophy(d);
  EXPECT_NEAR(s.t_star, 0.37, 1e-12);
  EXPECT_NEAR(s.e_star, 5.0, 1e-12);
}

TEST(Diagnostics, CsvHeaderAndMonotoneTime) {
  DiagnosticsSeries d;
  d.append({.t = 0.0});
  EXPECT_THROW(d.append({.t = 0.0}), ConfigError);
  std::ostringstream os;
  write_csv(os, d);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "t,energy,enstrophy,tv,linf,min_ux,rate_diss,rate_cubic");
}
