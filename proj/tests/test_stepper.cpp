#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pmelimit/run.hpp"
#include "pmelimit/scenarios.hpp"
#include "pmelimit/stepper.hpp"
#include "test_support.hpp"

using namespace pmelimit;
using pmelimit::testing::bump;
using pmelimit::testing::expect_error;

namespace {

ModelParams params_for(const GridSpec& g, double m, bool growth, bool drift) {
  ModelParams p;
  p.grid = g;
  p.m = m;
  if (growth) p.growth = GrowthLaw::smooth_tanh(4.0, 1.0);
  if (drift) p.kernel = DriftKernel::newtonian();
  return p;
}

double mass_with_growth(const SimState& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) sum += s.rho[i] * s.params.growth(s.p[i]);
  return sum * s.rho.spec().cell_volume();
}

ScalarField random_bumps(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-0.4, 0.4), r(0.2, 0.5), a(0.2, 1.0);
  std::vector<Bump> bumps;
  for (int k = 0; k < 5; ++k) bumps.push_back({{c(rng), c(rng), 0.0}, r(rng), a(rng)});
  return bumps_field(g, Profile::Bump, bumps);
}

}  // namespace

TEST(StableDt, FormulaExample) {
  // m = 64, max p = 1, h = 1/32, n = 2, no drift, growth off.
  const GridSpec g = GridSpec::make(2, 1.0, 64);
  ASSERT_DOUBLE_EQ(g.spacing(), 1.0 / 32.0);
  Stepper stepper(params_for(g, 64.0, false, false));
  const SimState s = stepper.initialize(ScalarField::constant(g, 1.0));
  const double expected = 0.4 * (1.0 / 1024.0) / (4.0 * 65.0);
  EXPECT_NEAR(stable_dt(s), expected, 1e-15 * expected);
  EXPECT_NEAR(stable_dt(s), 1.50e-6, 0.01e-6);
}

TEST(StableDt, EmptyFieldUsesGrowthLimit) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  Stepper stepper(params_for(g, 8.0, true, true));
  const SimState s = stepper.initialize(ScalarField(g));
  EXPECT_DOUBLE_EQ(stable_dt(s), 0.4 / 4.0);
  EXPECT_DOUBLE_EQ(stable_dt(s, 0.2), 0.2 / 4.0);
}

TEST(StableDt, QuartersUnderRefinement) {
  const auto dt_at = [](int N) {
    const GridSpec g = GridSpec::make(2, 1.0, N);
    Stepper stepper(params_for(g, 4.0, false, false));
    return stable_dt(stepper.initialize(ScalarField::constant(g, 0.8)));
  };
  EXPECT_LE(dt_at(64), 0.25 * dt_at(32) * (1 + 1e-14));
}

TEST(Step, CflViolation) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  Stepper stepper(params_for(g, 2.0, false, false));
  const SimState s = stepper.initialize(bump(g, {0.0, 0.0, 0.0}, 0.6));
  expect_error(ErrorKind::CflViolation, [&] { (void)stepper.step(s, 1.01 * stable_dt(s)); });
  expect_error(ErrorKind::CflViolation, [&] { (void)stepper.step(s, -1e-3); });
  EXPECT_NO_THROW((void)stepper.step(s, stable_dt(s)));
}

TEST(Step, ZeroStaysZero) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  Stepper stepper(params_for(g, 8.0, true, true));
  const SimState s = stepper.initialize(ScalarField(g));
  const SimState next = stepper.step(s, stable_dt(s));
  EXPECT_EQ(next.rho, ScalarField(g));
  EXPECT_DOUBLE_EQ(next.t, stable_dt(s));
  EXPECT_EQ(next.step_count, 1u);
}

TEST(Step, RejectsBadInitialData) {
  const GridSpec g = GridSpec::make(2, 1.0, 8);
  Stepper stepper(params_for(g, 2.0, false, false));
  ScalarField rho(g);
  rho[3] = -1e-6;
  expect_error(ErrorKind::NegativeDensity, [&] { (void)stepper.initialize(rho); });
  rho[3] = std::nan("");
  expect_error(ErrorKind::NonFiniteField, [&] { (void)stepper.initialize(rho); });
  expect_error(ErrorKind::InvalidArgument, [&] { (void)stepper.initialize(ScalarField(GridSpec::make(2, 1.0, 16))); });
  expect_error(ErrorKind::InvalidArgument, [&] { Stepper(params_for(g, 2.0, false, false), 1.5); });
}

TEST(Step, MassConservedWithoutGrowth) {
  for (int n : {1, 2, 3}) {
    const GridSpec g = GridSpec::make(n, 1.0, n == 3 ? 16 : 32);
    Stepper stepper(params_for(g, 4.0, false, n >= 2));
    SimState s = stepper.initialize(bump(g, {0.1, 0.0, 0.0}, 0.7));
    const double m0 = integrate(s.rho);
    for (int k = 0; k < 50; ++k) {
      stepper.advance(s, stable_dt(s));
      ASSERT_NEAR(integrate(s.rho), m0, 1e-12 * m0) << "n=" << n << " step " << k;
    }
  }
}

TEST(Step, MassIdentityWithGrowth) {
  const GridSpec g = GridSpec::make(2, 1.5, 48);
  Stepper stepper(params_for(g, 8.0, true, true));
  SimState s = stepper.initialize(bump(g, {0.0, 0.0, 0.0}, 0.8, 0.95));
  for (int k = 0; k < 40; ++k) {
    const double dt = stable_dt(s);
    const double expected = integrate(s.rho) + dt * mass_with_growth(s);
    stepper.advance(s, dt);
    ASSERT_NEAR(integrate(s.rho), expected, 1e-12 * expected) << "step " << k;
  }
}

TEST(Step, PositivityOnRandomBumps) {
  const GridSpec g = GridSpec::make(2, 1.0, 32);
  for (double m : {2.0, 8.0, 32.0}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      Stepper stepper(params_for(g, m, true, true));
      SimState s = stepper.initialize(random_bumps(g, seed));
      for (int k = 0; k < 60; ++k) {
        ASSERT_NO_THROW(stepper.advance(s, stable_dt(s)));
        ASSERT_GE(s.rho.min(), 0.0) << "m=" << m << " seed=" << seed;
      }
    }
  }
}

TEST(Step, PressureStaysBelowCeiling) {
  // Validated law (G_M = 4, p_H = 1, P_M = 2) with p⁰ ≤ P_M keeps sup p ≤ P_M.
  const GridSpec g = GridSpec::make(2, 1.0, 32);
  ModelParams params = params_for(g, 8.0, true, true);
  params.pressure_ceiling = 2.0;
  RunOptions opt;
  opt.end_time = 0.2;
  opt.samples = 4;
  const RunResult r = run(bump(g, {0.0, 0.0, 0.0}, 0.7, 1.0), params, opt);
  for (const auto& rec : r.records) EXPECT_LE(rec.sup_p, 2.0 * (1 + 1e-3));
}

TEST(Run, ZeroTimeReturnsInitialState) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  const ScalarField init = bump(g, {0.0, 0.0, 0.0}, 0.6);
  RunOptions opt;
  opt.end_time = 0.0;
  const RunResult r = run(init, params_for(g, 4.0, true, true), opt);
  EXPECT_EQ(r.final_state.rho, init);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.steps, 0u);
}

TEST(Run, SamplingTimesAreExact) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  RunOptions opt;
  opt.end_time = 0.03;
  opt.samples = 3;
  std::vector<int> seen;
  const RunResult r = run(bump(g, {0.0, 0.0, 0.0}, 0.6), params_for(g, 4.0, true, true), opt,
                          [&](const SimState&, const DiagnosticsRecord&, int k) { seen.push_back(k); });
  ASSERT_EQ(r.records.size(), 4u);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(r.records[k].t, 0.03 * k / 3);
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_GT(r.steps, 3u);
}

TEST(Run, RejectsBadOptions) {
  const GridSpec g = GridSpec::make(2, 1.0, 8);
  const ScalarField init = bump(g, {0.0, 0.0, 0.0}, 0.6);
  RunOptions opt;
  opt.end_time = -1.0;
  expect_error(ErrorKind::ConfigInvalid, [&] { (void)run(init, params_for(g, 2.0, false, false), opt); });
  opt.end_time = 1.0;
  opt.samples = 0;
  expect_error(ErrorKind::ConfigInvalid, [&] { (void)run(init, params_for(g, 2.0, false, false), opt); });
}

TEST(Run, ConvergesToBarenblatt1D) {
  // L¹ error at T against the exact source solution drops under refinement.
  const Barenblatt exact{1, 2.0, 0.25};
  const double tau0 = 0.05, T = 0.05;
  std::vector<double> errors;
  for (int N : {32, 64, 128}) {
    const GridSpec g = GridSpec::make(1, 2.0, N);
    RunOptions opt;
    opt.end_time = T;
    opt.samples = 1;
    const RunResult r = run(exact.cell_average(g, tau0), params_for(g, 2.0, false, false), opt);
    const ScalarField ref = exact.cell_average(g, exact.tau_after(tau0, T));
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) err += std::abs(r.final_state.rho[i] - ref[i]);
    errors.push_back(err * g.cell_volume());
  }
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_LT(errors[2], errors[1]);
  EXPECT_GT(std::log2(errors[0] / errors[2]) / 2.0, 1.0);
}

TEST(Run, CollapsedStepAborts) {
  // ρ = 1.5 and m = 1500: p ~ 1e264, so the stable step cannot change T.
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  const ScalarField init = bumps_field(g, Profile::Plateau, {Bump{{0.0, 0.0, 0.0}, 0.6, 1.5}});
  RunOptions opt;
  opt.end_time = 0.01;
  opt.samples = 1;
  expect_error(ErrorKind::NonFiniteField, [&] { (void)run(init, params_for(g, 1500.0, false, false), opt); });
}

TEST(Step, PressureOverflowRejected) {
  const GridSpec g = GridSpec::make(2, 1.0, 8);
  Stepper stepper(params_for(g, 400.0, false, false));
  expect_error(ErrorKind::NonFiniteField, [&] { (void)stepper.initialize(ScalarField::constant(g, 10.0)); });
}
