#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "pmelimit/diagnostics.hpp"
#include "pmelimit/scenarios.hpp"
#include "test_support.hpp"

using namespace pmelimit;
using pmelimit::testing::bump;
using pmelimit::testing::expect_error;
using pmelimit::testing::fund1_lhs_oracle;
using pmelimit::testing::fund1_rhs_oracle;
using pmelimit::testing::r2;
using pmelimit::testing::radial_integral_2d;

namespace {

constexpr double kPi = std::numbers::pi;

SimState state_of(const ScalarField& rho, double m, GrowthLaw growth = GrowthLaw::off(),
                  DriftKernel kernel = DriftKernel::off()) {
  ModelParams params;
  params.grid = rho.spec();
  params.m = m;
  params.growth = growth;
  params.kernel = std::move(kernel);
  Stepper stepper(params);
  return stepper.initialize(rho);
}

ScalarField gaussian(const GridSpec& g) {
  return ScalarField::sample(g, [](const Point& x) { return std::exp(-r2(x)); });
}

}  // namespace

TEST(Apriori, ZeroDensityGivesZeros) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  const DiagnosticsRecord r =
      evaluate_diagnostics(state_of(ScalarField(g), 8.0, GrowthLaw::smooth_tanh(1.0, 1.0), DriftKernel::newtonian()));
  for (const auto& col : diagnostics_columns()) {
    if (col == "m" || col == "l4_alpha") continue;
    EXPECT_EQ(r.*diagnostics_member(col), 0.0) << col;
  }
  EXPECT_EQ(r.m, 8.0);
}

TEST(Apriori, PatchMass) {
  const GridSpec g = GridSpec::make(2, 1.0, 256);
  const ScalarField rho = bumps_field(g, Profile::Patch, {Bump{{0.0, 0.0, 0.0}, 0.5, 0.8}});
  std::size_t cells = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) cells += rho[i] > 0.0;
  const DiagnosticsRecord r = apriori_functionals(state_of(rho, 4.0));
  EXPECT_NEAR(r.mass, 0.8 * cells * g.cell_volume(), 1e-12);
  EXPECT_NEAR(r.mass, 0.8 * kPi * 0.25, 5e-3);
  EXPECT_NEAR(r.p_int, std::pow(0.8, 4.0) * cells * g.cell_volume(), 1e-12);
  EXPECT_DOUBLE_EQ(r.sup_rho, 0.8);
  EXPECT_EQ(r.boundary_mass, 0.0);
}

TEST(Apriori, BoundaryMassCountsOuterTwoLayers) {
  const GridSpec g = GridSpec::make(2, 1.0, 8);
  ScalarField rho(g);
  rho[g.index({0, 3, 0})] = 1.0;
  rho[g.index({6, 3, 0})] = 2.0;
  rho[g.index({3, 3, 0})] = 4.0;
  EXPECT_DOUBLE_EQ(apriori_functionals(state_of(rho, 2.0)).boundary_mass, 3.0 * g.cell_volume());
}

TEST(Residual, ZeroDensity) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  EXPECT_EQ(complementarity_residual(state_of(ScalarField(g), 4.0)), 0.0);
}

TEST(Residual, VanishesOnBalancedPlateau) {
  // ρ = 1 on a flat top, growth tuned so that G(1) = -1: Δp + ρ + G(p) = 0 there.
  const GridSpec g = GridSpec::make(2, 1.5, 96);
  const ScalarField rho = bumps_field(g, Profile::Plateau, {Bump{{0.0, 0.0, 0.0}, 1.0, 1.0}});
  const GrowthLaw G = GrowthLaw::smooth_tanh(1.0 / std::tanh(1.0), 0.5);
  ASSERT_NEAR(G(1.0), -1.0, 1e-15);
  const SimState s = state_of(rho, 6.0, G, DriftKernel::newtonian());

  const ScalarField lap = laplacian(s.p);
  double total = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double integrand = s.p[i] * (lap[i] + rho[i] + G(s.p[i]));
    if (std::sqrt(r2(g.position(i))) < 0.45) EXPECT_NEAR(integrand, 0.0, 1e-12);
    total += std::abs(integrand);
  }
  total *= g.cell_volume();
  EXPECT_GT(total, 0.0);  // the roll-off shell still contributes
  EXPECT_NEAR(complementarity_residual(s), total, 1e-12 * total);
}

TEST(Residual, FormsAgreeWithoutDrift) {
  const GridSpec g = GridSpec::make(2, 1.0, 32);
  const SimState s = state_of(bump(g, {0.0, 0.0, 0.0}, 0.7), 4.0, GrowthLaw::smooth_tanh(1.0, 1.0));
  EXPECT_DOUBLE_EQ(complementarity_residual(s, ResidualForm::PressureEquation),
                   complementarity_residual(s, ResidualForm::DiscretePotential));
}

TEST(Proxies, ExamplesFromDefinition) {
  const GridSpec g = GridSpec::make(2, 1.0, 32);
  const LimitProxies below = limit_relation_proxies(state_of(bump(g, {0.0, 0.0, 0.0}, 0.7, 0.99), 8.0));
  EXPECT_EQ(below.excess, 0.0);
  EXPECT_GT(below.p_times_onemrho, 0.0);

  const ScalarField patch = bumps_field(g, Profile::Patch, {Bump{{0.0, 0.0, 0.0}, 0.6, 1.0}});
  EXPECT_EQ(limit_relation_proxies(state_of(patch, 8.0)).p_times_onemrho, 0.0);

  const LimitProxies above = limit_relation_proxies(state_of(bump(g, {0.0, 0.0, 0.0}, 0.7, 1.0), 2.0));
  EXPECT_EQ(above.excess, 0.0);
  ScalarField high = ScalarField::constant(g, 0.5);
  high[100] = 1.25;
  EXPECT_DOUBLE_EQ(limit_relation_proxies(state_of(high, 2.0)).excess, 0.25);
}

TEST(L4, ZeroPressure) {
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  const L4Functionals f = l4_functionals(state_of(ScalarField(g), 4.0), 0.5);
  EXPECT_EQ(f.l4_value, 0.0);
  EXPECT_EQ(f.hess_energy, 0.0);
  EXPECT_EQ(f.stiff_energy, 0.0);
}

TEST(L4, GaussianMatchesRadialOracle) {
  // alpha = 0: ∫|∇p|⁴ = ∫16 r⁴ e^{-4r²} dx.
  const double oracle = radial_integral_2d([](double r) { return 16 * std::pow(r, 4) * std::exp(-4 * r * r); });
  EXPECT_NEAR(oracle, kPi / 2.0, 1e-10);
  const GridSpec g = GridSpec::make(2, 6.0, 256);
  const ScalarField p = gaussian(g);
  const ScalarField zero(g);
  const L4Functionals f = l4_functionals(p, zero, zero, 1.0, 0.0);
  EXPECT_NEAR(f.l4_value, oracle, 1e-2 * oracle);
}

TEST(L4, AlphaRange) {
  const GridSpec g = GridSpec::make(2, 1.0, 8);
  const SimState s = state_of(bump(g, {0.0, 0.0, 0.0}, 0.5), 2.0);
  expect_error(ErrorKind::InvalidArgument, [&] { (void)l4_functionals(s, 1.0); });
  expect_error(ErrorKind::InvalidArgument, [&] { (void)l4_functionals(s, -0.1); });
  EXPECT_NO_THROW((void)l4_functionals(s, 0.0));
}

TEST(Hessian, ExactOnQuadratics) {
  // f = x² + 3xy: |D²f|² = 2² + 2·3² = 22.
  const GridSpec g = GridSpec::make(2, 1.0, 16);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) { return x[0] * x[0] + 3 * x[0] * x[1]; });
  const ScalarField h = hessian_norm_sq(f);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (g.in_boundary_layer(i, 2)) continue;
    EXPECT_NEAR(h[i], 22.0, 1e-9);
  }
}

TEST(Fund1, ZeroPressure) {
  const Fund1Check c = identity_check_fund1(ScalarField(GridSpec::make(2, 1.0, 16)));
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.rhs, 0.0);
}

TEST(Fund1, GaussianMatchesOracle) {
  const double lhs = fund1_lhs_oracle(), rhs = fund1_rhs_oracle();
  EXPECT_NEAR(lhs, rhs, 1e-10);
  EXPECT_NEAR(lhs, -16.0 * kPi / 27.0, 1e-10);
  std::vector<double> errs;
  for (int N : {64, 128, 256}) {
    const Fund1Check c = identity_check_fund1(gaussian(GridSpec::make(2, 6.0, N)));
    if (N == 128) {
      EXPECT_LT(c.rel_err, 1e-3);
      EXPECT_NEAR(c.lhs, lhs, 5e-3 * std::abs(lhs));
      EXPECT_NEAR(c.rhs, rhs, 5e-3 * std::abs(rhs));
    }
    errs.push_back(c.rel_err);
  }
  EXPECT_GE(std::log2(errs[0] / errs[1]), 1.5);
  EXPECT_GE(std::log2(errs[1] / errs[2]), 1.5);
}

TEST(Fund1, FlatTopPlateauConverges) {
  std::vector<double> errs;
  for (int N : {64, 128, 256}) {
    const GridSpec g = GridSpec::make(2, 1.5, N);
    errs.push_back(identity_check_fund1(bumps_field(g, Profile::Plateau, {Bump{{0.0, 0.0, 0.0}, 1.0, 1.0}})).rel_err);
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], errs[1]);
}

TEST(Fund1, Errors) {
  expect_error(ErrorKind::SupportTouchesBoundary, [] { (void)identity_check_fund1(gaussian(GridSpec::make(2, 1.0, 32))); });
  ScalarField p(GridSpec::make(2, 1.0, 8));
  p[20] = -1.0;
  expect_error(ErrorKind::NegativeDensity, [&] { (void)identity_check_fund1(p); });
}

TEST(TimeIntegral, TrapezoidRule) {
  std::vector<DiagnosticsRecord> series(5);
  for (int k = 0; k < 5; ++k) {
    series[k].t = 0.25 * k;
    series[k].mass = 1.0 + 2.0 * series[k].t;
    series[k].sup_p = series[k].t * series[k].t;
  }
  EXPECT_DOUBLE_EQ(time_integral(series, &DiagnosticsRecord::mass), 2.0);
  EXPECT_NEAR(time_integral(series, &DiagnosticsRecord::sup_p), 1.0 / 3.0 + 1.0 / 96.0, 1e-15);
  EXPECT_EQ(time_integral({series[0]}, &DiagnosticsRecord::mass), 0.0);
  EXPECT_EQ(time_integral({}, &DiagnosticsRecord::mass), 0.0);
}

TEST(InitialBounds, KnownField) {
  const GridSpec g = GridSpec::make(1, 1.0, 4);
  ScalarField rho(g);
  rho[1] = 0.5;  // x = -0.25
  const InitialDataBounds b = initial_data_bounds(rho, 2.0);
  EXPECT_DOUBLE_EQ(b.mass_moment, 0.5 * (1 + 0.0625) * 0.5);
  EXPECT_DOUBLE_EQ(b.pressure_moment, 0.25 * (1 + 0.0625) * 0.5);
}

TEST(Columns, NamesAndMembers) {
  const auto& cols = diagnostics_columns();
  EXPECT_EQ(cols.front(), "t");
  EXPECT_EQ(std::set<std::string>(cols.begin(), cols.end()).size(), cols.size());
  EXPECT_EQ(diagnostics_member("comp_residual"), &DiagnosticsRecord::comp_residual);
  expect_error(ErrorKind::InvalidArgument, [] { (void)diagnostics_member("nope"); });
}

TEST(Csv, RoundTripIsExact) {
  const GridSpec g = GridSpec::make(2, 1.0, 24);
  const SimState s = state_of(bump(g, {0.1, -0.2, 0.0}, 0.6), 3.0, GrowthLaw::smooth_tanh(1.0, 1.0),
                              DriftKernel::newtonian());
  std::vector<DiagnosticsRecord> series{evaluate_diagnostics(s), evaluate_diagnostics(s, 0.25)};
  series[1].t = 1.0 / 3.0;
  std::stringstream ss;
  write_csv(ss, series);
  const std::string text = ss.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    for (const auto& col : diagnostics_columns()) {
      EXPECT_EQ(back[k].*diagnostics_member(col), series[k].*diagnostics_member(col)) << col;
    }
  }
  std::stringstream bad("t,mass\n0,1\n");
  expect_error(ErrorKind::FormatMismatch, [&] { (void)read_csv(bad); });
}

TEST(Json, SeriesSerializes) {
  std::vector<DiagnosticsRecord> series(2);
  series[1].t = 0.5;
  const std::string json = to_json(series);
  EXPECT_EQ(json.front(), '[');
  EXPECT_NE(json.find("\"comp_residual\""), std::string::npos);
  EXPECT_EQ(to_json({}), "[]");
}
