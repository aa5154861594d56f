// Self-checks behind `pmelimit check`: operator identities, exactness on low
// polynomials, Poisson defect order, solver linearity and the step mass
// balance. Thresholds are fixed; values are reported so drift is visible.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "pmelimit/diagnostics.hpp"
#include "pmelimit/harness.hpp"
#include "pmelimit/potential.hpp"
#include "pmelimit/scenarios.hpp"
#include "pmelimit/stepper.hpp"

namespace pmelimit {

namespace {

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

double max_abs_interior(const ScalarField& f, const std::function<double(const Point&)>& exact, int layers) {
  const GridSpec& g = f.spec();
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (g.in_boundary_layer(i, layers)) continue;
    worst = std::max(worst, std::abs(f[i] - exact(g.position(i))));
  }
  return worst;
}

ScalarField random_bumps(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.4 * g.half_width(), 0.4 * g.half_width());
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    for (int d = 0; d < g.dim(); ++d) b.center[d] = pos(rng);
    b.radius = 0.4 * g.half_width();
    b.amplitude = amp(rng);
  }
  return bumps_field(g, Profile::Bump, bumps);
}

// ‖Δ_h φ + ρ‖ over the interior relative to ‖ρ‖, for a Gaussian source.
double poisson_defect(int n, double L, int N) {
  const GridSpec g = GridSpec::make(n, L, N);
  const ScalarField rho = ScalarField::sample(g, [](const Point& x) { return std::exp(-4.0 * r2(x)); });
  const Potential pot = solve_newtonian(rho);
  const ScalarField lap = laplacian(pot.phi);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (g.in_boundary_layer(i, 2)) continue;
    num += (lap[i] + rho[i]) * (lap[i] + rho[i]);
    den += rho[i] * rho[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

std::vector<CheckResult> run_operator_checks() {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double threshold) {
    out.push_back({std::move(name), value <= threshold, value, threshold, false});
  };
  auto add_min = [&](std::string name, double value, double threshold) {
    out.push_back({std::move(name), value >= threshold, value, threshold, true});
  };
  std::mt19937_64 rng(20240611);

  for (int n = 1; n <= 3; ++n) {
    const GridSpec g = GridSpec::make(n, 2.0, n == 3 ? 24 : 48);
    const ScalarField f = random_bumps(g, rng);
    VectorField v(g);
    for (int d = 0; d < n; ++d) v[d] = random_bumps(g, rng);
    const double lhs = integrate(multiply(f, divergence(v)));
    const double rhs = -integrate(dot(gradient(f), v));
    const double scale = l2_norm(f) * std::sqrt(integrate(dot(v, v)));
    add("adjointness_" + std::to_string(n) + "d", std::abs(lhs - rhs) / scale, 1e-12);

    const ScalarField linear = ScalarField::sample(g, [](const Point& x) { return 3.0 * x[0] - 0.5; });
    add("gradient_linear_exact_" + std::to_string(n) + "d",
        max_abs_interior(gradient(linear)[0], [](const Point&) { return 3.0; }, 1), 1e-12);

    VectorField id(g);
    for (int d = 0; d < n; ++d) id[d] = ScalarField::sample(g, [d](const Point& x) { return x[d]; });
    add("divergence_linear_exact_" + std::to_string(n) + "d",
        max_abs_interior(divergence(id), [n](const Point&) { return static_cast<double>(n); }, 1), 1e-12);

    const ScalarField quad = ScalarField::sample(g, [](const Point& x) { return r2(x); });
    add("laplacian_quadratic_exact_" + std::to_string(n) + "d",
        max_abs_interior(laplacian(quad), [n](const Point&) { return 2.0 * n; }, 1), 1e-9);

    const ScalarField lap = laplacian(f);
    const ScalarField composed = face_divergence(face_gradient(f));
    double diff = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) diff = std::max(diff, std::abs(lap[i] - composed[i]));
    add("laplacian_composition_" + std::to_string(n) + "d", diff, 0.0);

    const double box = std::pow(2.0 * g.half_width(), n);
    add("integrate_constant_" + std::to_string(n) + "d",
        std::abs(integrate(ScalarField::constant(g, 1.0)) - box) / box, 1e-14);
  }

  for (int n = 2; n <= 3; ++n) {
    const int N0 = n == 2 ? 64 : 24;
    const double L = n == 2 ? 3.0 : 2.0;
    const double coarse = poisson_defect(n, L, N0);
    const double fine = poisson_defect(n, L, 2 * N0);
    add("poisson_defect_" + std::to_string(n) + "d", fine, 2e-2);
    add_min("poisson_defect_order_" + std::to_string(n) + "d", std::log2(coarse / fine), 1.8);

    const GridSpec g = GridSpec::make(n, L, N0);
    const ScalarField a = random_bumps(g, rng);
    const ScalarField b = random_bumps(g, rng);
    const Potential pa = solve_newtonian(a);
    const Potential pb = solve_newtonian(b);
    const Potential pab = solve_newtonian(axpy(2.0, a, multiply(ScalarField::constant(g, 0.5), b)));
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(pab.phi[i] - (2.0 * pa.phi[i] + 0.5 * pb.phi[i])));
      scale = std::max(scale, std::abs(pab.phi[i]));
    }
    add("newtonian_linearity_" + std::to_string(n) + "d", worst / scale, 1e-12);
  }

  {
    // Far field of a compact radial bump: |∇φ| = M / (2πr).
    const GridSpec g = GridSpec::make(2, 4.0, 128);
    const ScalarField rho = bumps_field(g, Profile::Bump, {Bump{}});
    const Potential pot = solve_newtonian(rho);
    const double mass = integrate(rho);
    const ScalarField mag = pot.grad_phi.magnitude();
    double worst = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double r = std::sqrt(r2(g.position(i)));
      if (r < 1.5 || r > 3.5) continue;
      const double expected = mass / (2.0 * std::numbers::pi * r);
      worst = std::max(worst, std::abs(mag[i] - expected) / expected);
    }
    add("newtonian_far_field_2d", worst, 1e-2);
  }

  {
    ModelParams params;
    params.m = 8.0;
    params.grid = GridSpec::make(2, 2.0, 64);
    params.kernel = DriftKernel::newtonian();
    Stepper stepper(params);
    SimState s = stepper.initialize(random_bumps(params.grid, rng));
    const double before = integrate(s.rho);
    stepper.advance(s, stable_dt(s, stepper.cfl()));
    add("step_mass_balance", std::abs(integrate(s.rho) - before) / before, 1e-12);
  }

  {
    const GridSpec g = GridSpec::make(2, 6.0, 128);
    const ScalarField p = ScalarField::sample(g, [](const Point& x) { return std::exp(-r2(x)); });
    add("fund1_rel_err", identity_check_fund1(p).rel_err, 1e-3);
  }
  return out;
}

}  // namespace pmelimit
