#include "pmelimit/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmelimit/error.hpp"

namespace pmelimit {

double stable_dt(const SimState& state, double cfl) {
  const GridSpec& g = state.rho.spec();
  const double h = g.spacing();
  const double m = state.params.m;
  const double max_p = std::max(state.p.max(), 0.0);
  const double max_drift = state.grad_phi.max_magnitude();
  const auto& growth = state.params.growth;
  const double max_rate = growth.kind == GrowthLaw::Kind::Off ? 0.0 : growth.max_rate;

  const double diffusion = h * h / (2.0 * g.dim() * (m + 1.0) * max_p + kDtGuard);
  const double drift = h / (max_drift + kDtGuard);
  const double reaction = 1.0 / (max_rate + kDtGuard);
  return cfl * std::min({diffusion, drift, reaction});
}

Stepper::Stepper(ModelParams params, double cfl)
    : params_((params.validate(), std::move(params))),
      cfl_(cfl),
      drift_(params_.grid, params_.kernel),
      next_(params_.grid) {
  if (!(cfl_ > 0.0 && cfl_ <= 1.0)) throw Error(ErrorKind::InvalidArgument, "CFL number must lie in (0, 1]");
}

SimState Stepper::initialize(ScalarField rho, double t) {
  if (!(rho.spec() == params_.grid)) throw Error(ErrorKind::InvalidArgument, "initial density lives on another grid");
  require_finite(rho, "initial density");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < -kPositivityTolerance) {
      throw Error(ErrorKind::NegativeDensity, "initial density is negative at cell " + std::to_string(i));
    }
    if (rho[i] < kFlushBelow) rho[i] = 0.0;
  }
  const GridSpec& g = params_.grid;
  SimState s{t, std::move(rho), params_, ScalarField(g), ScalarField(g), VectorField(g), 0};
  refresh(s);
  return s;
}

void Stepper::refresh(SimState& s) {
  const double m = params_.m;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double r = s.rho[i];
    s.p[i] = r == 0.0 ? 0.0 : std::pow(r, m);
    if (!std::isfinite(s.p[i])) {
      throw Error(ErrorKind::NonFiniteField, "pressure overflows at cell " + std::to_string(i) + " after step " +
                                                 std::to_string(s.step_count));
    }
  }
  Potential pot = drift_.evaluate(s.rho);
  s.phi = std::move(pot.phi);
  s.grad_phi = std::move(pot.grad_phi);
}

SimState Stepper::step(const SimState& state, double dt) {
  SimState next = state;
  advance(next, dt);
  return next;
}

void Stepper::advance(SimState& s, double dt) {
  const double limit = stable_dt(s, cfl_);
  if (!(dt >= 0.0) || dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CflViolation,
                "dt = " + std::to_string(dt) + " exceeds the stable step " + std::to_string(limit));
  }
  const GridSpec& g = params_.grid;
  const int N = g.cells_per_axis();
  const double h = g.spacing();
  const double coef = params_.m / (params_.m + 1.0);
  const double lambda = dt / h;
  const bool has_drift = params_.kernel.kind != DriftKernel::Kind::Off;
  const auto& rho = s.rho;
  const auto& p = s.p;

  std::copy(rho.values().begin(), rho.values().end(), next_.values().begin());

  for (int d = 0; d < g.dim(); ++d) {
    const auto& vel = s.grad_phi[d];
    for_each_line(g, d, [&](std::size_t start, std::size_t st) {
      for (int k = 0; k + 1 < N; ++k) {
        const std::size_t lo = start + k * st;
        const std::size_t hi = lo + st;
        const double rl = rho[lo];
        const double rh = rho[hi];
        if (rl == 0.0 && rh == 0.0) continue;
        // Diffusive flux of m/(m+1) ρ^{m+1}, then donor-cell drift.
        double flux = -coef * (p[hi] * rh - p[lo] * rl) / h;
        if (has_drift) {
          const double a = 0.5 * (vel[lo] + vel[hi]);
          flux += a > 0.0 ? a * rl : a * rh;
        }
        next_[lo] -= lambda * flux;
        next_[hi] += lambda * flux;
      }
    });
  }

  if (params_.growth.kind != GrowthLaw::Kind::Off) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (rho[i] != 0.0) next_[i] += dt * rho[i] * params_.growth(p[i]);
    }
  }

  for (std::size_t i = 0; i < next_.size(); ++i) {
    double& v = next_[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFiniteField,
                  "density became non-finite at cell " + std::to_string(i) + " in step " + std::to_string(s.step_count));
    }
    if (v < kFlushBelow) {
      if (v < -kPositivityTolerance) {
        throw Error(ErrorKind::PositivityLoss, "density " + std::to_string(v) + " at cell " + std::to_string(i) +
                                                   " in step " + std::to_string(s.step_count));
      }
      v = 0.0;
    }
  }

  std::swap(s.rho, next_);
  s.t += dt;
  ++s.step_count;
  refresh(s);
}

}  // namespace pmelimit
