#pragma once

// Explicit conservative finite-volume stepping of
//   ∂t ρ = Δ( m/(m+1) ρ^{m+1} ) − div(ρ ∇φ) + ρ G(ρ^m)
// in a closed box (no flux through the outer faces).

#include <cstddef>

#include "pmelimit/grid.hpp"
#include "pmelimit/model.hpp"
#include "pmelimit/potential.hpp"

namespace pmelimit {

inline constexpr double kDefaultCfl = 0.4;
inline constexpr double kDtGuard = 1e-30;
inline constexpr double kFlushBelow = 1e-300;
inline constexpr double kPositivityTolerance = 1e-12;

/// Density plus the fields derived from it. The cached fields are always
/// consistent with rho: the Stepper recomputes them after every update.
struct SimState {
  double t = 0.0;
  ScalarField rho;
  ModelParams params;
  ScalarField p;         // ρ^m
  ScalarField phi;       // zero unless the drift is Newtonian
  VectorField grad_phi;  // drift velocity field
  std::size_t step_count = 0;
};

/// C · min( h² / (2n (m+1) max p + ε), h / (max|∇φ| + ε), 1 / (G_M + ε) ).
/// A switched-off growth law contributes G_M = 0.
double stable_dt(const SimState& state, double cfl = kDefaultCfl);

class Stepper {
 public:
  /// Validates the parameters; throws like ModelParams::validate().
  explicit Stepper(ModelParams params, double cfl = kDefaultCfl);

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] double cfl() const noexcept { return cfl_; }

  /// Builds a state at time t with all cached fields filled in.
  SimState initialize(ScalarField rho, double t = 0.0);

  /// One explicit step. Throws CflViolation when dt exceeds stable_dt and
  /// PositivityLoss when a density drops below -1e-12.
  SimState step(const SimState& state, double dt);
  /// In-place form of step() used by long runs.
  void advance(SimState& state, double dt);

  /// Re-derives p, φ and ∇φ from state.rho; NonFiniteField if ρ^m overflows.
  void refresh(SimState& state);

 private:
  ModelParams params_;
  double cfl_;
  DriftOperator drift_;
  ScalarField next_;
};

}  // namespace pmelimit
