#pragma once

// Chemotactic potential: free-space solve of -Δφ = ρ and the drift field ∇φ.

#include <functional>
#include <memory>
#include <optional>

#include "pmelimit/grid.hpp"

namespace pmelimit {

/// Drift selection. CustomSmooth evaluates ∇φ₀(x) + Σ_y K(x, y) ρ(y) hⁿ.
struct DriftKernel {
  enum class Kind { Off, Newtonian, CustomSmooth };
  using Kernel = std::function<Point(const Point& x, const Point& y)>;

  Kind kind = Kind::Off;
  std::optional<VectorField> background;  // ∇φ₀, CustomSmooth only
  Kernel kernel;                          // CustomSmooth only

  static DriftKernel off() { return {}; }
  static DriftKernel newtonian() { return {Kind::Newtonian, std::nullopt, {}}; }
  static DriftKernel custom(VectorField background, Kernel kernel) {
    return {Kind::CustomSmooth, std::move(background), std::move(kernel)};
  }

  /// Throws DimensionUnsupported (Newtonian outside n in {2,3}) or
  /// InvalidArgument (CustomSmooth without a callable / on the wrong grid).
  void validate(const GridSpec& grid) const;
};

std::string_view to_string(DriftKernel::Kind kind);

struct Potential {
  ScalarField phi;
  VectorField grad_phi;
};

/// Zero-padded FFT convolution with the free-space Green's function of -Δ.
///
/// The continuum kernel (−ln r / 2π in 2D, 1/(4π r) in 3D) is sampled at cell
/// centre offsets, with the self cell replaced by the kernel's average over a
/// cell. Padding to 2N per axis makes the circular convolution equal to the
/// linear one on the box plus one ghost ring, so grad_phi uses true exterior
/// values on the outermost layer.
///
/// One instance owns its FFT plans and buffers: use one per thread.
class NewtonianSolver {
 public:
  explicit NewtonianSolver(const GridSpec& grid);
  ~NewtonianSolver();
  NewtonianSolver(NewtonianSolver&&) noexcept;
  NewtonianSolver& operator=(NewtonianSolver&&) noexcept;
  NewtonianSolver(const NewtonianSolver&) = delete;
  NewtonianSolver& operator=(const NewtonianSolver&) = delete;

  [[nodiscard]] const GridSpec& grid() const noexcept;

  /// Throws NegativeDensity if any rho < -1e-12.
  Potential solve(const ScalarField& rho);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Self-cell value of the sampled Green's function (its cell average).
double green_self_cell(int n, double h);
/// Green's function of -Δ at distance r > 0.
double green_function(int n, double r);

/// One-shot convenience around NewtonianSolver.
Potential solve_newtonian(const ScalarField& rho);

/// Caches whatever a kernel needs between repeated evaluations on one grid.
class DriftOperator {
 public:
  DriftOperator(const GridSpec& grid, DriftKernel kernel);

  /// phi is zero unless the kernel is Newtonian.
  Potential evaluate(const ScalarField& rho);

  [[nodiscard]] const DriftKernel& kernel() const noexcept { return kernel_; }

 private:
  GridSpec grid_;
  DriftKernel kernel_;
  std::optional<NewtonianSolver> newtonian_;
};

/// Off -> zero; Newtonian -> grad_phi of solve_newtonian; CustomSmooth ->
/// background plus quadrature (throws KernelUnbounded on non-finite K).
VectorField drift_field(const ScalarField& rho, const DriftKernel& kernel);

}  // namespace pmelimit
