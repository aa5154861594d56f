#pragma once

#include <optional>
#include <string>

#include "pmelimit/grid.hpp"
#include "pmelimit/potential.hpp"

namespace pmelimit {

/// Pressure-limited growth rate G(p).
///
/// SmoothTanh: G(p) = G_M tanh((p_H - p) / p_H). It is C^∞, bounded by G_M and
/// nonpositive beyond the homeostatic pressure p_H.
struct GrowthLaw {
  enum class Kind { Off, SmoothTanh };

  Kind kind = Kind::Off;
  double max_rate = 0.0;             // G_M
  double homeostatic_pressure = 1.0; // p_H

  static GrowthLaw off() { return {}; }
  static GrowthLaw smooth_tanh(double max_rate, double homeostatic_pressure) {
    return {Kind::SmoothTanh, max_rate, homeostatic_pressure};
  }

  [[nodiscard]] double operator()(double p) const noexcept;
  /// G(0), the largest rate the law can produce.
  [[nodiscard]] double at_zero() const noexcept { return (*this)(0.0); }
  /// Throws InvalidArgument for negative G_M or non-positive p_H.
  void validate() const;
};

std::string_view to_string(GrowthLaw::Kind kind);

struct GrowthValidation {
  bool bounded = false;              // |G| <= G_M on [0, 10 p_H]
  bool nonpositive_above_pH = false; // G <= 0 on [p_H, ∞), sampled
  bool ceiling_condition = false;    // A + G(P_M) <= 0 for all A in [1, P_M]
  double ceiling_margin = 0.0;       // max(1, P_M) + G(P_M); <= 0 to pass
  [[nodiscard]] bool passed() const noexcept { return bounded && nonpositive_above_pH && ceiling_condition; }
  std::string message;
};

GrowthValidation validate_growth_law(const GrowthLaw& law, double ceiling);

struct ModelParams {
  double m = 2.0;
  GrowthLaw growth;
  DriftKernel kernel;
  GridSpec grid = GridSpec::make(2, 1.0, 4);
  std::optional<double> pressure_ceiling;  // P_M

  /// Throws Error(InvalidArgument / DimensionUnsupported) when an invariant fails:
  /// m >= 2, kernel valid on the grid, and P_M passing validate_growth_law.
  void validate() const;
};

/// ρ^m together with the fractional pressure powers the estimates use, all
/// evaluated from ρ directly so that 0^0 never appears.
struct PressurePowers {
  ScalarField p;           // ρ^m
  ScalarField p_frac;      // p^{(m+1)/m} = ρ^{m+1}
  ScalarField p_frac2;     // p^{(m+2)/m} = ρ^{m+2}
  ScalarField p_half;      // p^{(m+1)/(2m)} = ρ^{(m+1)/2}
};

/// Pointwise ρ^m. Entries in [-1e-12, 0) are treated as 0; anything more
/// negative throws NegativeDensity.
ScalarField pressure(const ScalarField& rho, double m);
PressurePowers pressure_powers(const ScalarField& rho, double m);

ScalarField growth_eval(const ScalarField& p, const GrowthLaw& law);

}  // namespace pmelimit
