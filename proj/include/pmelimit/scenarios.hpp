#pragma once

// Initial-data families and the closed-form source solution used as an
// accuracy oracle for the pure degenerate-diffusion case.

#include <string>
#include <vector>

#include "pmelimit/grid.hpp"

namespace pmelimit {

struct Bump {
  Point center{0.0, 0.0, 0.0};
  double radius = 1.0;
  double amplitude = 0.9;
};

enum class Profile {
  Bump,        // A exp(1 - 1/(1 - s²)) for s = |x - c|/R < 1 (C^∞, compact)
  Plateau,     // flat top A for s < 1/2, C² quintic roll-off to 0 at s = 1
  Patch,       // A on s < 1 (non-smooth)
  Barenblatt,  // source solution at time tau0
};

std::string_view to_string(Profile p);
/// Throws ConfigInvalid for unknown names.
Profile parse_profile(const std::string& name);

/// Value of a single bump of the given profile at distance fraction s = r/R.
double profile_shape(Profile profile, double s);

/// Sum of the bumps; overlapping bumps add.
ScalarField bumps_field(const GridSpec& grid, Profile profile, const std::vector<Bump>& bumps);

/// Source-type self-similar solution of ∂τ u = Δ u^{m+1} in n dimensions:
///   u = τ^{-α} (C − κ |x|² τ^{-2β})₊^{1/m},
///   α = n / (n m + 2), β = α / n, κ = α m / (2 (m+1) n).
/// For ∂t ρ = m/(m+1) Δ ρ^{m+1} the solution is u(x, τ0 + m/(m+1) t).
struct Barenblatt {
  int n = 1;
  double m = 2.0;
  double C = 1.0;

  [[nodiscard]] double alpha() const noexcept;
  [[nodiscard]] double beta() const noexcept;
  [[nodiscard]] double kappa() const noexcept;
  [[nodiscard]] double density(double r, double tau) const noexcept;
  [[nodiscard]] double front_radius(double tau) const noexcept;
  /// τ reached after running the scaled equation for time t from tau0.
  [[nodiscard]] double tau_after(double tau0, double t) const noexcept { return tau0 + m / (m + 1.0) * t; }

  [[nodiscard]] ScalarField sample(const GridSpec& grid, double tau) const;
  /// Cell averages by the midpoint rule on `sub` sub-cells per axis (0 picks
  /// 64, 12 or 4 for n = 1, 2, 3). The front singularity makes these far
  /// less alignment-sensitive than point samples.
  [[nodiscard]] ScalarField cell_average(const GridSpec& grid, double tau, int sub = 0) const;
};

}  // namespace pmelimit
