#pragma once

// Integral functionals, limit-relation proxies and identity checks evaluated
// on simulation states. Everything here is a pure function of its inputs.

#include <iosfwd>
#include <string>
#include <vector>

#include "pmelimit/stepper.hpp"

namespace pmelimit {

inline constexpr double kPressureFloor = 1e-12;  // ε_p in |∇p|⁴ / max(p, ε_p)^α

/// One sample of every monitored functional. Gradient energies use the
/// discrete Dirichlet density (gradient_energy_density), so ∫|∇f|² equals
/// -∫ f Δ_h f exactly.
struct DiagnosticsRecord {
  double t = 0.0;
  double m = 0.0;
  double mass = 0.0;             // ∫ρ
  double p_int = 0.0;            // ∫p
  double grad_p_sq = 0.0;        // ∫|∇p|²
  double grad_p_frac_sq = 0.0;   // ∫|∇p^{(m+1)/m}|²
  double grad_p_frac2_sq = 0.0;  // ∫|∇p^{(m+2)/m}|²
  double grad_p_half_sq = 0.0;   // ∫|∇p^{(m+1)/(2m)}|²
  double rho_pow_int = 0.0;      // ∫ρ^{m+5}
  double second_moment = 0.0;    // ∫|x|²ρ
  double sup_rho = 0.0;
  double sup_p = 0.0;
  double excess = 0.0;              // sup (ρ-1)₊
  double p_times_onemrho = 0.0;     // ∫p|1-ρ|
  double rho_gradp_defect = 0.0;    // ∫|(1-ρ)∇p|²
  double comp_residual = 0.0;       // ∫|p(Δp + ρ + G(p))|, −Δφ taken as ρ
  double comp_residual_dphi = 0.0;  // same with the discrete Δφ
  double comp_residual_literal = 0.0;  // ∫|p Δ[p − φ + G(p)]|
  double l4_alpha = 0.0;
  double l4_value = 0.0;            // ∫|∇p|⁴ / max(p, ε_p)^α over p > ε_p
  double hess_energy = 0.0;         // ∫p|D²p|²
  double stiff_energy = 0.0;        // m ∫p(Δp + ρ + G(p))²
  double boundary_mass = 0.0;       // mass in the outer two cell layers
  double est1_lhs = 0.0;            // ∫ρ^{m+3}
  double est1_rhs = 0.0;            // ½∫|∇ρ^{m+1}|²
  double grad_phi_l2 = 0.0;         // ‖∇φ‖_{L²}
  double grad_phi_linf = 0.0;       // ‖∇φ‖_{L∞}
  double dtrho_p = 0.0;             // ∫(∂tρ) p over the last step, informational
};

/// CSV column names in output order.
const std::vector<std::string>& diagnostics_columns();

/// Member pointer for a column name; throws InvalidArgument if unknown.
double DiagnosticsRecord::*diagnostics_member(const std::string& column);

/// mass, p_int, the gradient energies, ∫ρ^{m+5}, the second moment, sup
/// norms, boundary mass, the (est:1) pair and the ∇φ norms.
DiagnosticsRecord apriori_functionals(const SimState& state);

enum class ResidualForm {
  PressureEquation,   // p (Δp + ρ + G(p))  with −Δφ = ρ substituted
  DiscretePotential,  // p (Δp − Δ_hφ + G(p))
  Literal,            // p Δ[p − φ + G(p)]
};

/// ∫ |p (Δp − Δφ + G(p))| in the requested form. For a switched-off drift
/// the potential terms vanish; for a custom kernel −Δφ is −div(∇φ).
double complementarity_residual(const SimState& state, ResidualForm form = ResidualForm::PressureEquation);

struct LimitProxies {
  double excess = 0.0;
  double p_times_onemrho = 0.0;
  double rho_gradp_defect = 0.0;
};
LimitProxies limit_relation_proxies(const SimState& state);

struct L4Functionals {
  double l4_value = 0.0;
  double hess_energy = 0.0;
  double stiff_energy = 0.0;
};
/// alpha must lie in [0, 1); throws InvalidArgument otherwise.
L4Functionals l4_functionals(const SimState& state, double alpha, double pressure_floor = kPressureFloor);

/// Same functionals on bare fields; minus_lap_phi stands in for −Δφ.
L4Functionals l4_functionals(const ScalarField& p, const ScalarField& minus_lap_phi, const ScalarField& growth,
                             double m, double alpha, double pressure_floor = kPressureFloor);

struct Fund1Check {
  double lhs = 0.0;  // ∫|∇p|² Δp
  double rhs = 0.0;  // (2/3)∫p|D²p|² − (2/3)∫p|Δp|²
  double rel_err = 0.0;
};
/// Throws SupportTouchesBoundary if p is non-negligible on the outer two
/// cell layers, NegativeDensity if p < 0 anywhere.
Fund1Check identity_check_fund1(const ScalarField& p);

/// Σ_ij (D_ij f)²: compact second differences on the diagonal, successive
/// centered differences off it.
ScalarField hessian_norm_sq(const ScalarField& f);

/// Everything above in one record; dtrho_p is left at zero.
DiagnosticsRecord evaluate_diagnostics(const SimState& state, double l4_alpha = 0.5);

/// Trapezoid rule in time over the record series for one field.
double time_integral(const std::vector<DiagnosticsRecord>& series, double DiagnosticsRecord::*field);

/// ∫ρ⁰(1 + |x|²) and ∫p⁰(1 + (ρ⁰)⁴): the two initial-data constants.
struct InitialDataBounds {
  double mass_moment = 0.0;
  double pressure_moment = 0.0;
};
InitialDataBounds initial_data_bounds(const ScalarField& rho, double m);

// --- serialization -----------------------------------------------------------

/// Header line plus one row per record, 17 significant digits.
void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& series);
/// Inverse of write_csv; throws FormatMismatch on a header mismatch.
std::vector<DiagnosticsRecord> read_csv(std::istream& is);

std::string to_json(const std::vector<DiagnosticsRecord>& series);

}  // namespace pmelimit
