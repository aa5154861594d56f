#include "pmelimit/model.hpp"

#include <cmath>
#include <sstream>

#include "pmelimit/error.hpp"

namespace pmelimit {

namespace {

constexpr double kNegativeTolerance = 1e-12;

double checked_density(double r, std::size_t i) {
  if (r >= 0.0) return r;
  if (r >= -kNegativeTolerance) return 0.0;
  throw Error(ErrorKind::NegativeDensity, "density " + std::to_string(r) + " at cell " + std::to_string(i));
}

double power(double r, double e) { return r == 0.0 ? 0.0 : std::pow(r, e); }

}  // namespace

double GrowthLaw::operator()(double p) const noexcept {
  if (kind == Kind::Off) return 0.0;
  return max_rate * std::tanh((homeostatic_pressure - p) / homeostatic_pressure);
}

void GrowthLaw::validate() const {
  if (kind == Kind::Off) return;
  if (!(max_rate >= 0.0) || !std::isfinite(max_rate)) {
    throw Error(ErrorKind::InvalidArgument, "growth G_M must be finite and >= 0");
  }
  if (!(homeostatic_pressure > 0.0) || !std::isfinite(homeostatic_pressure)) {
    throw Error(ErrorKind::InvalidArgument, "growth p_H must be finite and > 0");
  }
}

std::string_view to_string(GrowthLaw::Kind kind) {
  return kind == GrowthLaw::Kind::Off ? "off" : "smooth_tanh";
}

GrowthValidation validate_growth_law(const GrowthLaw& law, double ceiling) {
  law.validate();
  if (!(ceiling > 0.0) || !std::isfinite(ceiling)) {
    throw Error(ErrorKind::InvalidArgument, "pressure ceiling P_M must be positive");
  }
  GrowthValidation v;
  const double pH = law.homeostatic_pressure;
  constexpr int kSamples = 10000;

  v.bounded = true;
  for (int k = 0; k <= kSamples; ++k) {
    const double p = 10.0 * pH * k / kSamples;
    if (std::abs(law(p)) > law.max_rate) v.bounded = false;
  }

  // [p_H, 100 p_H] densely, then a geometric tail.
  v.nonpositive_above_pH = true;
  for (int k = 0; k <= kSamples; ++k) {
    const double p = pH * (1.0 + 99.0 * k / kSamples);
    if (law(p) > 0.0) v.nonpositive_above_pH = false;
  }
  for (double p = 100.0 * pH; p < 1e12 * pH; p *= 10.0) {
    if (law(p) > 0.0) v.nonpositive_above_pH = false;
  }

  // A + G(P_M) is increasing in A, so the worst case is the right end.
  v.ceiling_margin = std::max(1.0, ceiling) + law(ceiling);
  v.ceiling_condition = v.ceiling_margin <= 0.0;

  std::ostringstream msg;
  if (!v.bounded) msg << "|G| exceeds G_M; ";
  if (!v.nonpositive_above_pH) msg << "G > 0 somewhere above p_H; ";
  if (!v.ceiling_condition) msg << "P_M + G(P_M) = " << v.ceiling_margin << " > 0; ";
  v.message = v.passed() ? "ok" : msg.str();
  return v;
}

void ModelParams::validate() const {
  if (!(m >= 2.0) || !std::isfinite(m)) {
    throw Error(ErrorKind::InvalidArgument, "pressure exponent m must be >= 2, got " + std::to_string(m));
  }
  growth.validate();
  kernel.validate(grid);
  if (pressure_ceiling) {
    const auto report = validate_growth_law(growth, *pressure_ceiling);
    if (!report.passed()) {
      throw Error(ErrorKind::InvalidArgument, "growth law fails the ceiling condition: " + report.message);
    }
  }
}

ScalarField pressure(const ScalarField& rho, double m) {
  ScalarField p(rho.spec());
  for (std::size_t i = 0; i < rho.size(); ++i) p[i] = power(checked_density(rho[i], i), m);
  return p;
}

PressurePowers pressure_powers(const ScalarField& rho, double m) {
  PressurePowers out{ScalarField(rho.spec()), ScalarField(rho.spec()), ScalarField(rho.spec()),
                     ScalarField(rho.spec())};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = checked_density(rho[i], i);
    if (r == 0.0) continue;
    const double p = std::pow(r, m);
    out.p[i] = p;
    out.p_frac[i] = p * r;
    out.p_frac2[i] = p * r * r;
    out.p_half[i] = std::pow(r, 0.5 * (m + 1.0));
  }
  return out;
}

ScalarField growth_eval(const ScalarField& p, const GrowthLaw& law) {
  ScalarField g(p.spec());
  if (law.kind == GrowthLaw::Kind::Off) return g;
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = law(p[i]);
  return g;
}

}  // namespace pmelimit
