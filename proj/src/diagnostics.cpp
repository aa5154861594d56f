#include "pmelimit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "pmelimit/error.hpp"

namespace pmelimit {

namespace {

using Member = double DiagnosticsRecord::*;

const std::vector<std::pair<std::string, Member>>& column_table() {
  static const std::vector<std::pair<std::string, Member>> table = {
      {"t", &DiagnosticsRecord::t},
      {"m", &DiagnosticsRecord::m},
      {"mass", &DiagnosticsRecord::mass},
      {"p_int", &DiagnosticsRecord::p_int},
      {"grad_p_sq", &DiagnosticsRecord::grad_p_sq},
      {"grad_p_frac_sq", &DiagnosticsRecord::grad_p_frac_sq},
      {"grad_p_frac2_sq", &DiagnosticsRecord::grad_p_frac2_sq},
      {"grad_p_half_sq", &DiagnosticsRecord::grad_p_half_sq},
      {"rho_pow_int", &DiagnosticsRecord::rho_pow_int},
      {"second_moment", &DiagnosticsRecord::second_moment},
      {"sup_rho", &DiagnosticsRecord::sup_rho},
      {"sup_p", &DiagnosticsRecord::sup_p},
      {"excess", &DiagnosticsRecord::excess},
      {"p_times_onemrho", &DiagnosticsRecord::p_times_onemrho},
      {"rho_gradp_defect", &DiagnosticsRecord::rho_gradp_defect},
      {"comp_residual", &DiagnosticsRecord::comp_residual},
      {"comp_residual_dphi", &DiagnosticsRecord::comp_residual_dphi},
      {"comp_residual_literal", &DiagnosticsRecord::comp_residual_literal},
      {"l4_alpha", &DiagnosticsRecord::l4_alpha},
      {"l4_value", &DiagnosticsRecord::l4_value},
      {"hess_energy", &DiagnosticsRecord::hess_energy},
      {"stiff_energy", &DiagnosticsRecord::stiff_energy},
      {"boundary_mass", &DiagnosticsRecord::boundary_mass},
      {"est1_lhs", &DiagnosticsRecord::est1_lhs},
      {"est1_rhs", &DiagnosticsRecord::est1_rhs},
      {"grad_phi_l2", &DiagnosticsRecord::grad_phi_l2},
      {"grad_phi_linf", &DiagnosticsRecord::grad_phi_linf},
      {"dtrho_p", &DiagnosticsRecord::dtrho_p},
  };
  return table;
}

// −Δφ as the residuals see it, per kernel kind.
ScalarField potential_source(const SimState& s, bool discrete) {
  switch (s.params.kernel.kind) {
    case DriftKernel::Kind::Newtonian: {
      if (!discrete) return s.rho;
      ScalarField lap = laplacian(s.phi);
      for (std::size_t i = 0; i < lap.size(); ++i) lap[i] = -lap[i];
      return lap;
    }
    case DriftKernel::Kind::CustomSmooth: {
      ScalarField div = divergence(s.grad_phi);
      for (std::size_t i = 0; i < div.size(); ++i) div[i] = -div[i];
      return div;
    }
    case DriftKernel::Kind::Off:
      break;
  }
  return ScalarField(s.rho.spec());
}

double boundary_layer_mass(const ScalarField& rho) {
  const GridSpec& g = rho.spec();
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] != 0.0 && g.in_boundary_layer(i, 2)) s += rho[i];
  }
  return s * g.cell_volume();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, member] : column_table()) out.push_back(name);
    return out;
  }();
  return names;
}

double DiagnosticsRecord::*diagnostics_member(const std::string& column) {
  for (const auto& [name, member] : column_table()) {
    if (name == column) return member;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown diagnostics column '" + column + "'");
}

ScalarField hessian_norm_sq(const ScalarField& f) {
  const GridSpec& g = f.spec();
  const int N = g.cells_per_axis();
  const double invh2 = 1.0 / (g.spacing() * g.spacing());
  ScalarField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    for_each_line(g, d, [&](std::size_t start, std::size_t s) {
      for (int k = 0; k < N; ++k) {
        const std::size_t c = start + k * s;
        const double lo = k > 0 ? f[c - s] : 0.0;
        const double hi = k < N - 1 ? f[c + s] : 0.0;
        const double dd = (hi - 2.0 * f[c] + lo) * invh2;
        out[c] += dd * dd;
      }
    });
  }
  if (g.dim() > 1) {
    const VectorField first = gradient(f);
    for (int d = 0; d < g.dim(); ++d) {
      const VectorField second = gradient(first[d]);
      for (int e = d + 1; e < g.dim(); ++e) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += 2.0 * second[e][i] * second[e][i];
      }
    }
  }
  return out;
}

DiagnosticsRecord apriori_functionals(const SimState& s) {
  const GridSpec& g = s.rho.spec();
  const double m = s.params.m;
  const double vol = g.cell_volume();
  const PressurePowers pw = pressure_powers(s.rho, m);

  DiagnosticsRecord r;
  r.t = s.t;
  r.m = m;
  r.mass = integrate(s.rho);
  r.p_int = integrate(pw.p);
  r.grad_p_sq = integrate(gradient_energy_density(pw.p));
  r.grad_p_frac_sq = integrate(gradient_energy_density(pw.p_frac));
  r.grad_p_frac2_sq = integrate(gradient_energy_density(pw.p_frac2));
  r.grad_p_half_sq = integrate(gradient_energy_density(pw.p_half));
  r.est1_rhs = 0.5 * r.grad_p_frac_sq;

  double pow5 = 0.0, pow3 = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double rho = s.rho[i];
    if (rho <= 0.0) continue;
    const double pf = pw.p_frac2[i];
    pow3 += pf * rho;
    pow5 += pf * rho * rho * rho;
    const Point x = g.position(i);
    moment += (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * rho;
  }
  r.rho_pow_int = pow5 * vol;
  r.est1_lhs = pow3 * vol;
  r.second_moment = moment * vol;
  r.sup_rho = std::max(s.rho.max(), 0.0);
  r.sup_p = std::max(pw.p.max(), 0.0);
  r.boundary_mass = boundary_layer_mass(s.rho);
  r.grad_phi_l2 = std::sqrt(integrate(dot(s.grad_phi, s.grad_phi)));
  r.grad_phi_linf = s.grad_phi.max_magnitude();
  return r;
}

double complementarity_residual(const SimState& s, ResidualForm form) {
  const ScalarField growth = growth_eval(s.p, s.params.growth);
  ScalarField integrand(s.rho.spec());
  if (form == ResidualForm::Literal) {
    ScalarField inner(s.rho.spec());
    for (std::size_t i = 0; i < inner.size(); ++i) inner[i] = s.p[i] - s.phi[i] + growth[i];
    const ScalarField lap = laplacian(inner);
    for (std::size_t i = 0; i < integrand.size(); ++i) integrand[i] = std::abs(s.p[i] * lap[i]);
    return integrate(integrand);
  }
  const ScalarField source = potential_source(s, form == ResidualForm::DiscretePotential);
  const ScalarField lap = laplacian(s.p);
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    integrand[i] = std::abs(s.p[i] * (lap[i] + source[i] + growth[i]));
  }
  return integrate(integrand);
}

LimitProxies limit_relation_proxies(const SimState& s) {
  LimitProxies out;
  out.excess = std::max(s.rho.max() - 1.0, 0.0);
  const ScalarField energy = gradient_energy_density(s.p);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double gap = 1.0 - s.rho[i];
    a += s.p[i] * std::abs(gap);
    b += gap * gap * energy[i];
  }
  const double vol = s.rho.spec().cell_volume();
  out.p_times_onemrho = a * vol;
  out.rho_gradp_defect = b * vol;
  return out;
}

L4Functionals l4_functionals(const ScalarField& p, const ScalarField& minus_lap_phi, const ScalarField& growth,
                             double m, double alpha, double pressure_floor) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1)");
  const ScalarField energy = gradient_energy_density(p);
  const ScalarField lap = laplacian(p);
  const ScalarField hess = hessian_norm_sq(p);
  double l4 = 0.0, he = 0.0, st = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    if (pi > pressure_floor) l4 += energy[i] * energy[i] / std::pow(std::max(pi, pressure_floor), alpha);
    he += pi * hess[i];
    const double res = lap[i] + minus_lap_phi[i] + growth[i];
    st += pi * res * res;
  }
  const double vol = p.spec().cell_volume();
  return {l4 * vol, he * vol, m * st * vol};
}

L4Functionals l4_functionals(const SimState& s, double alpha, double pressure_floor) {
  return l4_functionals(s.p, potential_source(s, false), growth_eval(s.p, s.params.growth), s.params.m, alpha,
                        pressure_floor);
}

Fund1Check identity_check_fund1(const ScalarField& p) {
  const GridSpec& g = p.spec();
  double peak = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -kPositivityTolerance) {
      throw Error(ErrorKind::NegativeDensity, "identity check needs p >= 0; cell " + std::to_string(i));
    }
    peak = std::max(peak, std::abs(p[i]));
  }
  const double negligible = 1e-12 * peak;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::abs(p[i]) > negligible && g.in_boundary_layer(i, 2)) {
      throw Error(ErrorKind::SupportTouchesBoundary,
                  "p = " + format_double(p[i]) + " on the outer layer at cell " + std::to_string(i));
    }
  }
  const ScalarField energy = gradient_energy_density(p);
  const ScalarField lap = laplacian(p);
  const ScalarField hess = hessian_norm_sq(p);
  double lhs = 0.0, hess_term = 0.0, lap_term = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    lhs += energy[i] * lap[i];
    hess_term += p[i] * hess[i];
    lap_term += p[i] * lap[i] * lap[i];
  }
  const double vol = g.cell_volume();
  Fund1Check out;
  out.lhs = lhs * vol;
  out.rhs = (2.0 / 3.0) * (hess_term - lap_term) * vol;
  const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
  out.rel_err = std::abs(out.lhs - out.rhs) / scale;
  return out;
}

DiagnosticsRecord evaluate_diagnostics(const SimState& s, double l4_alpha) {
  DiagnosticsRecord r = apriori_functionals(s);
  const LimitProxies lp = limit_relation_proxies(s);
  r.excess = lp.excess;
  r.p_times_onemrho = lp.p_times_onemrho;
  r.rho_gradp_defect = lp.rho_gradp_defect;
  r.comp_residual = complementarity_residual(s, ResidualForm::PressureEquation);
  r.comp_residual_dphi = complementarity_residual(s, ResidualForm::DiscretePotential);
  r.comp_residual_literal = complementarity_residual(s, ResidualForm::Literal);
  const L4Functionals l4 = l4_functionals(s, l4_alpha);
  r.l4_alpha = l4_alpha;
  r.l4_value = l4.l4_value;
  r.hess_energy = l4.hess_energy;
  r.stiff_energy = l4.stiff_energy;
  return r;
}

double time_integral(const std::vector<DiagnosticsRecord>& series, double DiagnosticsRecord::*field) {
  double total = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    total += 0.5 * (series[k].t - series[k - 1].t) * (series[k].*field + series[k - 1].*field);
  }
  return total;
}

InitialDataBounds initial_data_bounds(const ScalarField& rho, double m) {
  const GridSpec& g = rho.spec();
  InitialDataBounds b;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i];
    if (r <= 0.0) continue;
    const Point x = g.position(i);
    b.mass_moment += r * (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    b.pressure_moment += std::pow(r, m) * (1.0 + r * r * r * r);
  }
  b.mass_moment *= g.cell_volume();
  b.pressure_moment *= g.cell_volume();
  return b;
}

// --- serialization -------------------------------------------------------------

void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& series) {
  const auto& table = column_table();
  for (std::size_t c = 0; c < table.size(); ++c) os << (c ? "," : "") << table[c].first;
  os << '\n';
  for (const auto& rec : series) {
    for (std::size_t c = 0; c < table.size(); ++c) os << (c ? "," : "") << format_double(rec.*(table[c].second));
    os << '\n';
  }
}

std::vector<DiagnosticsRecord> read_csv(std::istream& is) {
  const auto& table = column_table();
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::FormatMismatch, "diagnostics CSV is empty");
  {
    std::istringstream hs(line);
    std::string name;
    std::size_t c = 0;
    while (std::getline(hs, name, ',')) {
      if (c >= table.size() || name != table[c].first) {
        throw Error(ErrorKind::FormatMismatch, "unexpected CSV column '" + name + "'");
      }
      ++c;
    }
    if (c != table.size()) throw Error(ErrorKind::FormatMismatch, "CSV header is missing columns");
  }
  std::vector<DiagnosticsRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    DiagnosticsRecord rec;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= table.size()) throw Error(ErrorKind::FormatMismatch, "too many CSV fields");
      rec.*(table[c].second) = std::strtod(cell.c_str(), nullptr);
      ++c;
    }
    if (c != table.size()) throw Error(ErrorKind::FormatMismatch, "too few CSV fields");
    out.push_back(rec);
  }
  return out;
}

std::string to_json(const std::vector<DiagnosticsRecord>& series) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& rec : series) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [name, member] : column_table()) obj[name] = rec.*member;
    arr.push_back(std::move(obj));
  }
  return arr.dump();
}

}  // namespace pmelimit
