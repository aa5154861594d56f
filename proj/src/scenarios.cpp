#include "pmelimit/scenarios.hpp"

#include <cmath>
#include <cstddef>

#include "pmelimit/error.hpp"

namespace pmelimit {

std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::Bump: return "bump";
    case Profile::Plateau: return "plateau";
    case Profile::Patch: return "patch";
    case Profile::Barenblatt: return "barenblatt";
  }
  return "unknown";
}

Profile parse_profile(const std::string& name) {
  if (name == "bump") return Profile::Bump;
  if (name == "plateau") return Profile::Plateau;
  if (name == "patch") return Profile::Patch;
  if (name == "barenblatt") return Profile::Barenblatt;
  throw Error(ErrorKind::ConfigInvalid, "initial.profile: unknown profile '" + name + "'");
}

double profile_shape(Profile profile, double s) {
  if (s >= 1.0) return 0.0;
  switch (profile) {
    case Profile::Bump:
      return std::exp(1.0 - 1.0 / (1.0 - s * s));
    case Profile::Plateau: {
      if (s <= 0.5) return 1.0;
      const double u = (1.0 - s) / 0.5;  // 1 at s = 1/2, 0 at s = 1
      return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    }
    case Profile::Patch:
      return 1.0;
    case Profile::Barenblatt:
      break;
  }
  throw Error(ErrorKind::InvalidArgument, "barenblatt data is not a bump profile");
}

ScalarField bumps_field(const GridSpec& grid, Profile profile, const std::vector<Bump>& bumps) {
  return ScalarField::sample(grid, [&](const Point& x) {
    double v = 0.0;
    for (const auto& b : bumps) {
      double r2 = 0.0;
      for (int d = 0; d < grid.dim(); ++d) r2 += (x[d] - b.center[d]) * (x[d] - b.center[d]);
      v += b.amplitude * profile_shape(profile, std::sqrt(r2) / b.radius);
    }
    return v;
  });
}

double Barenblatt::alpha() const noexcept { return n / (n * m + 2.0); }
double Barenblatt::beta() const noexcept { return alpha() / n; }
double Barenblatt::kappa() const noexcept { return alpha() * m / (2.0 * (m + 1.0) * n); }

double Barenblatt::density(double r, double tau) const noexcept {
  const double inner = C - kappa() * r * r * std::pow(tau, -2.0 * beta());
  if (inner <= 0.0) return 0.0;
  return std::pow(tau, -alpha()) * std::pow(inner, 1.0 / m);
}

double Barenblatt::front_radius(double tau) const noexcept {
  return std::sqrt(C / kappa()) * std::pow(tau, beta());
}

ScalarField Barenblatt::sample(const GridSpec& grid, double tau) const {
  return ScalarField::sample(grid, [&](const Point& x) {
    return density(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), tau);
  });
}

ScalarField Barenblatt::cell_average(const GridSpec& grid, double tau, int sub) const {
  const int n = grid.dim();
  const double h = grid.spacing();
  if (sub <= 0) sub = n == 1 ? 64 : n == 2 ? 12 : 4;
  int total = 1;
  for (int d = 0; d < n; ++d) total *= sub;
  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point c = grid.position(i);
    double acc = 0.0;
    for (int k = 0; k < total; ++k) {
      double r2 = 0.0;
      int rest = k;
      for (int d = 0; d < n; ++d) {
        const double x = c[d] + h * ((rest % sub + 0.5) / sub - 0.5);
        rest /= sub;
        r2 += x * x;
      }
      acc += density(std::sqrt(r2), tau);
    }
    out[i] = acc / total;
  }
  return out;
}

}  // namespace pmelimit
