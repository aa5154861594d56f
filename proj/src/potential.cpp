#include "pmelimit/potential.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include "pmelimit/error.hpp"

namespace pmelimit {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kNegativeTolerance = 1e-12;

// Mean of ln|y| over the unit square centred at the origin.
const double kLogCellMean2 = 0.5 * (-std::numbers::ln2 - 3.0 + std::numbers::pi / 2.0);
// Integral of 1/|y| over the unit cube centred at the origin.
const double kInverseCellIntegral3 =
    3.0 * std::log((std::numbers::sqrt3 + 1.0) / (std::numbers::sqrt3 - 1.0)) - std::numbers::pi / 2.0;

void check_density(const ScalarField& rho) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < -kNegativeTolerance) {
      throw Error(ErrorKind::NegativeDensity, "density " + std::to_string(rho[i]) + " at cell " + std::to_string(i));
    }
  }
}

}  // namespace

std::string_view to_string(DriftKernel::Kind kind) {
  switch (kind) {
    case DriftKernel::Kind::Off: return "off";
    case DriftKernel::Kind::Newtonian: return "newtonian";
    case DriftKernel::Kind::CustomSmooth: return "custom";
  }
  return "unknown";
}

void DriftKernel::validate(const GridSpec& grid) const {
  if (kind == Kind::Newtonian && grid.dim() != 2 && grid.dim() != 3) {
    throw Error(ErrorKind::DimensionUnsupported,
                "Newtonian drift needs n = 2 or 3, got n = " + std::to_string(grid.dim()));
  }
  if (kind == Kind::CustomSmooth) {
    if (!kernel) throw Error(ErrorKind::InvalidArgument, "custom drift kernel has no callable");
    if (background && !(background->spec() == grid)) {
      throw Error(ErrorKind::InvalidArgument, "custom drift background lives on another grid");
    }
  }
}

double green_function(int n, double r) {
  if (n == 2) return -std::log(r) / (2.0 * std::numbers::pi);
  return 1.0 / (4.0 * std::numbers::pi * r);
}

double green_self_cell(int n, double h) {
  if (n == 2) return -(std::log(h) + kLogCellMean2) / (2.0 * std::numbers::pi);
  return kInverseCellIntegral3 / (4.0 * std::numbers::pi * h);
}

// --- NewtonianSolver ----------------------------------------------------------

struct NewtonianSolver::Impl {
  GridSpec grid;
  int padded = 0;            // M = 2N points per padded axis
  std::size_t real_count = 0;
  std::size_t complex_count = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  std::vector<std::complex<double>> green_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> extended;  // φ on the box plus one ghost ring, (N+2)^n

  explicit Impl(const GridSpec& g) : grid(g) {
    const int n = g.dim();
    const int N = g.cells_per_axis();
    padded = 2 * N;
    real_count = 1;
    for (int d = 0; d < n; ++d) real_count *= static_cast<std::size_t>(padded);
    complex_count = real_count / padded * (padded / 2 + 1);
    std::vector<int> dims(n, padded);
    {
      std::lock_guard lock(planner_mutex());
      real = fftw_alloc_real(real_count);
      spectrum = fftw_alloc_complex(complex_count);
      forward = fftw_plan_dft_r2c(n, dims.data(), real, spectrum, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r(n, dims.data(), spectrum, real, FFTW_ESTIMATE);
    }

    // Green's function on the periodic padded lattice; offset index k maps to
    // displacement k for k <= N and k - M otherwise (G is even, so ±N agree).
    const double h = g.spacing();
    const double cell = g.cell_volume();
    const double scale = cell / static_cast<double>(real_count);
    for (std::size_t idx = 0; idx < real_count; ++idx) {
      std::size_t rem = idx;
      double r2 = 0.0;
      for (int d = n - 1; d >= 0; --d) {
        const int k = static_cast<int>(rem % padded);
        rem /= padded;
        const int off = k <= N ? k : k - padded;
        r2 += static_cast<double>(off) * off;
      }
      const double gval = r2 == 0.0 ? green_self_cell(n, h) : green_function(n, h * std::sqrt(r2));
      real[idx] = gval * scale;
    }
    fftw_execute(forward);
    green_hat.resize(complex_count);
    for (std::size_t i = 0; i < complex_count; ++i) green_hat[i] = {spectrum[i][0], spectrum[i][1]};

    std::size_t ext = 1;
    for (int d = 0; d < n; ++d) ext *= static_cast<std::size_t>(N + 2);
    extended.assign(ext, 0.0);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (real) fftw_free(real);
    if (spectrum) fftw_free(spectrum);
  }

  Potential solve(const ScalarField& rho) {
    const int n = grid.dim();
    const int N = grid.cells_per_axis();
    const std::size_t M = static_cast<std::size_t>(padded);

    std::fill(real, real + real_count, 0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const Index3 c = grid.coords(i);
      std::size_t p = 0;
      for (int d = 0; d < n; ++d) p = p * M + static_cast<std::size_t>(c[d]);
      real[p] = std::max(rho[i], 0.0);
    }
    fftw_execute(forward);
    for (std::size_t i = 0; i < complex_count; ++i) {
      const std::complex<double> v = std::complex<double>(spectrum[i][0], spectrum[i][1]) * green_hat[i];
      spectrum[i][0] = v.real();
      spectrum[i][1] = v.imag();
    }
    fftw_execute(backward);

    // Gather φ on indices -1..N per axis (negative indices wrap in the padding).
    const std::size_t E = static_cast<std::size_t>(N + 2);
    for (std::size_t e = 0; e < extended.size(); ++e) {
      std::size_t rem = e;
      std::size_t p = 0;
      std::size_t mult = 1;
      for (int d = n - 1; d >= 0; --d) {
        const int k = static_cast<int>(rem % E) - 1;
        rem /= E;
        p += static_cast<std::size_t>((k + padded) % padded) * mult;
        mult *= M;
      }
      extended[e] = real[p];
    }

    Potential out{ScalarField(grid), VectorField(grid)};
    const double inv2h = 1.0 / (2.0 * grid.spacing());
    std::array<std::size_t, 3> estride{1, 1, 1};
    for (int d = n - 2; d >= 0; --d) estride[d] = estride[d + 1] * E;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const Index3 c = grid.coords(i);
      std::size_t e = 0;
      for (int d = 0; d < n; ++d) e += static_cast<std::size_t>(c[d] + 1) * estride[d];
      out.phi[i] = extended[e];
      for (int d = 0; d < n; ++d) {
        out.grad_phi[d][i] = (extended[e + estride[d]] - extended[e - estride[d]]) * inv2h;
      }
    }
    return out;
  }
};

NewtonianSolver::NewtonianSolver(const GridSpec& grid) {
  DriftKernel::newtonian().validate(grid);
  impl_ = std::make_unique<Impl>(grid);
}

NewtonianSolver::~NewtonianSolver() = default;
NewtonianSolver::NewtonianSolver(NewtonianSolver&&) noexcept = default;
NewtonianSolver& NewtonianSolver::operator=(NewtonianSolver&&) noexcept = default;

const GridSpec& NewtonianSolver::grid() const noexcept { return impl_->grid; }

Potential NewtonianSolver::solve(const ScalarField& rho) {
  if (!(rho.spec() == impl_->grid)) throw Error(ErrorKind::InvalidArgument, "density lives on another grid");
  check_density(rho);
  require_finite(rho, "density");
  return impl_->solve(rho);
}

Potential solve_newtonian(const ScalarField& rho) {
  NewtonianSolver solver(rho.spec());
  return solver.solve(rho);
}

// --- drift ----------------------------------------------------------------------

namespace {

VectorField custom_drift(const ScalarField& rho, const DriftKernel& kernel) {
  const GridSpec& g = rho.spec();
  VectorField out = kernel.background ? *kernel.background : VectorField(g);
  const double cell = g.cell_volume();
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (rho[j] != 0.0) support.push_back(j);
  }
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const Point x = g.position(i);
    for (std::size_t j : support) {
      const Point k = kernel.kernel(x, g.position(j));
      for (int d = 0; d < g.dim(); ++d) {
        if (!std::isfinite(k[d])) {
          throw Error(ErrorKind::KernelUnbounded, "kernel is not finite between cells " + std::to_string(i) +
                                                      " and " + std::to_string(j));
        }
        out[d][i] += k[d] * rho[j] * cell;
      }
    }
  }
  return out;
}

}  // namespace

DriftOperator::DriftOperator(const GridSpec& grid, DriftKernel kernel) : grid_(grid), kernel_(std::move(kernel)) {
  kernel_.validate(grid_);
  if (kernel_.kind == DriftKernel::Kind::Newtonian) newtonian_.emplace(grid_);
}

Potential DriftOperator::evaluate(const ScalarField& rho) {
  switch (kernel_.kind) {
    case DriftKernel::Kind::Newtonian:
      return newtonian_->solve(rho);
    case DriftKernel::Kind::CustomSmooth:
      check_density(rho);
      return {ScalarField(grid_), custom_drift(rho, kernel_)};
    case DriftKernel::Kind::Off:
      break;
  }
  check_density(rho);
  return {ScalarField(grid_), VectorField(grid_)};
}

VectorField drift_field(const ScalarField& rho, const DriftKernel& kernel) {
  DriftOperator op(rho.spec(), kernel);
  return op.evaluate(rho).grad_phi;
}

}  // namespace pmelimit
