#pragma once

// Uniform cell-centered grids on [-L, L]^n and the discrete operators the
// solver and the diagnostics are built on.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pmelimit {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Uniform Cartesian grid of N^n cells covering [-L, L]^n, n in {1, 2, 3}.
///
/// The spacing is always derived as 2L/N so that h*N == 2L holds by
/// construction. Cell i along an axis is centered at -L + (i + 1/2) h.
class GridSpec {
 public:
  /// Validates and builds a spec. Throws Error(InvalidArgument) for n outside
  /// {1,2,3}, N < 4 or a non-positive / non-finite half-width.
  static GridSpec make(int n, double half_width, int cells_per_axis);

  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] double half_width() const noexcept { return L_; }
  [[nodiscard]] int cells_per_axis() const noexcept { return N_; }
  [[nodiscard]] double spacing() const noexcept { return 2.0 * L_ / N_; }
  [[nodiscard]] double cell_volume() const noexcept;
  [[nodiscard]] std::size_t cell_count() const noexcept { return count_; }
  [[nodiscard]] std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  [[nodiscard]] double center(int i) const noexcept { return -L_ + (i + 0.5) * spacing(); }
  [[nodiscard]] Index3 coords(std::size_t idx) const noexcept;
  [[nodiscard]] std::size_t index(const Index3& c) const noexcept;
  [[nodiscard]] Point position(std::size_t idx) const noexcept;

  /// Same grid with twice the cells per axis.
  [[nodiscard]] GridSpec refined() const { return make(n_, L_, 2 * N_); }

  /// True when the cell lies within `layers` cells of the box edge.
  [[nodiscard]] bool in_boundary_layer(std::size_t idx, int layers) const noexcept;

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.n_ == b.n_ && a.N_ == b.N_ && a.L_ == b.L_;
  }

 private:
  GridSpec(int n, double L, int N);

  int n_ = 1;
  double L_ = 1.0;
  int N_ = 4;
  std::size_t count_ = 4;
  std::array<std::size_t, 3> strides_{1, 1, 1};
};

/// Cell-centered samples, row-major (axis 0 slowest).
class ScalarField {
 public:
  explicit ScalarField(const GridSpec& spec);
  /// Throws Error(InvalidArgument) on a length mismatch, Error(NonFiniteField)
  /// on NaN/Inf entries.
  ScalarField(const GridSpec& spec, std::vector<double> values);

  static ScalarField sample(const GridSpec& spec, const std::function<double(const Point&)>& fn);
  static ScalarField constant(const GridSpec& spec, double value);

  [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return values_; }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  [[nodiscard]] double max() const noexcept;
  [[nodiscard]] double min() const noexcept;
  [[nodiscard]] bool all_finite() const noexcept;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// n cell-centered components sharing one grid.
class VectorField {
 public:
  explicit VectorField(const GridSpec& spec);
  /// Throws Error(InvalidArgument) unless there are exactly n components on `spec`.
  VectorField(const GridSpec& spec, std::vector<ScalarField> components);

  [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] int dim() const noexcept { return spec_.dim(); }
  [[nodiscard]] const ScalarField& operator[](int axis) const noexcept { return comps_[axis]; }
  [[nodiscard]] ScalarField& operator[](int axis) noexcept { return comps_[axis]; }

  /// Pointwise Euclidean norm.
  [[nodiscard]] ScalarField magnitude() const;
  [[nodiscard]] double max_magnitude() const noexcept;

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  GridSpec spec_;
  std::vector<ScalarField> comps_;
};

/// Values living on the faces normal to each axis: per axis, N+1 faces along
/// every grid line (outer faces included), laid out like the cells with the
/// face coordinate in place of the cell coordinate.
struct FaceField {
  GridSpec spec;
  std::vector<std::vector<double>> normal;  // one array per axis
};

// Calls fn(start, stride) once per grid line along `axis`. The cells of the
// line are start + k*stride for k = 0..N-1.
template <class Fn>
void for_each_line(const GridSpec& spec, int axis, Fn&& fn) {
  const std::size_t N = static_cast<std::size_t>(spec.cells_per_axis());
  const std::size_t s = spec.stride(axis);
  const std::size_t outer = spec.cell_count() / (N * s);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < s; ++in) {
      fn(o * N * s + in, s);
    }
  }
}

/// Centered differences; neighbours outside the box read as zero.
VectorField gradient(const ScalarField& f);

/// Centered flux-form divergence with zero extension, the exact negative
/// adjoint of gradient() under the hⁿ-weighted sum.
ScalarField divergence(const VectorField& v);

/// Compact 3/5/7-point Laplacian with zero extension. Equals
/// face_divergence(face_gradient(f)) bit for bit.
ScalarField laplacian(const ScalarField& f);

/// (f[i+1] - f[i]) / h on every face; outside values read as zero.
FaceField face_gradient(const ScalarField& f);

/// Cell-wise sum over axes of (F[i+1/2] - F[i-1/2]) / h.
ScalarField face_divergence(const FaceField& faces);

/// Cell density of the discrete Dirichlet energy: ½ Σ_d [(D⁺f)² + (D⁻f)²]
/// with zero extension. Its integral equals -integrate(f * laplacian(f))
/// whenever f vanishes on the outermost cell layer.
ScalarField gradient_energy_density(const ScalarField& f);

/// Midpoint rule: hⁿ Σ f.
double integrate(const ScalarField& f);

/// Pointwise helpers that keep the grid.
ScalarField map(const ScalarField& f, const std::function<double(double)>& fn);
ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField axpy(double a, const ScalarField& x, const ScalarField& y);  // a*x + y
ScalarField dot(const VectorField& a, const VectorField& b);

/// Average of the rⁿ children of each coarse cell; the fine resolution must
/// be an integer multiple r of the coarse one.
ScalarField restrict_to(const ScalarField& fine, const GridSpec& coarse);

/// hⁿ Σ |a - b| and sqrt(hⁿ Σ (a-b)²) on a shared grid.
double l1_distance(const ScalarField& a, const ScalarField& b);
double l2_distance(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& f);

/// Throws Error(NonFiniteField) naming `what` if any entry is NaN/Inf.
void require_finite(const ScalarField& f, const std::string& what);

// ---------------------------------------------------------------------------
// Snapshot binary format: little-endian, "PMEF", u32 version (1), u32 n,
// u32 N, f64 L, f64 t, f64 m, then Nⁿ f64 values row-major.

struct Snapshot {
  ScalarField field;
  double time = 0.0;
  double exponent = 0.0;  // 0 for fields not tied to a particular m
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap);
/// Throws Error(FormatMismatch) on bad magic, version, or length.
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

/// Throws Error(IoFailure) with the path on any filesystem error.
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

}  // namespace pmelimit
