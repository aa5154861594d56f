#include "pmelimit/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pmelimit/error.hpp"

namespace pmelimit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::KernelUnbounded: return "KernelUnbounded";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::SupportTouchesBoundary: return "SupportTouchesBoundary";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::FormatMismatch: return "FormatMismatch";
  }
  return "Unknown";
}

// --- GridSpec ---------------------------------------------------------------

GridSpec GridSpec::make(int n, double half_width, int cells_per_axis) {
  if (n < 1 || n > 3) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3, got " + std::to_string(n));
  }
  if (cells_per_axis < 4) {
    throw Error(ErrorKind::InvalidArgument, "need at least 4 cells per axis, got " + std::to_string(cells_per_axis));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorKind::InvalidArgument, "box half-width must be positive and finite");
  }
  return GridSpec(n, half_width, cells_per_axis);
}

GridSpec::GridSpec(int n, double L, int N) : n_(n), L_(L), N_(N) {
  count_ = 1;
  for (int d = 0; d < n_; ++d) count_ *= static_cast<std::size_t>(N_);
  std::size_t s = 1;
  for (int d = n_ - 1; d >= 0; --d) {
    strides_[d] = s;
    s *= static_cast<std::size_t>(N_);
  }
}

double GridSpec::cell_volume() const noexcept {
  const double h = spacing();
  double v = 1.0;
  for (int d = 0; d < n_; ++d) v *= h;
  return v;
}

Index3 GridSpec::coords(std::size_t idx) const noexcept {
  Index3 c{0, 0, 0};
  for (int d = 0; d < n_; ++d) {
    c[d] = static_cast<int>((idx / strides_[d]) % static_cast<std::size_t>(N_));
  }
  return c;
}

std::size_t GridSpec::index(const Index3& c) const noexcept {
  std::size_t idx = 0;
  for (int d = 0; d < n_; ++d) idx += static_cast<std::size_t>(c[d]) * strides_[d];
  return idx;
}

Point GridSpec::position(std::size_t idx) const noexcept {
  const Index3 c = coords(idx);
  Point x{0.0, 0.0, 0.0};
  for (int d = 0; d < n_; ++d) x[d] = center(c[d]);
  return x;
}

bool GridSpec::in_boundary_layer(std::size_t idx, int layers) const noexcept {
  const Index3 c = coords(idx);
  for (int d = 0; d < n_; ++d) {
    if (c[d] < layers || c[d] >= N_ - layers) return true;
  }
  return false;
}

// --- fields -----------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& spec) : spec_(spec), values_(spec.cell_count(), 0.0) {}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cell_count()) {
    throw Error(ErrorKind::InvalidArgument, "field has " + std::to_string(values_.size()) +
                                                " values, grid has " + std::to_string(spec_.cell_count()) + " cells");
  }
  require_finite(*this, "field construction");
}

ScalarField ScalarField::sample(const GridSpec& spec, const std::function<double(const Point&)>& fn) {
  ScalarField f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(spec.position(i));
  require_finite(f, "sampled field");
  return f;
}

ScalarField ScalarField::constant(const GridSpec& spec, double value) {
  return ScalarField(spec, std::vector<double>(spec.cell_count(), value));
}

double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

VectorField::VectorField(const GridSpec& spec) : spec_(spec), comps_(spec.dim(), ScalarField(spec)) {}

VectorField::VectorField(const GridSpec& spec, std::vector<ScalarField> components)
    : spec_(spec), comps_(std::move(components)) {
  if (static_cast<int>(comps_.size()) != spec_.dim()) {
    throw Error(ErrorKind::InvalidArgument, "vector field needs one component per dimension");
  }
  for (const auto& c : comps_) {
    if (!(c.spec() == spec_)) throw Error(ErrorKind::InvalidArgument, "vector components must share one grid");
  }
}

ScalarField VectorField::magnitude() const {
  ScalarField out(spec_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (const auto& c : comps_) s += c[i] * c[i];
    out[i] = std::sqrt(s);
  }
  return out;
}

double VectorField::max_magnitude() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < spec_.cell_count(); ++i) {
    double s = 0.0;
    for (const auto& c : comps_) s += c[i] * c[i];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

// --- operators --------------------------------------------------------------

VectorField gradient(const ScalarField& f) {
  const GridSpec& g = f.spec();
  const int N = g.cells_per_axis();
  const double inv2h = 1.0 / (2.0 * g.spacing());
  VectorField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    auto& gd = out[d];
    for_each_line(g, d, [&](std::size_t start, std::size_t s) {
      for (int k = 0; k < N; ++k) {
        const std::size_t c = start + k * s;
        const double lo = k > 0 ? f[c - s] : 0.0;
        const double hi = k < N - 1 ? f[c + s] : 0.0;
        gd[c] = (hi - lo) * inv2h;
      }
    });
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const GridSpec& g = v.spec();
  const int N = g.cells_per_axis();
  const double inv2h = 1.0 / (2.0 * g.spacing());
  ScalarField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    const auto& vd = v[d];
    for_each_line(g, d, [&](std::size_t start, std::size_t s) {
      for (int k = 0; k < N; ++k) {
        const std::size_t c = start + k * s;
        const double lo = k > 0 ? vd[c - s] : 0.0;
        const double hi = k < N - 1 ? vd[c + s] : 0.0;
        out[c] += (hi - lo) * inv2h;
      }
    });
  }
  return out;
}

FaceField face_gradient(const ScalarField& f) {
  const GridSpec& g = f.spec();
  const int N = g.cells_per_axis();
  const double invh = 1.0 / g.spacing();
  FaceField faces{g, {}};
  faces.normal.resize(g.dim());
  for (int d = 0; d < g.dim(); ++d) {
    // Lines along d carry N+1 faces; everything else keeps the cell layout.
    const std::size_t s = g.stride(d);
    auto& fd = faces.normal[d];
    fd.assign(g.cell_count() / N * (N + 1), 0.0);
    for_each_line(g, d, [&](std::size_t start, std::size_t) {
      const std::size_t outer = start / (N * s);
      const std::size_t inner = start % s;
      const std::size_t fstart = outer * (N + 1) * s + inner;
      for (int k = 0; k <= N; ++k) {
        const double lo = k > 0 ? f[start + (k - 1) * s] : 0.0;
        const double hi = k < N ? f[start + k * s] : 0.0;
        fd[fstart + k * s] = (hi - lo) * invh;
      }
    });
  }
  return faces;
}

ScalarField face_divergence(const FaceField& faces) {
  const GridSpec& g = faces.spec;
  const int N = g.cells_per_axis();
  const double invh = 1.0 / g.spacing();
  ScalarField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    const std::size_t s = g.stride(d);
    const auto& fd = faces.normal[d];
    for_each_line(g, d, [&](std::size_t start, std::size_t) {
      const std::size_t outer = start / (N * s);
      const std::size_t inner = start % s;
      const std::size_t fstart = outer * (N + 1) * s + inner;
      for (int k = 0; k < N; ++k) {
        out[start + k * s] += (fd[fstart + (k + 1) * s] - fd[fstart + k * s]) * invh;
      }
    });
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) { return face_divergence(face_gradient(f)); }

ScalarField gradient_energy_density(const ScalarField& f) {
  const GridSpec& g = f.spec();
  const int N = g.cells_per_axis();
  const double invh = 1.0 / g.spacing();
  ScalarField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    for_each_line(g, d, [&](std::size_t start, std::size_t s) {
      for (int k = 0; k < N; ++k) {
        const std::size_t c = start + k * s;
        const double lo = k > 0 ? f[c - s] : 0.0;
        const double hi = k < N - 1 ? f[c + s] : 0.0;
        const double up = (hi - f[c]) * invh;
        const double down = (f[c] - lo) * invh;
        out[c] += 0.5 * (up * up + down * down);
      }
    });
  }
  return out;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.spec().cell_volume();
}

ScalarField map(const ScalarField& f, const std::function<double(double)>& fn) {
  ScalarField out(f.spec());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

namespace {
void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error(ErrorKind::InvalidArgument, "fields live on different grids");
}
}  // namespace

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.spec(), b.spec());
  ScalarField out(a.spec());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField axpy(double a, const ScalarField& x, const ScalarField& y) {
  require_same_grid(x.spec(), y.spec());
  ScalarField out(x.spec());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
  return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.spec(), b.spec());
  ScalarField out(a.spec());
  for (int d = 0; d < a.dim(); ++d) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[d][i] * b[d][i];
  }
  return out;
}

ScalarField restrict_to(const ScalarField& fine, const GridSpec& coarse) {
  const GridSpec& g = fine.spec();
  const int ratio = coarse.cells_per_axis() > 0 ? g.cells_per_axis() / coarse.cells_per_axis() : 0;
  if (g.dim() != coarse.dim() || g.half_width() != coarse.half_width() || ratio < 1 ||
      ratio * coarse.cells_per_axis() != g.cells_per_axis()) {
    throw Error(ErrorKind::InvalidArgument, "restriction needs a fine grid whose resolution is a multiple of the coarse one");
  }
  ScalarField out(coarse);
  double w = 1.0;
  for (int d = 0; d < g.dim(); ++d) w /= ratio;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    Index3 c = g.coords(i);
    for (int d = 0; d < g.dim(); ++d) c[d] /= ratio;
    out[coarse.index(c)] += w * fine[i];
  }
  return out;
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.spec(), b.spec());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * a.spec().cell_volume();
}

double l2_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.spec(), b.spec());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * a.spec().cell_volume());
}

double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.spec().cell_volume());
}

void require_finite(const ScalarField& f, const std::string& what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw Error(ErrorKind::NonFiniteField, what + ": non-finite value at cell " + std::to_string(i));
    }
  }
}

// --- snapshots --------------------------------------------------------------

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'M', 'E', 'F'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 3 + 8 * 3;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

double get_f64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[at + b]) << (8 * b);
  return std::bit_cast<double>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap) {
  const GridSpec& g = snap.field.spec();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * g.cell_count());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  put_u32(out, static_cast<std::uint32_t>(g.cells_per_axis()));
  put_f64(out, g.half_width());
  put_f64(out, snap.time);
  put_f64(out, snap.exponent);
  for (double v : snap.field.values()) put_f64(out, v);
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorKind::FormatMismatch, "not a PMEF snapshot");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kSnapshotVersion) {
    throw Error(ErrorKind::FormatMismatch, "unsupported snapshot version " + std::to_string(version));
  }
  const auto n = static_cast<int>(get_u32(bytes, 8));
  const auto N = static_cast<int>(get_u32(bytes, 12));
  const double L = get_f64(bytes, 16);
  const double t = get_f64(bytes, 24);
  const double m = get_f64(bytes, 32);
  const GridSpec g = GridSpec::make(n, L, N);
  if (bytes.size() != kHeaderBytes + 8 * g.cell_count()) {
    throw Error(ErrorKind::FormatMismatch, "snapshot payload length does not match its header");
  }
  std::vector<double> values(g.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f64(bytes, kHeaderBytes + 8 * i);
  return Snapshot{ScalarField(g, std::move(values)), t, m};
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const auto bytes = encode_snapshot(snap);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorKind::IoFailure, "write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace pmelimit
