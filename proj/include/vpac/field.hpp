#pragma once

// Uniform periodic grids over the unit flat torus and the finite-difference
// operators used by the solver. Values are stored row-major with axis order
// (x1, ..., xd): the last axis is contiguous.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace vpac {

/// A point of the torus; coordinates beyond the grid dimension are ignored.
using Point = std::array<double, 3>;

class Grid {
 public:
  /// Throws std::invalid_argument unless dim in {1,2,3} and n >= 8.
  Grid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return size_; }
  /// h^d, the quadrature weight of one node.
  double cell_volume() const { return cell_volume_; }
  /// Distance between consecutive entries along `axis` in the flat array.
  std::size_t stride(int axis) const { return strides_[axis]; }

  std::array<int, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<int, 3>& idx) const;
  /// Node coordinates x = i * h; unused axes are zero.
  Point coords(std::size_t flat) const;
  int wrap(int i) const { return ((i % n_) + n_) % n_; }

  bool operator==(const Grid& other) const { return dim_ == other.dim_ && n_ == other.n_; }

 private:
  int dim_;
  int n_;
  double h_;
  std::size_t size_;
  double cell_volume_;
  std::array<std::size_t, 3> strides_{};
};

class ScalarField {
 public:
  explicit ScalarField(Grid grid, double fill = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }

  bool all_finite() const;
  double max_abs() const;

  bool operator==(const ScalarField& other) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class VectorField {
 public:
  explicit VectorField(const Grid& grid);

  const Grid& grid() const { return components_.front().grid(); }
  int dim() const { return static_cast<int>(components_.size()); }
  const ScalarField& operator[](int axis) const { return components_[axis]; }
  ScalarField& operator[](int axis) { return components_[axis]; }

  bool all_finite() const;

 private:
  std::vector<ScalarField> components_;
};

/// Sample a function of position at every node.
template <typename F>
ScalarField sample(const Grid& grid, F&& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.coords(i));
  return out;
}

/// Apply a scalar function pointwise.
template <typename F>
ScalarField map(const ScalarField& in, F&& f) {
  ScalarField out(in.grid());
  const double* src = in.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = f(src[i]);
  return out;
}

/// Centered (2d+1)-point Laplacian with periodic wrap.
ScalarField laplacian(const ScalarField& f);
/// laplacian() into an existing field on the same grid (overwritten).
void laplacian_into(const ScalarField& f, ScalarField& out);

/// Streams the Laplacian one contiguous row (last axis) at a time:
/// op(row_start, lap, n) where lap[k] is the Laplacian at flat index row_start + k.
/// The buffer is reused between calls.
namespace detail {

// Laplacian of one row given the 2(D-1) neighbouring rows along the other axes.
template <int D>
void laplacian_row(const double* x, const double* const* up, const double* const* dn, std::size_t n,
                   double inv_h2, double* lap) {
  constexpr double centre = 2.0 * D;
  auto cross = [&](std::size_t k) {
    double acc = 0.0;
    for (int a = 0; a < D - 1; ++a) acc += up[a][k] + dn[a][k];
    return acc;
  };
  lap[0] = (cross(0) + (x[1] + x[n - 1]) - centre * x[0]) * inv_h2;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    lap[k] = (cross(k) + (x[k + 1] + x[k - 1]) - centre * x[k]) * inv_h2;
  }
  lap[n - 1] = (cross(n - 1) + (x[0] + x[n - 2]) - centre * x[n - 1]) * inv_h2;
}

// Start of the rows adjacent (+1 and -1) to the row at `row` along every axis
// except the last.
inline void row_neighbours(const Grid& g, const double* in, std::size_t row, const double** up,
                           const double** dn) {
  const std::size_t n = static_cast<std::size_t>(g.n());
  for (int a = 0; a < g.dim() - 1; ++a) {
    const std::size_t s = g.stride(a);
    const std::size_t c = (row / s) % n;
    up[a] = in + row + ((c + 1) % n) * s - c * s;
    dn[a] = in + row + ((c + n - 1) % n) * s - c * s;
  }
}

}  // namespace detail

/// Streams the Laplacian one contiguous row (last axis) at a time:
/// op(row_start, lap, n) where lap[k] is the Laplacian at flat index row_start + k.
/// The buffer is reused between calls.
template <typename Op>
void for_each_laplacian_row(const ScalarField& f, Op&& op) {
  const Grid& g = f.grid();
  const int d = g.dim();
  const std::size_t n = static_cast<std::size_t>(g.n());
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double* in = f.data();
  std::vector<double> lap(n);
  const std::size_t rows = g.size() / n;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t row = r * n;
    const double* up[2] = {nullptr, nullptr};
    const double* dn[2] = {nullptr, nullptr};
    detail::row_neighbours(g, in, row, up, dn);
    switch (d) {
      case 1:
        detail::laplacian_row<1>(in + row, up, dn, n, inv_h2, lap.data());
        break;
      case 2:
        detail::laplacian_row<2>(in + row, up, dn, n, inv_h2, lap.data());
        break;
      default:
        detail::laplacian_row<3>(in + row, up, dn, n, inv_h2, lap.data());
        break;
    }
    op(row, static_cast<const double*>(lap.data()), n);
  }
}

/// Centered differences (f[i+1] - f[i-1]) / 2h along every axis.
VectorField gradient(const ScalarField& f);

/// Sum over axes of the squared one-sided differences ((f[i+1] - f[i]) / h)^2.
/// This is the gradient energy density whose variational derivative is the
/// compact Laplacian above.
ScalarField forward_gradient_sq(const ScalarField& f);

/// Centered-difference divergence.
ScalarField divergence(const VectorField& v);

/// Sum of f(values[i]) in a fixed order: four interleaved partial sums
/// (i mod 4) combined as (s0 + s1) + (s2 + s3). Deterministic, but the result
/// depends on where each term sits.
template <typename F>
double lane_sum(std::span<const double> values, F&& f) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = values.size();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    s[0] += f(values[i]);
    s[1] += f(values[i + 1]);
    s[2] += f(values[i + 2]);
    s[3] += f(values[i + 3]);
  }
  for (std::size_t i = body; i < n; ++i) s[i % 4] += f(values[i]);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

namespace detail {

/// Sum of round(x * scale * 2^76) over the terms, in units of 2^-76, or
/// nothing if some |x * scale| >= 2^24 (or is not finite). Each scaled term is
/// split into an integer and two 38-bit fractional digits with the
/// 1.5 * 2^52 rounding trick; the digits are summed in integers.
template <typename F>
std::optional<__int128> fixed_point_units(std::span<const double> values, F& f, double scale) {
  constexpr double kMagic = 6755399441055744.0;  // 1.5 * 2^52
  constexpr double kDigit = 274877906944.0;      // 2^38
  constexpr std::int64_t kRange = std::int64_t{1} << 24;
  const std::int64_t magic_bits = std::bit_cast<std::int64_t>(kMagic);
  constexpr std::size_t kBlock = std::size_t{1} << 24;  // 64-bit digit sums cannot overflow
  __int128 total = 0;
  for (std::size_t b = 0; b < values.size(); b += kBlock) {
    const std::size_t e = std::min(values.size(), b + kBlock);
    std::int64_t hi = 0, mid = 0, lo = 0;
    std::uint64_t out_of_range = 0;
    for (std::size_t i = b; i < e; ++i) {
      const double x = f(values[i]) * scale;
      const double th = x + kMagic;
      const double r1 = (x - (th - kMagic)) * kDigit;
      const double tm = r1 + kMagic;
      const double r2 = (r1 - (tm - kMagic)) * kDigit;
      const double tl = r2 + kMagic;
      const std::int64_t ih = std::bit_cast<std::int64_t>(th) - magic_bits;
      out_of_range |= static_cast<std::uint64_t>(ih + kRange) >> 25;
      hi += ih;
      mid += std::bit_cast<std::int64_t>(tm) - magic_bits;
      lo += std::bit_cast<std::int64_t>(tl) - magic_bits;
    }
    if (out_of_range) return std::nullopt;
    total += ((static_cast<__int128>(hi) << 38) + mid) * (std::int64_t{1} << 38) + lo;
  }
  return total;
}

/// units * 2^exponent, rounded once.
double fixed_point_value(__int128 units, int exponent);

}  // namespace detail

/// Sum of f(values[i]) that does not depend on the order of the terms, so
/// cyclic shifts and any other permutation give bit-identical results. Terms
/// are rounded to multiples of 2^-76 and added exactly; the total is rounded
/// once. Fields with a term of magnitude 2^24 or more are first scaled by a
/// power of two chosen from the largest term. A non-finite term makes the
/// result non-finite.
template <typename F>
double reproducible_sum(std::span<const double> values, F&& f) {
  constexpr std::size_t kDirectLimit = std::size_t{1} << 26;
  if (values.size() <= kDirectLimit) {
    if (const auto units = detail::fixed_point_units(values, f, 1.0)) return detail::fixed_point_value(*units, -76);
  }
  double peak = 0.0, plain = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = f(values[i]);
    plain += v;
    finite &= std::isfinite(v);
    peak = std::max(peak, std::abs(v));
  }
  if (!finite) return plain;
  if (peak == 0.0) return 0.0;
  const int spare = std::max(0, static_cast<int>(std::bit_width(values.size())) - 26);
  const int shift = std::min(23 - std::ilogb(peak) - spare, 1000);
  const auto units = detail::fixed_point_units(values, f, std::ldexp(1.0, shift));
  return detail::fixed_point_value(*units, -76 - shift);
}

inline double reproducible_sum(std::span<const double> values) {
  return reproducible_sum(values, [](double v) { return v; });
}

/// Midpoint quadrature h^d * sum(values), summed with reproducible_sum.
double integrate(const ScalarField& f);
double integrate(const Grid& grid, std::span<const double> values);

/// Cyclic shift by `offset` nodes per axis (positive moves values forward).
ScalarField shift(const ScalarField& f, const std::array<int, 3>& offset);

/// Shortest periodic displacement y - x, each component in [-1/2, 1/2).
Point periodic_delta(const Point& x, const Point& y, int dim);
double periodic_distance(const Point& x, const Point& y, int dim);

}  // namespace vpac
