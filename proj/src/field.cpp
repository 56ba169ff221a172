#include "vpac/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vpac {

namespace {

// Visits the nodes of the grid as contiguous runs together with their +1 and
// -1 neighbours along `axis`: op(center, plus, minus, len) covers the flat
// indices center+k, plus+k, minus+k for k < len.
template <typename Op>
void for_each_axis_run(const Grid& g, int axis, Op&& op) {
  const std::size_t n = g.n();
  const std::size_t s = g.stride(axis);
  const std::size_t block = n * s;
  const std::size_t outer = g.size() / block;
  if (s == 1) {
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t row = o * n;
      op(row, row + 1, row + n - 1, std::size_t{1});
      op(row + 1, row + 2, row, n - 2);
      op(row + n - 1, row, row + n - 2, std::size_t{1});
    }
    return;
  }
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t base = o * block + c * s;
      const std::size_t plus = o * block + ((c + 1) % n) * s;
      const std::size_t minus = o * block + ((c + n - 1) % n) * s;
      op(base, plus, minus, s);
    }
  }
}

}  // namespace

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (n < 8) throw std::invalid_argument("grid needs at least 8 points per axis");
  h_ = 1.0 / n;
  if (h_ * n != 1.0) {
    throw std::invalid_argument("grid spacing 1/" + std::to_string(n) +
                                " does not satisfy h*n == 1 in double precision");
  }
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
  cell_volume_ = std::pow(h_, dim);
  std::size_t s = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(n);
  }
}

std::array<int, 3> Grid::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<int>((flat / strides_[a]) % static_cast<std::size_t>(n_));
  }
  return idx;
}

std::size_t Grid::flat_index(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat += static_cast<std::size_t>(wrap(idx[a])) * strides_[a];
  return flat;
}

Point Grid::coords(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = idx[a] * h_;
  return x;
}

ScalarField::ScalarField(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                " values, grid expects " + std::to_string(grid_.size()));
  }
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

VectorField::VectorField(const Grid& grid) : components_(grid.dim(), ScalarField(grid)) {}

bool VectorField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ScalarField& c) { return c.all_finite(); });
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid());
  laplacian_into(f, out);
  return out;
}

void laplacian_into(const ScalarField& f, ScalarField& out) {
  for_each_laplacian_row(f, [&](std::size_t row, const double* lap, std::size_t len) {
    std::copy(lap, lap + len, out.data() + row);
  });
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const double* in = f.data();
  const double inv_2h = 0.5 / g.h();
  for (int a = 0; a < g.dim(); ++a) {
    double* dst = out[a].data();
    for_each_axis_run(g, a, [&](std::size_t c, std::size_t p, std::size_t m, std::size_t len) {
      for (std::size_t k = 0; k < len; ++k) dst[c + k] = (in[p + k] - in[m + k]) * inv_2h;
    });
  }
  return out;
}

ScalarField forward_gradient_sq(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const double* in = f.data();
  double* acc = out.data();
  const double inv_h = 1.0 / g.h();
  for (int a = 0; a < g.dim(); ++a) {
    for_each_axis_run(g, a, [&](std::size_t c, std::size_t p, std::size_t, std::size_t len) {
      for (std::size_t k = 0; k < len; ++k) {
        const double d = (in[p + k] - in[c + k]) * inv_h;
        acc[c + k] += d * d;
      }
    });
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  double* acc = out.data();
  const double inv_2h = 0.5 / g.h();
  for (int a = 0; a < g.dim(); ++a) {
    const double* in = v[a].data();
    for_each_axis_run(g, a, [&](std::size_t c, std::size_t p, std::size_t m, std::size_t len) {
      for (std::size_t k = 0; k < len; ++k) acc[c + k] += (in[p + k] - in[m + k]) * inv_2h;
    });
  }
  return out;
}

double detail::fixed_point_value(__int128 units, int exponent) {
  return std::ldexp(static_cast<double>(units), exponent);
}

double integrate(const Grid& grid, std::span<const double> values) {
  return reproducible_sum(values) * grid.cell_volume();
}

double integrate(const ScalarField& f) { return integrate(f.grid(), f.values()); }

ScalarField shift(const ScalarField& f, const std::array<int, 3>& offset) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.multi_index(i);
    for (int a = 0; a < g.dim(); ++a) idx[a] += offset[a];
    out[g.flat_index(idx)] = f[i];
  }
  return out;
}

Point periodic_delta(const Point& x, const Point& y, int dim) {
  Point d{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    double v = y[a] - x[a];
    v -= std::floor(v + 0.5);
    d[a] = v;
  }
  return d;
}

double periodic_distance(const Point& x, const Point& y, int dim) {
  const Point d = periodic_delta(x, y, dim);
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += d[a] * d[a];
  return std::sqrt(s);
}

}  // namespace vpac
