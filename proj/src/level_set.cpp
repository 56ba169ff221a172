#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "vpac/diagnostics.hpp"
#include "vpac/errors.hpp"

namespace vpac {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 lerp_zero(const Vec3& a, const Vec3& b, double fa, double fb) {
  const double t = fa / (fa - fb);
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
}

double length(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 x{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return 0.5 * std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

bool changes_sign(const ScalarField& phi) {
  bool pos = false, neg = false;
  for (double v : phi.values()) {
    pos = pos || v > 0.0;
    neg = neg || v <= 0.0;
  }
  return pos && neg;
}

// Marching squares on each periodic cell; saddles are resolved with the
// cell-average value.
double perimeter_2d(const ScalarField& phi) {
  const Grid& g = phi.grid();
  const int n = g.n();
  const double h = g.h();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::array<Vec3, 4> corner = {Vec3{0, 0, 0}, Vec3{h, 0, 0}, Vec3{h, h, 0}, Vec3{0, h, 0}};
      const std::array<double, 4> f = {phi[g.flat_index({i, j, 0})], phi[g.flat_index({i + 1, j, 0})],
                                       phi[g.flat_index({i + 1, j + 1, 0})], phi[g.flat_index({i, j + 1, 0})]};
      std::array<Vec3, 4> cross{};
      std::array<bool, 4> hit{};
      int count = 0;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if ((f[a] > 0.0) != (f[b] > 0.0)) {
          cross[e] = lerp_zero(corner[a], corner[b], f[a], f[b]);
          hit[e] = true;
          ++count;
        }
      }
      if (count == 2) {
        int first = -1, second = -1;
        for (int e = 0; e < 4; ++e) {
          if (!hit[e]) continue;
          (first < 0 ? first : second) = e;
        }
        total += length(cross[first], cross[second]);
      } else if (count == 4) {
        const double centre = 0.25 * (f[0] + f[1] + f[2] + f[3]);
        if ((centre > 0.0) == (f[0] > 0.0)) {
          // corners 1 and 3 are isolated
          total += length(cross[0], cross[1]) + length(cross[2], cross[3]);
        } else {
          total += length(cross[3], cross[0]) + length(cross[1], cross[2]);
        }
      }
    }
  }
  return total;
}

// Marching tetrahedra: each cube is split into six tetrahedra sharing the
// (0,0,0)-(1,1,1) diagonal.
double area_3d(const ScalarField& phi) {
  const Grid& g = phi.grid();
  const int n = g.n();
  const double h = g.h();
  static constexpr std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (const auto& perm : perms) {
          std::array<std::array<int, 3>, 4> off{};
          for (int v = 1; v < 4; ++v) {
            off[v] = off[v - 1];
            off[v][perm[v - 1]] = 1;
          }
          std::array<Vec3, 4> p{};
          std::array<double, 4> f{};
          for (int v = 0; v < 4; ++v) {
            p[v] = {off[v][0] * h, off[v][1] * h, off[v][2] * h};
            f[v] = phi[g.flat_index({i + off[v][0], j + off[v][1], k + off[v][2]})];
          }
          std::array<int, 4> pos{}, neg{};
          int np = 0, nn = 0;
          for (int v = 0; v < 4; ++v) {
            if (f[v] > 0.0) {
              pos[np++] = v;
            } else {
              neg[nn++] = v;
            }
          }
          if (np == 0 || nn == 0) continue;
          if (np == 1 || nn == 1) {
            const bool lone_pos = np == 1;
            const int lone = lone_pos ? pos[0] : neg[0];
            const auto& others = lone_pos ? neg : pos;
            const Vec3 a = lerp_zero(p[lone], p[others[0]], f[lone], f[others[0]]);
            const Vec3 b = lerp_zero(p[lone], p[others[1]], f[lone], f[others[1]]);
            const Vec3 c = lerp_zero(p[lone], p[others[2]], f[lone], f[others[2]]);
            total += triangle_area(a, b, c);
          } else {
            const Vec3 ac = lerp_zero(p[pos[0]], p[neg[0]], f[pos[0]], f[neg[0]]);
            const Vec3 ad = lerp_zero(p[pos[0]], p[neg[1]], f[pos[0]], f[neg[1]]);
            const Vec3 bd = lerp_zero(p[pos[1]], p[neg[1]], f[pos[1]], f[neg[1]]);
            const Vec3 bc = lerp_zero(p[pos[1]], p[neg[0]], f[pos[1]], f[neg[0]]);
            total += triangle_area(ac, ad, bd) + triangle_area(ac, bd, bc);
          }
        }
      }
    }
  }
  return total;
}

double interpolate(const ScalarField& phi, const Point& x) {
  const Grid& g = phi.grid();
  const int dim = g.dim();
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < dim; ++a) {
    const double u = x[a] / g.h();
    const double fl = std::floor(u);
    base[a] = static_cast<int>(fl);
    frac[a] = u - fl;
  }
  double value = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    std::array<int, 3> idx = base;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    value += w * phi[g.flat_index(idx)];
  }
  return value;
}

std::vector<Point> ray_directions(int dim) {
  std::vector<Point> dirs;
  if (dim == 2) {
    for (int k = 0; k < 16; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 16.0;
      dirs.push_back({std::cos(a), std::sin(a), 0.0});
    }
    return dirs;
  }
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -1; dz <= 1; ++dz) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const double len = std::sqrt(double(dx * dx + dy * dy + dz * dz));
        dirs.push_back({dx / len, dy / len, dz / len});
      }
    }
  }
  return dirs;
}

}  // namespace

double volume_positive(const ScalarField& phi) {
  double sum = 0.0;
  for (double v : phi.values()) sum += 0.5 * (v + 1.0);
  return sum * phi.grid().cell_volume();
}

double interface_measure(const ScalarField& phi) {
  const int dim = phi.grid().dim();
  if (dim != 2 && dim != 3) throw std::invalid_argument("level-set geometry needs dimension 2 or 3");
  if (!changes_sign(phi)) throw EmptyInterfaceError("phase field has no zero crossing");
  return dim == 2 ? perimeter_2d(phi) : area_3d(phi);
}

std::vector<double> radius_samples(const ScalarField& phi, const Point& center) {
  const Grid& g = phi.grid();
  const int dim = g.dim();
  if (dim != 2 && dim != 3) throw std::invalid_argument("level-set geometry needs dimension 2 or 3");
  const auto dirs = ray_directions(dim);
  std::vector<double> radii(dirs.size(), 0.0);
  if (interpolate(phi, center) <= 0.0) return radii;

  const double step = 0.25 * g.h();
  const double reach = 0.5;
  for (std::size_t r = 0; r < dirs.size(); ++r) {
    auto at = [&](double s) {
      Point x{};
      for (int a = 0; a < dim; ++a) x[a] = center[a] + s * dirs[r][a];
      return interpolate(phi, x);
    };
    double lo = 0.0;
    double found = std::numeric_limits<double>::quiet_NaN();
    for (double s = step; s <= reach; s += step) {
      if (at(s) <= 0.0) {
        double a = lo, b = s;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          (at(m) > 0.0 ? a : b) = m;
        }
        found = 0.5 * (a + b);
        break;
      }
      lo = s;
    }
    radii[r] = found;
  }
  return radii;
}

LevelSetGeometry level_set_geometry(const ScalarField& phi, const Point& center) {
  LevelSetGeometry out;
  out.volume_pos = volume_positive(phi);
  out.perimeter_est = interface_measure(phi);
  out.radius_samples = radius_samples(phi, center);
  return out;
}

}  // namespace vpac
