#include "vpac/initial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vpac/diagnostics.hpp"
#include "vpac/errors.hpp"
#include "vpac/model.hpp"

namespace vpac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double norm(const Point& v, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += v[a] * v[a];
  return std::sqrt(s);
}

double ball_sd(const Ball& b, const Point& x, int dim) {
  return b.radius - periodic_distance(b.center, x, dim);
}

// Visits the 3^d translates x + k, k in {-1,0,1}^d, and keeps the largest value.
template <typename F>
double max_over_images(const Point& x, int dim, F&& f) {
  double best = -std::numeric_limits<double>::infinity();
  const int count = dim == 1 ? 3 : (dim == 2 ? 9 : 27);
  for (int code = 0; code < count; ++code) {
    Point y = x;
    int c = code;
    for (int a = 0; a < dim; ++a) {
      y[a] += static_cast<double>(c % 3 - 1);
      c /= 3;
    }
    best = std::max(best, f(y));
  }
  return best;
}

// Unsigned distance from y (first orthant) to the ellipsoid with semi-axes e,
// found by bisection on the Lagrange parameter of the closest point.
double ellipsoid_boundary_distance(const Point& y, const Point& e, int dim) {
  int imin = 0;
  for (int a = 1; a < dim; ++a) {
    if (e[a] < e[imin]) imin = a;
  }
  bool at_centre = true;
  for (int a = 0; a < dim; ++a) at_centre = at_centre && y[a] == 0.0;
  if (at_centre) return e[imin];

  Point yy = y;
  // The root sits at the pole t = -e_min^2 when y lies on that axis plane; a
  // tiny offset keeps the bracket non-degenerate and moves the result by ~1e-14.
  if (yy[imin] == 0.0) yy[imin] = 1e-14;

  auto residual = [&](double t) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double r = e[a] * yy[a] / (t + e[a] * e[a]);
      s += r * r;
    }
    return s - 1.0;
  };
  const double emin2 = e[imin] * e[imin];
  double lo = -emin2 + e[imin] * yy[imin];
  double norm_ey = 0.0;
  for (int a = 0; a < dim; ++a) norm_ey += (e[a] * yy[a]) * (e[a] * yy[a]);
  double hi = -emin2 + std::sqrt(norm_ey);
  if (residual(lo) < 0.0) lo = -emin2 * (1.0 - 1e-15);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  double d2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double xa = e[a] * e[a] * yy[a] / (t + e[a] * e[a]);
    d2 += (xa - y[a]) * (xa - y[a]);
  }
  return std::sqrt(d2);
}

double ellipsoid_sd_single(const Ellipsoid& el, const Point& x, int dim) {
  Point y{0.0, 0.0, 0.0};
  double level = 0.0;
  for (int a = 0; a < dim; ++a) {
    y[a] = std::abs(x[a] - el.center[a]);
    level += (y[a] / el.semi_axes[a]) * (y[a] / el.semi_axes[a]);
  }
  const double dist = ellipsoid_boundary_distance(y, el.semi_axes, dim);
  return level < 1.0 ? dist : -dist;
}

double capsule_sd(const Point& a, const Point& b, double radius, const Point& x, int dim) {
  Point ab{}, ax{};
  double len2 = 0.0, proj = 0.0;
  for (int k = 0; k < dim; ++k) {
    ab[k] = b[k] - a[k];
    ax[k] = x[k] - a[k];
    len2 += ab[k] * ab[k];
    proj += ab[k] * ax[k];
  }
  const double t = len2 > 0.0 ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
  Point d{};
  for (int k = 0; k < dim; ++k) d[k] = ax[k] - t * ab[k];
  return radius - norm(d, dim);
}

void check_box(const Point& lo, const Point& hi, int dim, const char* what) {
  for (int a = 0; a < dim; ++a) {
    if (lo[a] < kShapeMargin - 1e-12 || hi[a] > 1.0 - kShapeMargin + 1e-12) {
      std::ostringstream msg;
      msg << what << " leaves the fundamental cell margin " << kShapeMargin << " on axis " << a;
      throw GeometryError(msg.str());
    }
  }
}

void check_ball(const Ball& b, int dim) {
  if (!(b.radius > 0.0)) throw GeometryError("ball radius must be positive");
  Point lo{}, hi{};
  for (int a = 0; a < dim; ++a) {
    lo[a] = b.center[a] - b.radius;
    hi[a] = b.center[a] + b.radius;
  }
  check_box(lo, hi, dim, "ball");
}

}  // namespace

void validate_shape(const Shape& shape, int dim) {
  std::visit(overloaded{
                 [&](const Ball& b) { check_ball(b, dim); },
                 [&](const BallUnion& u) {
                   if (u.balls.empty()) throw GeometryError("ball union is empty");
                   for (const auto& b : u.balls) check_ball(b, dim);
                   for (std::size_t i = 0; i < u.balls.size(); ++i) {
                     for (std::size_t j = i + 1; j < u.balls.size(); ++j) {
                       const double gap = periodic_distance(u.balls[i].center, u.balls[j].center, dim);
                       if (!(gap > u.balls[i].radius + u.balls[j].radius + kBallGap)) {
                         throw GeometryError("ball union components closer than radius sum + 0.02");
                       }
                     }
                   }
                 },
                 [&](const Ellipsoid& e) {
                   Point lo{}, hi{};
                   for (int a = 0; a < dim; ++a) {
                     if (!(e.semi_axes[a] > 0.0)) throw GeometryError("ellipsoid semi-axes must be positive");
                     lo[a] = e.center[a] - e.semi_axes[a];
                     hi[a] = e.center[a] + e.semi_axes[a];
                   }
                   check_box(lo, hi, dim, "ellipsoid");
                 },
                 [&](const Slab& s) {
                   if (s.axis < 0 || s.axis >= dim) throw GeometryError("slab axis outside grid dimension");
                   if (!(s.half_width > 0.0)) throw GeometryError("slab half-width must be positive");
                   if (s.center - s.half_width < kShapeMargin - 1e-12 ||
                       s.center + s.half_width > 1.0 - kShapeMargin + 1e-12) {
                     throw GeometryError("slab leaves the fundamental cell margin");
                   }
                 },
                 [&](const Dumbbell& d) {
                   check_ball({d.first, d.radius}, dim);
                   check_ball({d.second, d.radius}, dim);
                   if (!(d.neck_radius > 0.0 && d.neck_radius <= d.radius)) {
                     throw GeometryError("dumbbell neck radius must lie in (0, radius]");
                   }
                 },
             },
             shape);
}

double signed_distance(const Shape& shape, const Point& x, int dim) {
  return std::visit(
      overloaded{
          [&](const Ball& b) { return ball_sd(b, x, dim); },
          [&](const BallUnion& u) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& b : u.balls) best = std::max(best, ball_sd(b, x, dim));
            return best;
          },
          [&](const Ellipsoid& e) {
            return max_over_images(x, dim, [&](const Point& y) { return ellipsoid_sd_single(e, y, dim); });
          },
          [&](const Slab& s) {
            double d = x[s.axis] - s.center;
            d -= std::floor(d + 0.5);
            return s.half_width - std::abs(d);
          },
          [&](const Dumbbell& d) {
            return max_over_images(x, dim, [&](const Point& y) {
              double v = capsule_sd(d.first, d.second, d.neck_radius, y, dim);
              for (const Point& c : {d.first, d.second}) {
                Point diff{};
                for (int a = 0; a < dim; ++a) diff[a] = y[a] - c[a];
                v = std::max(v, d.radius - norm(diff, dim));
              }
              return v;
            });
          },
      },
      shape);
}

double clamp(double r, double b) { return b * std::tanh(r / b); }

double clamp_derivative(double r, double b) {
  const double t = std::tanh(r / b);
  return 1.0 - t * t;
}

double default_clamp_width(double eps) { return std::max(10.0 * eps, 0.05); }

PreparedData build_phi0(const Shape& shape, const Grid& grid, double eps, double b) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (grid.h() > eps / 4.0) {
    std::ostringstream msg;
    msg << "resolution: h > eps/4 (h = " << grid.h() << ", eps = " << eps << ")";
    throw ResolutionError(msg.str());
  }
  if (b < 10.0 * eps * (1.0 - 1e-12)) throw std::invalid_argument("clamp width must satisfy b >= 10 eps");
  validate_shape(shape, grid.dim());

  const int dim = grid.dim();
  ScalarField phi0 = sample(grid, [&](const Point& x) {
    return q_profile(clamp(signed_distance(shape, x, dim), b), eps);
  });
  PreparedData pd{std::move(phi0), 0.0, b, shape, 0.0};
  pd.m0 = k_mass(pd.phi0);
  pd.surface_energy0 = surface_energy(pd.phi0, eps);
  return pd;
}

double verify_well_prepared(const PreparedData& pd, double eps) {
  return discrepancy(pd.phi0, eps).sup_xi;
}

double verify_well_prepared_analytic(const PreparedData& pd, const Grid& grid, double eps) {
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = signed_distance(pd.shape, grid.coords(i), grid.dim());
    const double slope = clamp_derivative(r, pd.clamp_width);
    const double q = q_profile(clamp(r, pd.clamp_width), eps);
    // eps (q')^2 slope^2 / 2 - W(q)/eps with (q')^2 = 2W(q)/eps^2.
    const double xi = well_W(q) / eps * (slope * slope - 1.0);
    sup = std::max(sup, xi);
  }
  return sup;
}

}  // namespace vpac
