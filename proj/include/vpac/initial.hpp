#pragma once

// Well-prepared initial data: phi0 = tanh(b tanh(r(x)/b) / eps), where r is the
// periodic signed distance to an analytic shape (positive inside).

#include <variant>
#include <vector>

#include "vpac/field.hpp"

namespace vpac {

struct Ball {
  Point center{};
  double radius = 0.0;
};

struct BallUnion {
  std::vector<Ball> balls;
};

struct Ellipsoid {
  Point center{};
  Point semi_axes{};
};

/// {x : |x_axis - center| < half_width}; spans the torus along the other axes.
struct Slab {
  int axis = 0;
  double center = 0.5;
  double half_width = 0.0;
};

/// Two balls of equal radius joined by a round neck along their centre segment.
struct Dumbbell {
  Point first{};
  Point second{};
  double radius = 0.0;
  double neck_radius = 0.0;
};

using Shape = std::variant<Ball, BallUnion, Ellipsoid, Slab, Dumbbell>;

/// Minimum clearance between a shape and the faces of the fundamental cell.
inline constexpr double kShapeMargin = 0.05;
/// Minimum gap between the closures of two balls of a BallUnion.
inline constexpr double kBallGap = 0.02;

/// Throws GeometryError naming the first violated placement constraint.
void validate_shape(const Shape& shape, int dim);

/// Positive inside, negative outside, minimised over the 3^d nearest
/// periodic images. Unions take the maximum over their parts.
double signed_distance(const Shape& shape, const Point& x, int dim);

/// Smooth odd truncation b * tanh(r / b).
double clamp(double r, double b);
/// Derivative of clamp with respect to r.
double clamp_derivative(double r, double b);

/// Default truncation width max(10 eps, 0.05).
double default_clamp_width(double eps);

struct PreparedData {
  ScalarField phi0;
  double m0 = 0.0;
  double clamp_width = 0.0;
  Shape shape;
  double surface_energy0 = 0.0;
};

/// Throws ResolutionError if h > eps/4, std::invalid_argument if b < 10 eps,
/// GeometryError if the shape is badly placed.
PreparedData build_phi0(const Shape& shape, const Grid& grid, double eps, double b);

/// sup over nodes of eps |grad phi0|^2 / 2 - W(phi0) / eps using the
/// centred-difference gradient.
double verify_well_prepared(const PreparedData& pd, double eps);

/// Same supremum with the exact gradient |phi'| = q'(clamp(r)) clamp'(r) |grad r|,
/// using |grad r| = 1 and the profile identity (q')^2 = 2 W(q) / eps^2.
double verify_well_prepared_analytic(const PreparedData& pd, const Grid& grid, double eps);

}  // namespace vpac
