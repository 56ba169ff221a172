#pragma once

// Finite-eps quantities monitored along a trajectory: energies, discrepancy,
// diffuse surface measures, the backward-heat-kernel functional, approximate
// velocity and curvature, the first variation, and zero-level-set geometry.

#include <array>
#include <string_view>
#include <vector>

#include "vpac/field.hpp"
#include "vpac/model.hpp"

namespace vpac {

/// Gradient threshold below which the normal and the velocity are set to zero.
inline constexpr double kGradThreshold = 1e-8;

/// eps |grad phi|^2 / 2 + W(phi) / eps, with the one-sided difference gradient
/// (the density for which the explicit scheme is an exact discrete gradient flow).
ScalarField energy_density(const ScalarField& phi, double eps);

/// Integral of energy_density.
double surface_energy(const ScalarField& phi, double eps);

struct Energies {
  double surface = 0.0;
  double penalty = 0.0;
  double total() const { return surface + penalty; }
};

/// E_S and E_P = (m0 - m)^2 / (2 eps^alpha); E_P is zero for the RS model.
Energies energies(const ScalarField& phi, const ModelParams& p);

struct Discrepancy {
  ScalarField xi;
  double sup_xi = 0.0;
  double xi_pos_l1 = 0.0;
  double xi_l1 = 0.0;
};

/// xi = eps |grad phi|^2 / 2 - W(phi) / eps with the centred gradient.
Discrepancy discrepancy(const ScalarField& phi, double eps);

/// sigma^{-1} * integral of window * energy_density.
double varifold_mass(const ScalarField& phi, const ModelParams& p, const ScalarField& window);

/// Volume of the unit ball of dimension d - 1 (1, 2, pi for d = 1, 2, 3).
double unit_ball_volume_codim1(int dim);

/// mu(B_r(center)) / (omega_{d-1} r^{d-1}), ball taken with periodic wrap.
double density_ratio(const ScalarField& phi, const ModelParams& p, const Point& center, double r);

/// Largest density_ratio over every (center, radius) pair; 0 if either list is empty.
double density_ratio_max(const ScalarField& phi, const ModelParams& p, const std::vector<Point>& centers,
                         const std::vector<double>& radii);

struct KernelQuery {
  Point y{};
  double s = 0.0;
  double t = 0.0;
};

/// Periodised backward heat kernel
/// sum_k (4 pi tau)^{-(d-1)/2} exp(-|x + k - y|^2 / (4 tau)), tau = s - t.
double heat_kernel(const Point& x, const KernelQuery& q, int dim);

/// Integral of the backward heat kernel against the diffuse surface measure.
double heat_kernel_functional(const ScalarField& phi, const ModelParams& p, const KernelQuery& q);

/// value(t1) exp((int_lambda_sq(t2) - int_lambda_sq(t1)) / 2) - value(t2).
double monotonicity_check(double value_t1, double value_t2, double int_lambda_sq_t1,
                          double int_lambda_sq_t2);

/// -phi_t grad phi / |grad phi|^2 where |grad phi| > kGradThreshold, else 0.
VectorField velocity_field(const ScalarField& phi, const ScalarField& phi_t);

struct CurvatureProxy {
  ScalarField mean_curvature;  // laplacian(phi) - W'(phi) / eps^2
  double willmore = 0.0;       // integral of eps * H^2
};

CurvatureProxy curvature_proxy(const ScalarField& phi, double eps);

/// First variation of the diffuse varifold, assembled after integration by parts:
///   int (X . grad phi)(eps lap phi - W'/eps)
///   - int_{|grad phi| <= theta} (W/eps) div X
///   + int_{|grad phi| > theta} grad X : (nu (x) nu) xi.
double first_variation(const ScalarField& phi, const ModelParams& p, const VectorField& testfield);

/// First variation from its definition,
///   int_{|grad phi| > theta} grad X : (I - nu (x) nu) (eps |grad phi|^2/2 + W/eps),
/// with centred differences throughout.
double first_variation_direct(const ScalarField& phi, const ModelParams& p, const VectorField& testfield);

/// Integral of (phi + 1) / 2.
double volume_positive(const ScalarField& phi);

struct LevelSetGeometry {
  double volume_pos = 0.0;
  double perimeter_est = 0.0;
  std::vector<double> radius_samples;
};

/// Length (2D) or area (3D) of the piecewise-linear zero level set.
/// Throws EmptyInterfaceError if phi does not change sign.
double interface_measure(const ScalarField& phi);

/// Distance from `center` to the first zero crossing along 16 rays (2D) or 26
/// directions (3D), on the multilinear interpolant. All zeros if phi(center) <= 0.
std::vector<double> radius_samples(const ScalarField& phi, const Point& center);

/// Requires dim 2 or 3. Throws EmptyInterfaceError if phi does not change sign.
LevelSetGeometry level_set_geometry(const ScalarField& phi, const Point& center);

struct DiagnosticsRecord {
  double t = 0.0;
  double E_S = 0.0;
  double E_P = 0.0;
  double E = 0.0;
  double lambda = 0.0;
  double int_lambda_sq = 0.0;
  double mass = 0.0;
  double mass_deficit = 0.0;
  double mass_bound = 0.0;
  double sup_abs_phi = 0.0;
  double sup_xi = 0.0;
  double xi_pos_l1 = 0.0;
  double xi_l1 = 0.0;
  double mu_total = 0.0;
  double volume = 0.0;
  double dissipation = 0.0;
  double willmore_proxy = 0.0;

  static constexpr std::size_t kColumns = 17;
  static const std::array<std::string_view, kColumns>& column_names();
  std::array<double, kColumns> as_array() const;
  static DiagnosticsRecord from_array(const std::array<double, kColumns>& v);
};

/// Evaluate every monitored quantity of `phi`. The accumulated integrals come
/// from the caller; `surface_energy0` is E_S at t = 0 (for the mass bound).
DiagnosticsRecord compute_record(const ScalarField& phi, const ModelParams& p, double t,
                                 double int_lambda_sq, double dissipation, double surface_energy0);

}  // namespace vpac
