#pragma once

// Double-well potential, the tanh transition profile, and the two non-local
// multipliers (penalised k-mass deficit, and the spatial mean of W').

#include <algorithm>
#include <string>
#include <string_view>

#include "vpac/field.hpp"

namespace vpac {

enum class ModelKind { Takasao, RubinsteinSternberg };

std::string_view to_string(ModelKind kind);
/// Accepts "takasao" and "rubinstein-sternberg" (also "rs").
ModelKind parse_model_kind(std::string_view text);

class ModelParams {
 public:
  static constexpr double kDefaultAlpha = 0.5;

  /// Throws std::invalid_argument unless 0 < eps < 1, 0 < alpha < 1 and |m0| < 2/3.
  ModelParams(double eps, double alpha, ModelKind kind, double m0);

  double eps() const { return eps_; }
  double alpha() const { return alpha_; }
  ModelKind kind() const { return kind_; }
  /// Reference k-mass of the initial field.
  double m0() const { return m0_; }
  /// eps^(-alpha), the penalty stiffness.
  double penalty() const { return penalty_; }
  /// (4/3) eps^(-alpha); no admissible field produces a larger |lambda|.
  double lambda_bound() const { return 4.0 / 3.0 * penalty_; }

 private:
  double eps_;
  double alpha_;
  ModelKind kind_;
  double m0_;
  double penalty_;
};

struct MultiplierValue {
  double lambda = 0.0;
};

/// W(a) = (1 - a^2)^2 / 2.
inline double well_W(double a) {
  const double s = 1.0 - a * a;
  return 0.5 * s * s;
}

/// W'(a) = -2a(1 - a^2).
inline double well_Wprime(double a) { return -2.0 * a * (1.0 - a * a); }

/// sqrt(2 W(a)) = 1 - a^2, with a clamped to [-1, 1] first.
inline double sqrt_two_W(double a) {
  const double c = std::clamp(a, -1.0, 1.0);
  return 1.0 - c * c;
}

/// k(s) = s - s^3/3, the antiderivative of sqrt(2W) vanishing at 0.
inline double k_antideriv(double s) { return s - s * s * s / 3.0; }

/// Energy of one flat transition layer: the integral of sqrt(2W) over [-1, 1].
constexpr double sigma() { return 4.0 / 3.0; }

/// Standing-wave profile tanh(r / eps).
double q_profile(double r, double eps);
/// d/dr tanh(r / eps) = (1 - q^2) / eps.
double q_profile_derivative(double r, double eps);

/// Integral of k(phi) over the torus.
double k_mass(const ScalarField& phi);

MultiplierValue lambda_takasao(const ScalarField& phi, const ModelParams& p);
/// Penalty multiplier for an already-computed k-mass.
MultiplierValue lambda_takasao_from_mass(double mass, const ModelParams& p);
MultiplierValue lambda_rs(const ScalarField& phi, double eps);

struct RhsResult {
  ScalarField dphi;
  MultiplierValue multiplier;
};

/// Time derivative of phi, with the multiplier evaluated from the same phi.
/// Throws BlowupError(t = nan) if phi has non-finite entries.
RhsResult rhs(const ScalarField& phi, const ModelParams& p);

/// rhs() writing into a caller-owned buffer on the same grid.
MultiplierValue rhs_into(const ScalarField& phi, const ModelParams& p, ScalarField& out);

}  // namespace vpac
