#include "vpac/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vpac/errors.hpp"

namespace vpac {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Takasao:
      return "takasao";
    case ModelKind::RubinsteinSternberg:
      return "rubinstein-sternberg";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "takasao") return ModelKind::Takasao;
  if (text == "rubinstein-sternberg" || text == "rs") return ModelKind::RubinsteinSternberg;
  throw std::invalid_argument("unknown model kind '" + std::string(text) + "'");
}

ModelParams::ModelParams(double eps, double alpha, ModelKind kind, double m0)
    : eps_(eps), alpha_(alpha), kind_(kind), m0_(m0) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(std::abs(m0) < 2.0 / 3.0)) {
    throw std::invalid_argument("reference mass must satisfy |m0| < 2/3");
  }
  penalty_ = std::pow(eps, -alpha);
}

double q_profile(double r, double eps) { return std::tanh(r / eps); }

double q_profile_derivative(double r, double eps) {
  const double q = std::tanh(r / eps);
  return (1.0 - q * q) / eps;
}

double k_mass(const ScalarField& phi) {
  return reproducible_sum(phi.values(), k_antideriv) * phi.grid().cell_volume();
}

MultiplierValue lambda_takasao_from_mass(double mass, const ModelParams& p) {
  return {p.penalty() * (p.m0() - mass)};
}

MultiplierValue lambda_takasao(const ScalarField& phi, const ModelParams& p) {
  return lambda_takasao_from_mass(k_mass(phi), p);
}

MultiplierValue lambda_rs(const ScalarField& phi, double eps) {
  return {reproducible_sum(phi.values(), well_Wprime) * phi.grid().cell_volume() / eps};
}

MultiplierValue rhs_into(const ScalarField& phi, const ModelParams& p, ScalarField& out) {
  const double* f = phi.data();
  const bool takasao = p.kind() == ModelKind::Takasao;
  // Both reductions are cubic in phi, so any inf or nan entry makes them non-finite.
  const double reduced = takasao ? reproducible_sum(phi.values(), k_antideriv) : reproducible_sum(phi.values(), well_Wprime);
  if (!std::isfinite(reduced)) {
    throw BlowupError("non-finite values in phase field", std::numeric_limits<double>::quiet_NaN());
  }
  const double eps = p.eps();
  const double inv_eps2 = 1.0 / (eps * eps);
  const MultiplierValue lam = takasao
                                  ? lambda_takasao_from_mass(reduced * phi.grid().cell_volume(), p)
                                  : MultiplierValue{reduced * phi.grid().cell_volume() / eps};
  const double forcing = lam.lambda / eps;
  double* d = out.data();
  for_each_laplacian_row(phi, [&](std::size_t row, const double* lap, std::size_t len) {
    const double* x = f + row;
    double* y = d + row;
    if (takasao) {
      for (std::size_t k = 0; k < len; ++k) {
        y[k] = lap[k] - well_Wprime(x[k]) * inv_eps2 + forcing * sqrt_two_W(x[k]);
      }
    } else {
      for (std::size_t k = 0; k < len; ++k) y[k] = lap[k] - well_Wprime(x[k]) * inv_eps2 + forcing;
    }
  });
  return lam;
}

RhsResult rhs(const ScalarField& phi, const ModelParams& p) {
  ScalarField out(phi.grid());
  const MultiplierValue lam = rhs_into(phi, p, out);
  return {std::move(out), lam};
}

}  // namespace vpac
