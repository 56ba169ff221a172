#include "vpac/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vpac {

ScalarField energy_density(const ScalarField& phi, double eps) {
  ScalarField e = forward_gradient_sq(phi);
  const double* f = phi.data();
  double* d = e.data();
  const double half_eps = 0.5 * eps;
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < phi.size(); ++i) d[i] = half_eps * d[i] + well_W(f[i]) * inv_eps;
  return e;
}

double surface_energy(const ScalarField& phi, double eps) { return integrate(energy_density(phi, eps)); }

Energies energies(const ScalarField& phi, const ModelParams& p) {
  if (p.kind() == ModelKind::RubinsteinSternberg) return {surface_energy(phi, p.eps()), 0.0};
  const double deficit = p.m0() - k_mass(phi);
  return {surface_energy(phi, p.eps()), 0.5 * deficit * deficit * p.penalty()};
}

Discrepancy discrepancy(const ScalarField& phi, double eps) {
  const Grid& g = phi.grid();
  const VectorField grad = gradient(phi);
  ScalarField xi(g);
  const double half_eps = 0.5 * eps;
  const double inv_eps = 1.0 / eps;
  double sup = -std::numeric_limits<double>::infinity();
  double pos = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) g2 += grad[a][i] * grad[a][i];
    const double v = half_eps * g2 - well_W(phi[i]) * inv_eps;
    xi[i] = v;
    sup = std::max(sup, v);
    if (v > 0.0) pos += v;
    abs_sum += std::abs(v);
  }
  const double w = g.cell_volume();
  return {std::move(xi), sup, pos * w, abs_sum * w};
}

double varifold_mass(const ScalarField& phi, const ModelParams& p, const ScalarField& window) {
  const ScalarField e = energy_density(phi, p.eps());
  double sum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) sum += window[i] * e[i];
  return sum * phi.grid().cell_volume() / sigma();
}

double unit_ball_volume_codim1(int dim) {
  switch (dim) {
    case 1:
      return 1.0;
    case 2:
      return 2.0;
    default:
      return std::numbers::pi;
  }
}

namespace {

// Sums the density over the nodes of the index box that covers B_r(center),
// taking each node once even when the box wraps the whole period.
double ratio_from_density(const ScalarField& e, const Point& center, double r) {
  const Grid& g = e.grid();
  const int d = g.dim();
  const int n = g.n();
  const double h = g.h();
  const int reach = static_cast<int>(std::ceil(r / h)) + 1;
  const int span = std::min(2 * reach + 1, n);
  std::array<int, 3> lo{0, 0, 0}, count{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    lo[a] = static_cast<int>(std::floor(center[a] / h)) - reach;
    count[a] = span;
  }
  const double r2 = r * r;
  double sum = 0.0;
  std::array<int, 3> idx{0, 0, 0};
  for (int i0 = 0; i0 < count[0]; ++i0) {
    for (int i1 = 0; i1 < count[1]; ++i1) {
      for (int i2 = 0; i2 < count[2]; ++i2) {
        const int off[3] = {i0, i1, i2};
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) {
          idx[a] = lo[a] + off[a];
          double dx = idx[a] * h - center[a];
          dx -= std::floor(dx + 0.5);
          dist2 += dx * dx;
        }
        if (dist2 < r2) sum += e[g.flat_index(idx)];
      }
    }
  }
  const double mass = sum * g.cell_volume() / sigma();
  return mass / (unit_ball_volume_codim1(g.dim()) * std::pow(r, g.dim() - 1));
}

}  // namespace

double density_ratio(const ScalarField& phi, const ModelParams& p, const Point& center, double r) {
  return ratio_from_density(energy_density(phi, p.eps()), center, r);
}

double density_ratio_max(const ScalarField& phi, const ModelParams& p, const std::vector<Point>& centers,
                         const std::vector<double>& radii) {
  const ScalarField e = energy_density(phi, p.eps());
  double best = 0.0;
  for (const auto& c : centers) {
    for (double r : radii) best = std::max(best, ratio_from_density(e, c, r));
  }
  return best;
}

namespace {

// Sum over integer k of exp(-(delta + k)^2 / (4 tau)), adding shells |k| = 1, 2, ...
// until a shell contributes less than 1e-14 of the running total.
double periodic_gaussian_1d(double delta, double tau) {
  const double inv = 1.0 / (4.0 * tau);
  double sum = std::exp(-delta * delta * inv);
  for (int k = 1; k < 1000; ++k) {
    const double a = delta + k;
    const double b = delta - k;
    const double shell = std::exp(-a * a * inv) + std::exp(-b * b * inv);
    sum += shell;
    if (shell < 1e-14 * sum) break;
  }
  return sum;
}

double kernel_prefactor(double tau, int dim) {
  return std::pow(4.0 * std::numbers::pi * tau, -0.5 * (dim - 1));
}

}  // namespace

double heat_kernel(const Point& x, const KernelQuery& q, int dim) {
  const double tau = q.s - q.t;
  const Point d = periodic_delta(q.y, x, dim);
  double prod = kernel_prefactor(tau, dim);
  for (int a = 0; a < dim; ++a) prod *= periodic_gaussian_1d(d[a], tau);
  return prod;
}

double heat_kernel_functional(const ScalarField& phi, const ModelParams& p, const KernelQuery& q) {
  const Grid& g = phi.grid();
  const int n = g.n();
  const double tau = q.s - q.t;
  // The periodised Gaussian factorises over axes, so tabulate one factor per
  // axis coordinate.
  std::array<std::vector<double>, 3> factor;
  for (int a = 0; a < g.dim(); ++a) {
    factor[a].resize(n);
    for (int i = 0; i < n; ++i) {
      double d = i * g.h() - q.y[a];
      d -= std::floor(d + 0.5);
      factor[a][i] = periodic_gaussian_1d(d, tau);
    }
  }
  const ScalarField e = energy_density(phi, p.eps());
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    double k = 1.0;
    for (int a = 0; a < g.dim(); ++a) k *= factor[a][idx[a]];
    sum += k * e[i];
  }
  return sum * kernel_prefactor(tau, g.dim()) * g.cell_volume() / sigma();
}

double monotonicity_check(double value_t1, double value_t2, double int_lambda_sq_t1,
                          double int_lambda_sq_t2) {
  return value_t1 * std::exp(0.5 * (int_lambda_sq_t2 - int_lambda_sq_t1)) - value_t2;
}

VectorField velocity_field(const ScalarField& phi, const ScalarField& phi_t) {
  const Grid& g = phi.grid();
  const VectorField grad = gradient(phi);
  VectorField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) g2 += grad[a][i] * grad[a][i];
    if (std::sqrt(g2) <= kGradThreshold) continue;
    const double scale = -phi_t[i] / g2;
    for (int a = 0; a < g.dim(); ++a) v[a][i] = scale * grad[a][i];
  }
  return v;
}

CurvatureProxy curvature_proxy(const ScalarField& phi, double eps) {
  ScalarField h = laplacian(phi);
  const double inv_eps2 = 1.0 / (eps * eps);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] -= well_Wprime(phi[i]) * inv_eps2;
    sum += h[i] * h[i];
  }
  return {std::move(h), eps * sum * phi.grid().cell_volume()};
}

namespace {

std::vector<VectorField> jacobian(const VectorField& x) {
  std::vector<VectorField> j;
  j.reserve(x.dim());
  for (int a = 0; a < x.dim(); ++a) j.push_back(gradient(x[a]));
  return j;
}

}  // namespace

double first_variation(const ScalarField& phi, const ModelParams& p, const VectorField& testfield) {
  const Grid& g = phi.grid();
  const int dim = g.dim();
  const double eps = p.eps();
  const VectorField grad = gradient(phi);
  const ScalarField lap = laplacian(phi);
  const ScalarField div = divergence(testfield);
  const auto jac = jacobian(testfield);

  double bulk = 0.0, flat = 0.0, tangential = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = 0.0, xg = 0.0;
    for (int a = 0; a < dim; ++a) {
      g2 += grad[a][i] * grad[a][i];
      xg += testfield[a][i] * grad[a][i];
    }
    const double f = phi[i];
    bulk += xg * (eps * lap[i] - well_Wprime(f) / eps);
    const double gn = std::sqrt(g2);
    if (gn <= kGradThreshold) {
      flat -= well_W(f) / eps * div[i];
      continue;
    }
    const double xi = 0.5 * eps * g2 - well_W(f) / eps;
    double contraction = 0.0;
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) contraction += jac[a][b][i] * grad[a][i] * grad[b][i];
    }
    tangential += contraction / g2 * xi;
  }
  return (bulk + flat + tangential) * g.cell_volume();
}

double first_variation_direct(const ScalarField& phi, const ModelParams& p, const VectorField& testfield) {
  const Grid& g = phi.grid();
  const int dim = g.dim();
  const double eps = p.eps();
  const VectorField grad = gradient(phi);
  const auto jac = jacobian(testfield);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = 0.0;
    for (int a = 0; a < dim; ++a) g2 += grad[a][i] * grad[a][i];
    if (std::sqrt(g2) <= kGradThreshold) continue;
    double trace = 0.0, contraction = 0.0;
    for (int a = 0; a < dim; ++a) {
      trace += jac[a][a][i];
      for (int b = 0; b < dim; ++b) contraction += jac[a][b][i] * grad[a][i] * grad[b][i];
    }
    const double density = 0.5 * eps * g2 + well_W(phi[i]) / eps;
    sum += (trace - contraction / g2) * density;
  }
  return sum * g.cell_volume();
}

const std::array<std::string_view, DiagnosticsRecord::kColumns>& DiagnosticsRecord::column_names() {
  static const std::array<std::string_view, kColumns> names = {
      "t",          "E_S",     "E_P",     "E",         "lambda",   "int_lambda_sq",
      "mass",       "mass_deficit",       "mass_bound", "sup_abs_phi", "sup_xi",
      "xi_pos_l1",  "xi_l1",   "mu_total", "volume",   "dissipation", "willmore_proxy"};
  return names;
}

std::array<double, DiagnosticsRecord::kColumns> DiagnosticsRecord::as_array() const {
  return {t,         E_S,   E_P,       E,        lambda, int_lambda_sq, mass,        mass_deficit, mass_bound,
          sup_abs_phi, sup_xi, xi_pos_l1, xi_l1, mu_total, volume,        dissipation, willmore_proxy};
}

DiagnosticsRecord DiagnosticsRecord::from_array(const std::array<double, kColumns>& v) {
  DiagnosticsRecord r;
  r.t = v[0];
  r.E_S = v[1];
  r.E_P = v[2];
  r.E = v[3];
  r.lambda = v[4];
  r.int_lambda_sq = v[5];
  r.mass = v[6];
  r.mass_deficit = v[7];
  r.mass_bound = v[8];
  r.sup_abs_phi = v[9];
  r.sup_xi = v[10];
  r.xi_pos_l1 = v[11];
  r.xi_l1 = v[12];
  r.mu_total = v[13];
  r.volume = v[14];
  r.dissipation = v[15];
  r.willmore_proxy = v[16];
  return r;
}

DiagnosticsRecord compute_record(const ScalarField& phi, const ModelParams& p, double t,
                                 double int_lambda_sq, double dissipation, double surface_energy0) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = k_mass(phi);
  const double deficit = p.m0() - r.mass;
  r.E_S = surface_energy(phi, p.eps());
  // The RS flow is the constrained gradient flow of E_S alone; no penalty term.
  r.E_P = p.kind() == ModelKind::Takasao ? 0.5 * deficit * deficit * p.penalty() : 0.0;
  r.E = r.E_S + r.E_P;
  r.lambda = p.kind() == ModelKind::Takasao ? lambda_takasao_from_mass(r.mass, p).lambda
                                            : lambda_rs(phi, p.eps()).lambda;
  r.int_lambda_sq = int_lambda_sq;
  r.mass_deficit = std::abs(deficit);
  r.mass_bound = std::sqrt(2.0 * std::pow(p.eps(), p.alpha()) * surface_energy0);
  r.sup_abs_phi = phi.max_abs();
  const Discrepancy xi = discrepancy(phi, p.eps());
  r.sup_xi = xi.sup_xi;
  r.xi_pos_l1 = xi.xi_pos_l1;
  r.xi_l1 = xi.xi_l1;
  r.mu_total = r.E_S / sigma();
  r.volume = volume_positive(phi);
  r.dissipation = dissipation;
  r.willmore_proxy = curvature_proxy(phi, p.eps()).willmore;
  return r;
}

}  // namespace vpac
