#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vpac/config.hpp"
#include "vpac/diagnostics.hpp"
#include "vpac/errors.hpp"
#include "vpac/initial.hpp"
#include "vpac/stepper.hpp"

using namespace vpac;

namespace {

constexpr double kPi = std::numbers::pi;

PreparedData disk(int n, double eps, double r = 0.2) {
  return build_phi0(Ball{{0.5, 0.5, 0.0}, r}, Grid(2, n), eps, default_clamp_width(eps));
}

// Straight interface x2 = 1/2 in 2D (the slab {|x2 - 1/2| < 1/4} has a second
// one at 3/4 and 1/4).
PreparedData flat(int n, double eps) { return build_phi0(Slab{1, 0.5, 0.25}, Grid(2, n), eps, default_clamp_width(eps)); }

ModelParams params(const PreparedData& pd, double eps, ModelKind kind = ModelKind::Takasao) {
  return ModelParams(eps, 0.5, kind, pd.m0);
}

}  // namespace

TEST_CASE("energies") {
  const Grid g(2, 32);
  const ModelParams well(0.1, 0.5, ModelKind::Takasao, 2.0 / 3.0 - 1e-12);
  const Energies e = energies(ScalarField(g, 1.0), well);
  CHECK(e.surface == 0.0);
  CHECK(e.penalty <= 1e-23);

  const PreparedData slab = build_phi0(Slab{0, 0.5, 0.25}, Grid(1, 512), 0.02, 0.2);
  const ModelParams p = params(slab, 0.02);
  const Energies s = energies(slab.phi0, p);
  CHECK(s.surface >= 2.0 * sigma() * 0.99);
  CHECK(s.surface <= 2.0 * sigma() * 1.01);
  CHECK(s.penalty == 0.0);
  CHECK(s.total() == s.surface);

  const ModelParams rs(0.02, 0.5, ModelKind::RubinsteinSternberg, 0.3);
  CHECK(energies(slab.phi0, rs).penalty == 0.0);
}

TEST_CASE("surface energy is the integral of the density") {
  const PreparedData pd = disk(128, 0.04);
  CHECK(surface_energy(pd.phi0, 0.04) == integrate(energy_density(pd.phi0, 0.04)));
}

TEST_CASE("discrepancy of constants") {
  const Grid g(2, 16);
  for (double c : {-0.5, 0.0, 0.9}) {
    const Discrepancy d = discrepancy(ScalarField(g, c), 0.1);
    CHECK(d.sup_xi == doctest::Approx(-well_W(c) / 0.1));
    CHECK(d.xi_pos_l1 == 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(d.xi[i] == doctest::Approx(-well_W(c) / 0.1));
  }
}

TEST_CASE("discrepancy stays small along a disk run") {
  const double eps = 0.02;
  const PreparedData pd = disk(256, eps);
  const ModelParams p = params(pd, eps);
  RunOptions o;
  o.cadence = 1000;
  const RunResult r = run(pd, p, make_step_control(pd.phi0.grid(), eps), 0.01, o);
  const double es0 = r.records.front().E_S;
  for (const auto& rec : r.records) CHECK(rec.xi_pos_l1 <= 0.01 * es0);
}

TEST_CASE("varifold mass") {
  const PreparedData pd = disk(512, 0.01);
  const ModelParams p = params(pd, 0.01);
  const Grid& g = pd.phi0.grid();
  CHECK(varifold_mass(pd.phi0, p, ScalarField(g, 1.0)) == doctest::Approx(pd.surface_energy0 / sigma()));
  CHECK(varifold_mass(pd.phi0, p, ScalarField(g, 0.0)) == 0.0);
  CHECK(std::abs(varifold_mass(pd.phi0, p, ScalarField(g, 1.0)) - 2.0 * kPi * 0.2) <= 0.025);
}

TEST_CASE("density ratio") {
  const double eps = 0.01;
  const PreparedData pd = flat(512, eps);
  const ModelParams p = params(pd, eps);
  const double on = density_ratio(pd.phi0, p, {0.3, 0.75, 0.0}, 0.15);
  CHECK(on == doctest::Approx(1.0).epsilon(0.05));
  CHECK(density_ratio(pd.phi0, p, {0.3, 0.5, 0.0}, 0.1) <= 1e-6);
  CHECK(unit_ball_volume_codim1(1) == 1.0);
  CHECK(unit_ball_volume_codim1(2) == 2.0);
  CHECK(unit_ball_volume_codim1(3) == doctest::Approx(kPi));

  // grid-aligned translation of field and centre together
  const PreparedData d = disk(256, 0.02);
  const ModelParams dp = params(d, 0.02);
  const Point c{0.7, 0.5, 0.0};
  const Point moved{0.7 + 13.0 / 256, 0.5 - 40.0 / 256, 0.0};
  const ScalarField shifted = shift(d.phi0, {13, -40, 0});
  CHECK(density_ratio(shifted, dp, moved, 0.08) == doctest::Approx(density_ratio(d.phi0, dp, c, 0.08)).epsilon(1e-12));

  const double cap = density_ratio_max(d.phi0, dp, {c, {0.5, 0.5, 0.0}}, {0.04, 0.08});
  CHECK(cap == std::max({density_ratio(d.phi0, dp, c, 0.04), density_ratio(d.phi0, dp, c, 0.08),
                         density_ratio(d.phi0, dp, {0.5, 0.5, 0.0}, 0.04),
                         density_ratio(d.phi0, dp, {0.5, 0.5, 0.0}, 0.08)}));
  CHECK(density_ratio_max(d.phi0, dp, {}, {0.1}) == 0.0);
}

TEST_CASE("heat kernel functional") {
  const Grid g(2, 64);
  const ModelParams well(0.1, 0.5, ModelKind::Takasao, 0.5);
  CHECK(heat_kernel_functional(ScalarField(g, 1.0), well, {{0.5, 0.5, 0.0}, 0.1, 0.0}) == 0.0);

  const double eps = 0.01;
  const PreparedData pd = flat(512, eps);
  const ModelParams p = params(pd, eps);
  for (double tau : {0.01, 0.03, 0.1}) {
    // Each line carries mass one; on the torus the centre also sees the
    // second interface and the periodic images, at normal offsets m/2.
    double lines = 0.0;
    for (int m = -20; m <= 20; ++m) lines += std::exp(-(m * 0.5) * (m * 0.5) / (4.0 * tau));
    const double v = heat_kernel_functional(pd.phi0, p, {{0.4, 0.75, 0.0}, tau, 0.0});
    CHECK(v / lines >= 0.95);
    CHECK(v / lines <= 1.05);
  }
  // a centre far from the interface sees more of it as tau grows
  const double near = heat_kernel_functional(pd.phi0, p, {{0.4, 0.5, 0.0}, 0.005, 0.0});
  const double wide = heat_kernel_functional(pd.phi0, p, {{0.4, 0.5, 0.0}, 0.01, 0.0});
  CHECK(wide > near);

  // the periodised kernel of one axis integrates to one
  const Grid line(2, 128);
  double total = 0.0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const Point x = line.coords(i);
    if (line.multi_index(i)[1] == 0) total += heat_kernel({x[0], 0.0, 0.0}, {{0.3, 0.0, 0.0}, 0.05, 0.0}, 2);
  }
  // the x2 factor is the periodised Gaussian at offset 0
  double images = 0.0;
  for (int k = -10; k <= 10; ++k) images += std::exp(-k * k / (4.0 * 0.05));
  CHECK(total * line.h() == doctest::Approx(images).epsilon(1e-12));
}

TEST_CASE("monotonicity check") {
  CHECK(monotonicity_check(0.7, 0.7, 0.3, 0.3) == 0.0);
  CHECK(monotonicity_check(1.0, 1.0, 0.0, 2.0) == doctest::Approx(std::exp(1.0) - 1.0));
  // stationary flat profile, lambda = 0
  const double eps = 0.01;
  const PreparedData pd = flat(512, eps);
  const ModelParams p = params(pd, eps);
  const KernelQuery early{{0.4, 0.75, 0.0}, 0.1, 0.0};
  const KernelQuery late{{0.4, 0.75, 0.0}, 0.1, 0.05};
  const double v1 = heat_kernel_functional(pd.phi0, p, early);
  const double v2 = heat_kernel_functional(pd.phi0, p, late);
  CHECK(monotonicity_check(v1, v2, 0.0, 0.0) >= -1e-6);
}

TEST_CASE("velocity field") {
  const Grid g(2, 16);
  const VectorField zero = velocity_field(ScalarField(g, 0.3), ScalarField(g, 2.0));
  CHECK(zero[0].max_abs() == 0.0);
  CHECK(zero[1].max_abs() == 0.0);

  // 1D fronts forced by a constant lambda travel at speed lambda into the -1 phase
  const double eps = 0.01, lambda = 2.0;
  const Grid line(1, 2048);
  ScalarField phi = sample(line, [&](const Point& x) { return q_profile(x[0] - 0.25, eps) * q_profile(0.75 - x[0], eps); });
  const double dt = stable_dt(line, eps, 0.2);
  auto forced = [&](const ScalarField& f) {
    const ScalarField lap = laplacian(f);
    ScalarField out(line);
    for (std::size_t i = 0; i < f.size(); ++i) {
      out[i] = lap[i] - well_Wprime(f[i]) / (eps * eps) + lambda * (1.0 - f[i] * f[i]) / eps;
    }
    return out;
  };
  for (int k = 0; k < 400; ++k) {
    const ScalarField r = forced(phi);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += dt * r[i];
  }
  const ScalarField phi_t = forced(phi);
  const VectorField v = velocity_field(phi, phi_t);
  const VectorField grad = gradient(phi);
  int checked = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (std::abs(phi[i]) > 0.5) continue;
    // outward normal of {phi > 0} is -grad phi / |grad phi|
    const double normal_speed = -v[0][i] * grad[0][i] / std::abs(grad[0][i]);
    CHECK(normal_speed == doctest::Approx(lambda).epsilon(0.1));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("curvature proxy") {
  auto flat_residual = [](int n) {
    const double eps = 0.02;
    const Grid line(1, n);
    const ScalarField phi = sample(line, [&](const Point& x) { return q_profile(x[0] - 0.25, eps) * q_profile(0.75 - x[0], eps); });
    const CurvatureProxy c = curvature_proxy(phi, eps);
    CHECK(c.willmore >= 0.0);
    return c.mean_curvature.max_abs();
  };
  const double ratio = flat_residual(512) / flat_residual(1024);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);

  const PreparedData pd = disk(512, 0.01);
  const CurvatureProxy c = curvature_proxy(pd.phi0, 0.01);
  CHECK(c.willmore / sigma() == doctest::Approx(2.0 * kPi / 0.2).epsilon(0.1));
}

TEST_CASE("first variation") {
  const double eps = 0.02;
  const PreparedData pd = disk(256, eps);
  const ModelParams p = params(pd, eps);
  const Grid& g = pd.phi0.grid();

  VectorField constant(g);
  constant[0] = ScalarField(g, 0.7);
  constant[1] = ScalarField(g, -1.3);
  CHECK(std::abs(first_variation(pd.phi0, p, constant)) <= 1e-8 * pd.surface_energy0);

  // div-free field on a constant phase: every term vanishes
  VectorField swirl(g);
  swirl[0] = sample(g, [](const Point& x) { return std::sin(2.0 * kPi * x[1]); });
  CHECK(first_variation(ScalarField(g, 0.4), p, swirl) == 0.0);

  // X = sin(2 pi x1) e1 on the circle of radius r about (1/2, 1/2):
  // delta V(X) = (1/r) int nu . X ds = -int_0^{2 pi} cos(t) sin(2 pi r cos(t)) dt
  const double r = 0.2;
  double sharp = 0.0;
  const int m = 20000;
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * kPi * (k + 0.5) / m;
    sharp -= std::cos(t) * std::sin(2.0 * kPi * r * std::cos(t)) * 2.0 * kPi / m;
  }
  TestFieldSpec spec;
  spec.enabled = true;
  const VectorField x = make_test_field(spec, g);
  const double ibp = first_variation(pd.phi0, p, x) / sigma();
  const double direct = first_variation_direct(pd.phi0, p, x) / sigma();
  CHECK(ibp == doctest::Approx(sharp).epsilon(0.1));
  CHECK(direct == doctest::Approx(sharp).epsilon(0.1));
  CHECK(ibp == doctest::Approx(direct).epsilon(0.1));
}

TEST_CASE("level-set geometry") {
  const Grid g(2, 32);
  CHECK(volume_positive(ScalarField(g, 1.0)) == 1.0);
  CHECK_THROWS_AS(interface_measure(ScalarField(g, 1.0)), EmptyInterfaceError);
  CHECK_THROWS_AS(level_set_geometry(ScalarField(g, -1.0), {0.5, 0.5, 0.0}), EmptyInterfaceError);

  const PreparedData pd = disk(512, 0.01);
  const LevelSetGeometry geo = level_set_geometry(pd.phi0, {0.5, 0.5, 0.0});
  CHECK(geo.perimeter_est == doctest::Approx(2.0 * kPi * 0.2).epsilon(0.01));
  CHECK(geo.radius_samples.size() == 16);
  for (double r : geo.radius_samples) CHECK(r == doctest::Approx(0.2).epsilon(0.01));
  CHECK(std::abs(geo.volume_pos - kPi * 0.04) <= 2.0 * 0.01);

  const PreparedData ball = build_phi0(Ball{{0.5, 0.5, 0.5}, 0.25}, Grid(3, 96), 0.05, 0.5);
  CHECK(interface_measure(ball.phi0) == doctest::Approx(4.0 * kPi * 0.0625).epsilon(0.01));
  const auto rays = radius_samples(ball.phi0, {0.5, 0.5, 0.5});
  CHECK(rays.size() == 26);
  for (double r : rays) CHECK(r == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("diagnostics record") {
  const auto& names = DiagnosticsRecord::column_names();
  const char* expected[] = {"t", "E_S", "E_P", "E", "lambda", "int_lambda_sq", "mass", "mass_deficit", "mass_bound",
                            "sup_abs_phi", "sup_xi", "xi_pos_l1", "xi_l1", "mu_total", "volume", "dissipation",
                            "willmore_proxy"};
  REQUIRE(names.size() == 17);
  for (std::size_t i = 0; i < names.size(); ++i) CHECK(names[i] == expected[i]);

  const double eps = 0.04;
  const PreparedData pd = disk(128, eps);
  const ModelParams p(eps, 0.5, ModelKind::Takasao, pd.m0 - 0.02);
  const DiagnosticsRecord rec = compute_record(pd.phi0, p, 0.5, 0.25, 0.125, pd.surface_energy0);
  CHECK(rec.t == 0.5);
  CHECK(rec.int_lambda_sq == 0.25);
  CHECK(rec.dissipation == 0.125);
  CHECK(rec.E_S == pd.surface_energy0);
  CHECK(rec.E == rec.E_S + rec.E_P);
  CHECK(rec.mass == pd.m0);
  CHECK(rec.mass_deficit == doctest::Approx(0.02));
  CHECK(rec.mass_deficit * rec.mass_deficit == doctest::Approx(2.0 * std::sqrt(eps) * rec.E_P).epsilon(1e-12));
  CHECK(rec.mass_bound == doctest::Approx(std::sqrt(2.0 * std::sqrt(eps) * pd.surface_energy0)));
  CHECK(rec.lambda == lambda_takasao(pd.phi0, p).lambda);
  CHECK(rec.mu_total == doctest::Approx(rec.E_S / sigma()));
  CHECK(rec.volume == volume_positive(pd.phi0));
  CHECK(rec.sup_abs_phi == pd.phi0.max_abs());
  CHECK(DiagnosticsRecord::from_array(rec.as_array()).as_array() == rec.as_array());
}
