#include <doctest.h>

#include <cmath>
#include <limits>

#include "vpac/errors.hpp"
#include "vpac/stepper.hpp"

using namespace vpac;

namespace {

SimState state_from(const ScalarField& phi, const ModelParams& p) { return SimState{phi, 0.0, 0.0, 0.0, 0.0, p}; }

PreparedData small_disk(int n = 64, double eps = 0.08) {
  return build_phi0(Ball{{0.5, 0.5, 0.0}, 0.25}, Grid(2, n), eps, default_clamp_width(eps));
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("stable time step") {
  CHECK(stable_dt(Grid(2, 256), 0.02, 0.2) == doctest::Approx(7.62939453125e-7).epsilon(1e-15));
  const Grid g(2, 128);
  CHECK(stable_dt(g, 0.05, 1.0) == 2.0 * stable_dt(g, 0.05, 0.5));
  // 1D: h^2/2 is the binding term exactly when h < eps / sqrt(2)
  const double eps = 0.1;
  for (int n : {8, 14, 15, 64}) {
    const Grid line(1, n);
    const double h = line.h();
    const double expect = h < eps / std::sqrt(2.0) ? h * h / 2.0 : eps * eps / 4.0;
    CHECK(stable_dt(line, eps, 1.0) == doctest::Approx(expect).epsilon(1e-15));
  }
  CHECK_THROWS_AS(stable_dt(g, 0.05, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(stable_dt(g, 0.05, 1.5), std::invalid_argument);
  const StepControl c = make_step_control(g, 0.05);
  CHECK(c.dt == stable_dt(g, 0.05, kDefaultSafety));
}

TEST_CASE("wells are fixed points") {
  const Grid g(2, 32);
  const ModelParams p(0.1, 0.5, ModelKind::Takasao, 2.0 / 3.0 - 1e-12);
  const SimState s = state_from(ScalarField(g, 1.0), p);
  const SimState next = step(s, make_step_control(g, 0.1));
  CHECK(next.phi == s.phi);
  CHECK(next.dissipation == 0.0);
}

TEST_CASE("step rejects an oversized dt") {
  const Grid g(2, 32);
  const ModelParams p(0.1, 0.5, ModelKind::Takasao, 0.0);
  StepControl c = make_step_control(g, 0.1);
  c.dt *= 1.01;
  CHECK_THROWS_AS(step(state_from(ScalarField(g, 0.0), p), c), std::invalid_argument);
}

TEST_CASE("blow-up is reported") {
  const Grid g(1, 32);
  const ModelParams p(0.1, 0.5, ModelKind::Takasao, 0.0);
  CHECK_THROWS_AS(step(state_from(ScalarField(g, 1.5), p), make_step_control(g, 0.1)), BlowupError);
  ScalarField bad(g, 0.0);
  bad[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(state_from(bad, p), make_step_control(g, 0.1)), BlowupError);
}

TEST_CASE("accumulators follow the left-endpoint rule") {
  const PreparedData pd = small_disk();
  const ModelParams p(0.08, 0.5, ModelKind::Takasao, pd.m0 + 0.01);
  const SimState s = state_from(pd.phi0, p);
  const StepControl c = make_step_control(pd.phi0.grid(), 0.08);
  const RhsResult r = rhs(s.phi, p);
  const SimState next = step(s, c);
  const double lam = r.multiplier.lambda;
  CHECK(next.t == c.dt);
  CHECK(next.int_lambda == doctest::Approx(c.dt * lam).epsilon(1e-14));
  CHECK(next.int_lambda_sq == doctest::Approx(c.dt * lam * lam).epsilon(1e-14));
  ScalarField sq = map(r.dphi, [](double v) { return v * v; });
  CHECK(next.dissipation == doctest::Approx(c.dt * 0.08 * integrate(sq)).epsilon(1e-12));
  for (std::size_t i = 0; i < s.phi.size(); ++i) CHECK(next.phi[i] == doctest::Approx(s.phi[i] + c.dt * r.dphi[i]).epsilon(1e-15));
}

TEST_CASE("standing profile drifts only by truncation") {
  const double eps = 0.02;
  const Grid g(1, 512);
  const ScalarField phi = sample(g, [&](const Point& x) { return q_profile(x[0] - 0.25, eps) * q_profile(0.75 - x[0], eps); });
  const ModelParams p(eps, 0.5, ModelKind::Takasao, k_mass(phi));
  const StepControl c = make_step_control(g, eps);
  const SimState next = step(state_from(phi, p), c);
  const double h = g.h();
  CHECK(max_abs_diff(next.phi, phi) <= c.dt * 0.5 * h * h / std::pow(eps, 4));
}

TEST_CASE("Euler and RK4 agree to second order per step") {
  const PreparedData pd = small_disk();
  const ModelParams p(0.08, 0.5, ModelKind::Takasao, pd.m0);
  const SimState s = state_from(pd.phi0, p);
  auto gap = [&](double dt) {
    const SimState e = step(s, {dt, kDefaultSafety, Scheme::ExplicitEuler});
    const SimState r = step(s, {dt, kDefaultSafety, Scheme::RK4Oracle});
    return max_abs_diff(e.phi, r.phi);
  };
  const double dt = stable_dt(pd.phi0.grid(), 0.08, kDefaultSafety);
  const double order = std::log2(gap(dt) / gap(dt / 2));
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("run bookkeeping") {
  const PreparedData pd = small_disk();
  const ModelParams p(0.08, 0.5, ModelKind::Takasao, pd.m0);
  const StepControl c = make_step_control(pd.phi0.grid(), 0.08);

  SUBCASE("T = 0") {
    const RunResult r = run(pd, p, c, 0.0, {});
    CHECK(r.records.size() == 1);
    CHECK(r.records[0].t == 0.0);
    CHECK(r.steps == 0);
    CHECK(r.final_state.phi == pd.phi0);
  }
  SUBCASE("records, snapshots and the final time") {
    const double T = 25.5 * c.dt;
    RunOptions o;
    o.cadence = 10;
    o.snapshot_times = {0.0, 12.0 * c.dt};
    const RunResult r = run(pd, p, c, T, o);
    CHECK(r.steps == 26);
    REQUIRE(r.records.size() == 4);
    CHECK(r.records[1].t == doctest::Approx(10 * c.dt));
    CHECK(r.records[2].t == doctest::Approx(20 * c.dt));
    CHECK(r.records.back().t == T);
    CHECK(r.final_state.t == T);
    REQUIRE(r.snapshots.size() == 2);
    CHECK(r.snapshots[0].phi == pd.phi0);
    for (std::size_t k = 1; k < r.records.size(); ++k) {
      CHECK(r.records[k].int_lambda_sq >= r.records[k - 1].int_lambda_sq);
      CHECK(r.records[k].dissipation >= r.records[k - 1].dissipation);
    }
  }
  SUBCASE("on_record sees every record") {
    RunOptions o;
    o.cadence = 7;
    std::size_t seen = 0;
    o.on_record = [&](const SimState& s, const DiagnosticsRecord& rec) {
      CHECK(s.t == rec.t);
      ++seen;
    };
    const RunResult r = run(pd, p, c, 30 * c.dt, o);
    CHECK(seen == r.records.size());
  }
  CHECK_THROWS_AS(run(pd, p, c, -1.0, {}), std::invalid_argument);
}

TEST_CASE("identical runs are bit-identical") {
  const PreparedData pd = small_disk();
  const ModelParams p(0.08, 0.5, ModelKind::Takasao, pd.m0);
  const StepControl c = make_step_control(pd.phi0.grid(), 0.08);
  RunOptions o;
  o.cadence = 20;
  const RunResult a = run(pd, p, c, 0.005, o), b = run(pd, p, c, 0.005, o);
  CHECK(a.final_state.phi == b.final_state.phi);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].as_array() == b.records[k].as_array());
}

TEST_CASE("energy decreases and the identity residual is first order") {
  const PreparedData pd = small_disk();
  const ModelParams p(0.08, 0.5, ModelKind::Takasao, pd.m0);
  auto residual = [&](double safety) {
    RunOptions o;
    o.cadence = 1000000;
    o.track_step_energy = true;
    const RunResult r = run(pd, p, make_step_control(pd.phi0.grid(), 0.08, safety), 0.01, o);
    const auto& first = r.records.front();
    const auto& last = r.records.back();
    REQUIRE(r.max_step_energy_increase.has_value());
    CHECK(*r.max_step_energy_increase <= 1e-7 * first.E);
    CHECK(last.E < first.E);
    const double res = std::abs(first.E - last.E - last.dissipation);
    CHECK(res <= 0.05 * (first.E - last.E));
    return res;
  };
  const double ratio = residual(0.2) / residual(0.1);
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("RS runs conserve the integral of phi") {
  const PreparedData pd = build_phi0(Ellipsoid{{0.5, 0.5, 0.0}, {0.3, 0.2, 0.0}}, Grid(2, 64), 0.08, 0.8);
  const ModelParams p(0.08, 0.5, ModelKind::RubinsteinSternberg, pd.m0);
  RunOptions o;
  o.cadence = 1000000;
  const RunResult r = run(pd, p, make_step_control(pd.phi0.grid(), 0.08), 0.02, o);
  CHECK(r.steps > 100);
  CHECK(std::abs(integrate(r.final_state.phi) - integrate(pd.phi0)) <= 1e-12);
}
