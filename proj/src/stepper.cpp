#include "vpac/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vpac/errors.hpp"

namespace vpac {

namespace {

struct Increment {
  ScalarField phi;
  double lambda = 0.0;
  double dissipation_rate = 0.0;  // integral of eps * phi_t^2 at the left endpoint
};

// y + c * k, elementwise.
ScalarField axpy(const ScalarField& y, double c, const ScalarField& k) {
  ScalarField out(y.grid());
  const double* a = y.data();
  const double* b = k.data();
  double* d = out.data();
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = a[i] + c * b[i];
  return out;
}

Increment advance(const ScalarField& phi, const ModelParams& p, Scheme scheme, double dt) {
  RhsResult k1 = rhs(phi, p);
  const double sq = lane_sum(k1.dphi.values(), [](double v) { return v * v; });
  const double rate = p.eps() * sq * phi.grid().cell_volume();

  if (scheme == Scheme::ExplicitEuler) {
    return {axpy(phi, dt, k1.dphi), k1.multiplier.lambda, rate};
  }
  const RhsResult k2 = rhs(axpy(phi, 0.5 * dt, k1.dphi), p);
  const RhsResult k3 = rhs(axpy(phi, 0.5 * dt, k2.dphi), p);
  const RhsResult k4 = rhs(axpy(phi, dt, k3.dphi), p);
  ScalarField out(phi.grid());
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out[i] = phi[i] + c * (k1.dphi[i] + 2.0 * k2.dphi[i] + 2.0 * k3.dphi[i] + k4.dphi[i]);
  }
  return {std::move(out), k1.multiplier.lambda, rate};
}

void check_finite_range(const ScalarField& phi, double t) {
  // !(|v| <= threshold) also catches nan.
  bool bad = false;
  for (double v : phi.values()) bad |= !(std::abs(v) <= kBlowupThreshold);
  if (!bad) return;
  if (!phi.all_finite()) throw BlowupError("non-finite values in phase field", t);
  throw BlowupError("sup|phi| exceeded 1.1", t);
}

SimState advance_state(const SimState& s, Scheme scheme, double dt) {
  Increment inc = advance(s.phi, s.params, scheme, dt);
  const double t_new = s.t + dt;
  check_finite_range(inc.phi, t_new);
  SimState out{std::move(inc.phi), t_new, s.int_lambda, s.int_lambda_sq, s.dissipation, s.params};
  out.int_lambda += dt * inc.lambda;
  out.int_lambda_sq += dt * inc.lambda * inc.lambda;
  out.dissipation += dt * inc.dissipation_rate;
  return out;
}

// Euler update reusing two scratch fields; arithmetic identical to advance().
void euler_in_place(SimState& s, ScalarField& rate, ScalarField& next, double dt) {
  const MultiplierValue lam = rhs_into(s.phi, s.params, rate);
  const double* f = s.phi.data();
  const double* r = rate.data();
  double* out = next.data();
  for (std::size_t i = 0; i < s.phi.size(); ++i) out[i] = f[i] + dt * r[i];
  // The dissipation needs run-to-run determinism only, not order independence.
  const double sq = lane_sum(rate.values(), [](double v) { return v * v; });
  const double t_new = s.t + dt;
  check_finite_range(next, t_new);
  std::swap(s.phi, next);
  s.t = t_new;
  s.int_lambda += dt * lam.lambda;
  s.int_lambda_sq += dt * lam.lambda * lam.lambda;
  s.dissipation += dt * (s.params.eps() * sq * s.phi.grid().cell_volume());
}

double total_energy(const ScalarField& phi, const ModelParams& p) { return energies(phi, p).total(); }

}  // namespace

double stable_dt(const Grid& g, double eps, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("safety must lie in (0,1]");
  const double diffusive = g.h() * g.h() / (2.0 * g.dim());
  const double reactive = eps * eps / 4.0;
  return safety * std::min(diffusive, reactive);
}

StepControl make_step_control(const Grid& g, double eps, double safety, Scheme scheme) {
  return {stable_dt(g, eps, safety), safety, scheme};
}

SimState step(const SimState& s, const StepControl& ctrl) {
  const double limit = stable_dt(s.phi.grid(), s.params.eps(), ctrl.safety);
  if (!(ctrl.dt > 0.0) || ctrl.dt > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("time step violates dt <= safety * min(h^2/(2d), eps^2/4)");
  }
  return advance_state(s, ctrl.scheme, ctrl.dt);
}

RunResult run(const PreparedData& pd, const ModelParams& p, const StepControl& ctrl, double T,
              const RunOptions& options) {
  if (!(T >= 0.0)) throw std::invalid_argument("final time must be nonnegative");
  if (options.cadence < 1) throw std::invalid_argument("cadence must be at least 1");
  const double limit = stable_dt(pd.phi0.grid(), p.eps(), ctrl.safety);
  if (!(ctrl.dt > 0.0) || ctrl.dt > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("time step violates dt <= safety * min(h^2/(2d), eps^2/4)");
  }

  RunResult result{SimState{pd.phi0, 0.0, 0.0, 0.0, 0.0, p}, {}, {}, 0, std::nullopt};
  SimState& state = result.final_state;

  std::vector<double> pending = options.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snapshot = 0;
  auto take_snapshots = [&]() {
    while (next_snapshot < pending.size() && pending[next_snapshot] <= state.t + 1e-12 * std::max(1.0, T)) {
      result.snapshots.push_back({state.t, state.phi});
      ++next_snapshot;
    }
  };
  auto emit = [&]() {
    DiagnosticsRecord rec =
        compute_record(state.phi, p, state.t, state.int_lambda_sq, state.dissipation, pd.surface_energy0);
    if (options.on_record) options.on_record(state, rec);
    result.records.push_back(rec);
  };

  emit();
  take_snapshots();

  ScalarField rate(state.phi.grid());
  ScalarField scratch(state.phi.grid());
  std::size_t nsteps = T > 0.0 ? static_cast<std::size_t>(std::ceil(T / ctrl.dt - 1e-9)) : 0;
  if (T > 0.0 && nsteps == 0) nsteps = 1;
  double energy = options.track_step_energy ? total_energy(state.phi, p) : 0.0;
  if (options.track_step_energy) result.max_step_energy_increase = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 1; k <= nsteps; ++k) {
    const double t_target = k == nsteps ? T : static_cast<double>(k) * ctrl.dt;
    const double dt = t_target - state.t;
    if (ctrl.scheme == Scheme::ExplicitEuler) {
      euler_in_place(state, rate, scratch, dt);
    } else {
      state = advance_state(state, ctrl.scheme, dt);
    }
    state.t = t_target;
    ++result.steps;

    if (options.track_step_energy) {
      const double e = total_energy(state.phi, p);
      result.max_step_energy_increase = std::max(*result.max_step_energy_increase, e - energy);
      energy = e;
    }
    if (k % static_cast<std::size_t>(options.cadence) == 0 || k == nsteps) emit();
    take_snapshots();
  }
  return result;
}

}  // namespace vpac
