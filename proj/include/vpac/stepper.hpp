#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vpac/diagnostics.hpp"
#include "vpac/field.hpp"
#include "vpac/initial.hpp"
#include "vpac/model.hpp"

namespace vpac {

enum class Scheme { ExplicitEuler, RK4Oracle };

inline constexpr double kDefaultSafety = 0.2;
/// sup|phi| beyond which a step is reported as unstable.
inline constexpr double kBlowupThreshold = 1.1;

struct StepControl {
  double dt = 0.0;
  double safety = kDefaultSafety;
  Scheme scheme = Scheme::ExplicitEuler;
};

struct SimState {
  ScalarField phi;
  double t = 0.0;
  double int_lambda = 0.0;     // integral of lambda dt
  double int_lambda_sq = 0.0;  // integral of lambda^2 dt
  double dissipation = 0.0;    // integral of eps * phi_t^2 over space-time
  ModelParams params;
};

/// safety * min(h^2 / (2d), eps^2 / 4).
double stable_dt(const Grid& g, double eps, double safety);

/// StepControl with dt = stable_dt(g, eps, safety).
StepControl make_step_control(const Grid& g, double eps, double safety = kDefaultSafety,
                              Scheme scheme = Scheme::ExplicitEuler);

/// One explicit step. Throws std::invalid_argument if ctrl.dt exceeds the
/// stability bound, BlowupError if the new field leaves [-1.1, 1.1] or is not finite.
SimState step(const SimState& s, const StepControl& ctrl);

struct FieldSnapshot {
  double t = 0.0;
  ScalarField phi;
};

struct RunOptions {
  int cadence = 1;
  std::vector<double> snapshot_times;
  /// Evaluate E after every step and keep the largest single-step increase.
  bool track_step_energy = false;
  /// Called with each emitted record.
  std::function<void(const SimState&, const DiagnosticsRecord&)> on_record;
};

struct RunResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<FieldSnapshot> snapshots;
  std::size_t steps = 0;
  /// max over steps of E(t_{k+1}) - E(t_k); only set when tracking was requested.
  std::optional<double> max_step_energy_increase;
};

/// Integrates from the prepared data to time T in ceil(T/dt) steps (the last
/// one shortened to land on T). Records at t = 0, every `cadence` steps and at T.
/// A BlowupError carries the time of the failing step.
RunResult run(const PreparedData& pd, const ModelParams& p, const StepControl& ctrl, double T,
              const RunOptions& options);

}  // namespace vpac
