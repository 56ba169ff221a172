#pragma once

// Executes configured runs with their per-record probes, re-checks the
// invariant battery, and hosts the named scenarios.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpac/barrier.hpp"
#include "vpac/config.hpp"
#include "vpac/io.hpp"
#include "vpac/stepper.hpp"

namespace vpac {

struct RunArtifacts {
  RunConfig config;
  double m0 = 0.0;
  double surface_energy0 = 0.0;
  RunResult result;
  std::vector<ProbeRow> probes;
  std::vector<std::string> written;  // files produced, in order

  const std::vector<DiagnosticsRecord>& records() const { return result.records; }
  /// Probe values of (name, index) in record order.
  std::vector<double> probe_series(const std::string& name, int index = 0) const;
};

/// Builds the initial field, runs, evaluates the configured probes at every
/// record, and writes the CSV/probe/snapshot outputs named in the config.
RunArtifacts execute(const RunConfig& cfg);

/// Per-record checks (bounds on lambda, mass deficit, sup|phi|, discrepancy,
/// energy decay, RS conservation). One message per failure.
std::vector<std::string> check_invariants(const RunArtifacts& run);

/// |E(0) - E(T) - dissipation(T)|: the discrete energy identity residual.
double energy_identity_residual(const std::vector<DiagnosticsRecord>& records);

struct ScenarioReport {
  std::string name;
  std::vector<RunArtifacts> runs;
  std::optional<BarrierReport> barrier;
  std::vector<std::string> failures;

  int exit_code() const { return failures.empty() ? 0 : 1; }
};

const std::vector<std::string>& scenario_names();

/// Default configuration document of a scenario. The barrier scenario also
/// carries a "barrier" section {gamma, delta, tolerance}.
nlohmann::json scenario_document(const std::string& name);

/// Applies `overrides` (key=value) to the scenario document, runs it, and
/// writes outputs under `output_dir` (nothing is written if it is empty).
/// Throws std::invalid_argument for an unknown name.
ScenarioReport run_scenario(const std::string& name, const std::vector<std::string>& overrides,
                            const std::string& output_dir);

}  // namespace vpac
