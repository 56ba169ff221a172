#pragma once

// Supersolution ordering test for the penalised non-local flow. The barrier
//   r(x, t) = delta g(s / delta) + int_0^t lambda + 2 t / delta - gamma,
//   phi_bar = tanh(r / eps),
// with s the signed offset of x_1 from the cell face x_1 = 0, should stay above
// the solution while the flow is regular.

#include <optional>
#include <string>
#include <vector>

#include "vpac/config.hpp"

namespace vpac {

/// Even profile with g(0) = 0, g(s) = |s| - 1/2 for |s| >= 1 and
/// 0 <= g'' <= 2: on |s| < 1, g(s) = (3 s^2 + 13 s^4 - 11 s^6 + 3 s^8) / 16,
/// which matches |s| - 1/2 to third order at |s| = 1.
double barrier_g(double s);
double barrier_g_prime(double s);
double barrier_g_second(double s);

/// Checks the defining properties of g on a uniform sample of [-span, span].
/// Returns one message per violated property (empty when all hold).
std::vector<std::string> check_barrier_g(int samples = 4001, double span = 3.0);

struct BarrierSpec {
  double gamma = 0.1;
  double delta = 0.05;
};

/// Barrier value at first coordinate x1, time t and accumulated int lambda.
double barrier_phi(double x1, double t, double int_lambda, double eps, const BarrierSpec& spec);

struct BarrierReport {
  std::vector<double> times;
  std::vector<double> margins;  // min over nodes of phi_bar - phi at each record
  double min_margin = 0.0;
  bool precondition_holds = false;  // phi_bar(., 0) >= phi0 at every node
  std::optional<double> first_violation;
  double tolerance = 1e-3;
  std::vector<std::string> g_failures;

  bool passed() const {
    return precondition_holds && g_failures.empty() && min_margin >= -tolerance;
  }
};

/// Runs `cfg` (penalty model, d = 1 or 2) and evaluates the ordering margin at every
/// record. Throws std::invalid_argument if the run is not admissible.
BarrierReport barrier_test(const RunConfig& cfg, const BarrierSpec& spec, double tolerance = 1e-3);

}  // namespace vpac
