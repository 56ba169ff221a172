#include "vpac/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vpac {

double barrier_g(double s) {
  const double a = std::abs(s);
  if (a >= 1.0) return a - 0.5;
  const double u = s * s;
  return u * (3.0 + u * (13.0 + u * (-11.0 + 3.0 * u))) / 16.0;
}

double barrier_g_prime(double s) {
  if (s >= 1.0) return 1.0;
  if (s <= -1.0) return -1.0;
  const double u = s * s;
  return s * (6.0 + u * (52.0 + u * (-66.0 + 24.0 * u))) / 16.0;
}

double barrier_g_second(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double u = s * s;
  const double w = 1.0 - u;
  return w * w * (0.375 + 10.5 * u);
}

std::vector<std::string> check_barrier_g(int samples, double span) {
  std::vector<std::string> failures;
  auto fail = [&](const std::string& what, double s, double value) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at s = " << s << " (value " << value << ")";
    failures.push_back(msg.str());
  };
  if (barrier_g(0.0) != 0.0) fail("g(0) != 0", 0.0, barrier_g(0.0));
  for (int i = 0; i < samples; ++i) {
    const double s = -span + 2.0 * span * i / (samples - 1);
    const double g = barrier_g(s);
    if (g != barrier_g(-s)) fail("g not even", s, g - barrier_g(-s));
    if (g < 0.0) fail("g negative", s, g);
    if (std::abs(s) >= 1.0 && g != std::abs(s) - 0.5) fail("g != |s| - 1/2", s, g);
    const double g2 = barrier_g_second(s);
    if (g2 < 0.0 || g2 > 2.0) fail("g'' outside [0, 2]", s, g2);
  }
  // The closed forms for g' and g'' must be the derivatives of g.
  const double h = 1e-4;
  for (int i = 1; i < samples - 1; ++i) {
    const double s = -span + 2.0 * span * i / (samples - 1);
    const double fd1 = (barrier_g(s + h) - barrier_g(s - h)) / (2.0 * h);
    const double fd2 = (barrier_g(s + h) - 2.0 * barrier_g(s) + barrier_g(s - h)) / (h * h);
    if (std::abs(fd1 - barrier_g_prime(s)) > 1e-6) fail("g' inconsistent with g", s, fd1 - barrier_g_prime(s));
    if (std::abs(fd2 - barrier_g_second(s)) > 1e-4) fail("g'' inconsistent with g", s, fd2 - barrier_g_second(s));
  }
  return failures;
}

double barrier_phi(double x1, double t, double int_lambda, double eps, const BarrierSpec& spec) {
  const double s = x1 - std::round(x1);
  const double r = spec.delta * barrier_g(s / spec.delta) + int_lambda + 2.0 * t / spec.delta - spec.gamma;
  return std::tanh(r / eps);
}

BarrierReport barrier_test(const RunConfig& cfg, const BarrierSpec& spec, double tolerance) {
  if (cfg.kind != ModelKind::Takasao) throw std::invalid_argument("barrier test needs the penalty model");
  if (cfg.dim > 2) throw std::invalid_argument("barrier test runs in 1D or 2D");
  if (!(spec.delta > 0.0 && spec.delta < spec.gamma)) {
    throw std::invalid_argument("barrier needs 0 < delta < gamma");
  }
  validate(cfg);

  BarrierReport report;
  report.tolerance = tolerance;
  report.g_failures = check_barrier_g();
  report.min_margin = std::numeric_limits<double>::infinity();

  const Grid grid = cfg.grid();
  const PreparedData pd = build_phi0(cfg.shape, grid, cfg.eps, cfg.clamp_width);
  const ModelParams params(cfg.eps, cfg.alpha, cfg.kind, pd.m0);

  auto margin = [&](const SimState& s) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x1 = grid.coords(i)[0];
      m = std::min(m, barrier_phi(x1, s.t, s.int_lambda, cfg.eps, spec) - s.phi[i]);
    }
    return m;
  };

  RunOptions opts;
  opts.cadence = cfg.cadence;
  opts.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
    const double m = margin(s);
    if (s.t == 0.0) report.precondition_holds = m >= 0.0;
    report.times.push_back(s.t);
    report.margins.push_back(m);
    report.min_margin = std::min(report.min_margin, m);
    if (m < -tolerance && !report.first_violation) report.first_violation = s.t;
  };
  StepControl ctrl{cfg.time_step(), cfg.safety, cfg.scheme};
  run(pd, params, ctrl, cfg.T, opts);
  return report;
}

}  // namespace vpac
