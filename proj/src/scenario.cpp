#include "vpac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vpac/errors.hpp"

namespace vpac {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_t%.6f.bin", t);
  return buf;
}

}  // namespace

std::vector<double> RunArtifacts::probe_series(const std::string& name, int index) const {
  std::vector<double> out;
  for (const auto& row : probes) {
    if (row.probe == name && row.index == index) out.push_back(row.value);
  }
  return out;
}

RunArtifacts execute(const RunConfig& cfg) {
  validate(cfg);
  const Grid grid = cfg.grid();
  const PreparedData pd = build_phi0(cfg.shape, grid, cfg.eps, cfg.clamp_width);
  const ModelParams params(cfg.eps, cfg.alpha, cfg.kind, pd.m0);

  std::vector<ProbeRow> probes;
  const std::vector<Point> centers = density_centers(cfg.density, cfg.dim);
  const std::vector<double> radii = cfg.density.all_radii(cfg.eps);
  std::optional<VectorField> test_field;
  if (cfg.test_field.enabled) test_field = make_test_field(cfg.test_field, grid);

  RunOptions opts;
  opts.cadence = cfg.cadence;
  opts.snapshot_times = cfg.snapshot_times;
  opts.track_step_energy = cfg.track_step_energy;
  opts.on_record = [&](const SimState& s, const DiagnosticsRecord&) {
    auto add = [&](const char* name, int index, double value) { probes.push_back({s.t, name, index, value}); };
    add("int_lambda", 0, s.int_lambda);
    for (std::size_t q = 0; q < cfg.kernel_queries.size(); ++q) {
      const KernelSpec& k = cfg.kernel_queries[q];
      if (s.t < k.s) add("kernel", static_cast<int>(q), heat_kernel_functional(s.phi, params, {k.y, k.s, s.t}));
    }
    if (cfg.density.enabled()) add("density_max", 0, density_ratio_max(s.phi, params, centers, radii));
    if (!cfg.geometry_centers.empty()) {
      double perimeter = kNaN;
      try {
        perimeter = interface_measure(s.phi);
      } catch (const EmptyInterfaceError&) {
      }
      add("perimeter", 0, perimeter);
      for (std::size_t c = 0; c < cfg.geometry_centers.size(); ++c) {
        const auto rays = radius_samples(s.phi, cfg.geometry_centers[c]);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
        for (double r : rays) {
          lo = std::min(lo, r);
          hi = std::max(hi, r);
          sum += r;
        }
        const bool missing = std::any_of(rays.begin(), rays.end(), [](double r) { return std::isnan(r); });
        const int idx = static_cast<int>(c);
        add("radius_mean", idx, missing ? kNaN : sum / rays.size());
        add("radius_min", idx, missing ? kNaN : lo);
        add("radius_max", idx, missing ? kNaN : hi);
      }
    }
    if (test_field) {
      add("first_variation", 0, first_variation(s.phi, params, *test_field));
      add("first_variation_direct", 0, first_variation_direct(s.phi, params, *test_field));
    }
  };

  const StepControl ctrl{cfg.time_step(), cfg.safety, cfg.scheme};
  RunArtifacts art{cfg, pd.m0, pd.surface_energy0, run(pd, params, ctrl, cfg.T, opts), std::move(probes), {}};

  if (!cfg.csv_path.empty()) {
    write_csv(cfg.csv_path, art.result.records);
    art.written.push_back(cfg.csv_path);
  }
  if (!cfg.probes_path.empty()) {
    write_probes(cfg.probes_path, art.probes);
    art.written.push_back(cfg.probes_path);
  }
  if (!art.result.snapshots.empty()) {
    std::filesystem::create_directories(cfg.snapshot_dir);
    for (const auto& snap : art.result.snapshots) {
      const std::string path = (std::filesystem::path(cfg.snapshot_dir) / snapshot_name(snap.t)).string();
      write_snapshot(path, {cfg.kind, cfg.eps, cfg.alpha, snap.t, pd.m0, pd.surface_energy0, snap.phi});
      art.written.push_back(path);
    }
  }
  return art;
}

double energy_identity_residual(const std::vector<DiagnosticsRecord>& records) {
  if (records.empty()) return 0.0;
  const auto& first = records.front();
  const auto& last = records.back();
  return std::abs(first.E - last.E - last.dissipation);
}

std::vector<std::string> check_invariants(const RunArtifacts& run) {
  std::vector<std::string> failures;
  const auto& recs = run.records();
  if (recs.empty()) return {"no records"};
  const RunConfig& c = run.config;
  const bool takasao = c.kind == ModelKind::Takasao;
  const double eps_alpha = std::pow(c.eps, c.alpha);
  const double bound = 4.0 / 3.0 / eps_alpha;
  const double E0 = recs.front().E;
  const double volume0 = recs.front().volume;
  auto fail = [&](double t, const std::string& what) { failures.push_back("t=" + fmt(t) + ": " + what); };

  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    const auto row = r.as_array();
    if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
      fail(r.t, "non-finite diagnostic");
      continue;
    }
    if (takasao) {
      if (std::abs(r.lambda) > bound * (1.0 + 1e-12)) {
        fail(r.t, "|lambda| = " + fmt(std::abs(r.lambda)) + " exceeds (4/3) eps^-alpha = " + fmt(bound));
      }
      if (r.mass_deficit > r.mass_bound) {
        fail(r.t, "mass_deficit " + fmt(r.mass_deficit) + " exceeds mass_bound " + fmt(r.mass_bound));
      }
      const double lhs = r.mass_deficit * r.mass_deficit;
      const double rhs = 2.0 * eps_alpha * r.E_P;
      if (std::abs(lhs - rhs) > 1e-12 * std::max(lhs, rhs)) fail(r.t, "mass_deficit^2 != 2 eps^alpha E_P");
      if (r.sup_abs_phi > 1.0 + 1e-8) fail(r.t, "sup|phi| = " + fmt(r.sup_abs_phi) + " exceeds 1");
    } else if (2.0 * std::abs(r.volume - volume0) > 1e-9) {
      fail(r.t, "integral of phi drifted by " + fmt(2.0 * std::abs(r.volume - volume0)));
    }
    if (r.xi_pos_l1 > 0.01 * run.surface_energy0) {
      fail(r.t, "xi_pos_l1 = " + fmt(r.xi_pos_l1) + " exceeds 1% of E_S(0)");
    }
    if (k > 0 && r.E - recs[k - 1].E > 1e-7 * E0) {
      fail(r.t, "energy increased by " + fmt(r.E - recs[k - 1].E) + " since the previous record");
    }
  }
  if (run.result.max_step_energy_increase && *run.result.max_step_energy_increase > 1e-7 * E0) {
    failures.push_back("single-step energy increase " + fmt(*run.result.max_step_energy_increase) +
                       " exceeds 1e-7 E(0)");
  }
  return failures;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"stationary-disk", "two-disks",     "dumbbell",
                                                 "slab-1d",         "rs-comparison", "barrier"};
  return names;
}

json scenario_document(const std::string& name) {
  json doc = {{"grid", {{"dim", 2}, {"n", 256}}},
              {"model", {{"kind", "takasao"}, {"eps", 0.02}, {"alpha", 0.5}}},
              {"stepping", {{"scheme", "euler"}, {"safety", 0.2}, {"T", 0.05}, {"cadence", 500}}}};
  if (name == "stationary-disk") {
    // Eight density centres on the initial circle, twelve random.
    json disk_centers = json::array();
    for (int k = 0; k < 8; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 8.0;
      disk_centers.push_back({0.5 + 0.2 * std::cos(a), 0.5 + 0.2 * std::sin(a)});
    }
    doc["shape"] = {{"type", "ball"}, {"center", {0.5, 0.5}}, {"radius", 0.2}};
    doc["stepping"]["track_step_energy"] = true;
    doc["diagnostics"] = {
        {"geometry_centers", {{0.5, 0.5}}},
        {"kernel_queries", {{{"y", {0.7, 0.5}}, {"s", 0.06}}, {{"y", {0.5, 0.5}}, {"s", 0.08}}}},
        {"density", {{"centers", disk_centers},
                     {"random", 12},
                     {"seed", 7},
                     {"radii", {0.1, 0.2}},
                     {"eps_multiples", {2.0, 4.0}}}}};
  } else if (name == "two-disks") {
    doc["shape"] = {{"type", "ball_union"},
                    {"balls", {{{"center", {0.2, 0.5}}, {"radius", 0.10}}, {{"center", {0.65, 0.5}}, {"radius", 0.15}}}}};
    doc["stepping"]["T"] = 0.02;
    doc["stepping"]["cadence"] = 200;
    doc["stepping"]["track_step_energy"] = true;
    json queries = json::array();
    for (const auto& y : {std::array<double, 2>{0.3, 0.5}, {0.1, 0.5}, {0.5, 0.5}, {0.8, 0.5}, {0.65, 0.65}}) {
      for (double s : {0.06, 0.08, 0.1}) queries.push_back({{"y", {y[0], y[1]}}, {"s", s}});
    }
    doc["diagnostics"] = {{"geometry_centers", {{0.2, 0.5}, {0.65, 0.5}}}, {"kernel_queries", queries}};
  } else if (name == "dumbbell") {
    doc["shape"] = {{"type", "dumbbell"},
                    {"first", {0.33, 0.5}},
                    {"second", {0.67, 0.5}},
                    {"radius", 0.12},
                    {"neck_radius", 0.04}};
    doc["stepping"]["T"] = 0.02;
    doc["stepping"]["cadence"] = 200;
    doc["diagnostics"] = {{"geometry_centers", {{0.33, 0.5}, {0.67, 0.5}}},
                          {"test_field", {{"axis", 0}, {"wavenumber", {1, 0}}, {"amplitude", 1.0}}}};
  } else if (name == "slab-1d") {
    doc["grid"] = {{"dim", 1}, {"n", 512}};
    doc["shape"] = {{"type", "slab"}, {"axis", 0}, {"center", 0.5}, {"half_width", 0.25}};
    doc["stepping"]["cadence"] = 2000;
    doc["stepping"]["track_step_energy"] = true;
  } else if (name == "rs-comparison") {
    doc["shape"] = {{"type", "ellipsoid"}, {"center", {0.5, 0.5}}, {"semi_axes", {0.25, 0.15}}};
    doc["stepping"]["T"] = 0.02;
    doc["stepping"]["cadence"] = 200;
    doc["stepping"]["track_step_energy"] = true;
  } else if (name == "barrier") {
    doc["shape"] = {{"type", "ball"}, {"center", {0.5, 0.5}}, {"radius", 0.2}};
    doc["stepping"]["T"] = 0.002;
    doc["stepping"]["cadence"] = 50;
    doc["barrier"] = {{"gamma", 0.1}, {"delta", 0.05}, {"tolerance", 1e-3}};
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  return doc;
}

namespace {

void set_outputs(json& doc, const std::string& dir, const std::string& stem) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / stem;
  doc["output"]["csv"] = base.string() + ".csv";
  doc["output"]["probes"] = base.string() + ".probes.csv";
  if (doc["output"].contains("snapshot_times") && !doc["output"]["snapshot_times"].empty()) {
    doc["output"]["snapshot_dir"] = base.string() + ".snapshots";
  }
}

// Indices k >= skip where the series moves against `direction` (+1 increasing, -1 decreasing).
std::optional<std::size_t> first_non_monotone(const std::vector<double>& v, std::size_t skip, int direction) {
  for (std::size_t k = std::max<std::size_t>(skip, 1); k < v.size(); ++k) {
    if (std::isnan(v[k]) || std::isnan(v[k - 1])) return k;
    if (direction * (v[k] - v[k - 1]) < -1e-12) return k;
  }
  return std::nullopt;
}

void scenario_checks(const std::string& name, ScenarioReport& rep) {
  auto fail = [&](const std::string& what) { rep.failures.push_back(what); };
  if (name == "stationary-disk") {
    const auto& art = rep.runs.front();
    const double r0 = std::get<Ball>(art.config.shape).radius;
    const auto lo = art.probe_series("radius_min");
    const auto hi = art.probe_series("radius_max");
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const double drift = std::max(std::abs(lo[k] - r0), std::abs(hi[k] - r0)) / r0;
      if (!(drift <= 0.05)) {
        fail("radius drift " + fmt(100.0 * drift) + "% exceeds 5% at t=" + fmt(art.records()[k].t));
        break;
      }
    }
  } else if (name == "two-disks") {
    const auto& art = rep.runs.front();
    const auto& recs = art.records();
    for (const auto& r : recs) {
      if (std::abs(r.volume - recs.front().volume) > 0.75 * r.mass_bound) {
        fail("volume drift exceeds (3/4) mass_bound at t=" + fmt(r.t));
        break;
      }
    }
    if (auto k = first_non_monotone(art.probe_series("radius_mean", 0), 10, -1)) {
      fail("small disk radius not decreasing at t=" + fmt(recs[*k].t));
    }
    if (auto k = first_non_monotone(art.probe_series("radius_mean", 1), 10, +1)) {
      fail("large disk radius not increasing at t=" + fmt(recs[*k].t));
    }
  } else if (name == "slab-1d") {
    const double ratio = rep.runs.front().surface_energy0 / sigma();
    if (!(ratio >= 1.99 && ratio <= 2.01)) fail("initial interface count " + fmt(ratio) + " not within 2 +- 0.01");
  } else if (name == "rs-comparison") {
    const auto& tk = rep.runs[0].records();
    const auto& rs = rep.runs[1].records();
    double rs_drift = 0.0, tk_drift = 0.0;
    for (const auto& r : rs) rs_drift = std::max(rs_drift, 2.0 * std::abs(r.volume - rs.front().volume));
    for (const auto& r : tk) tk_drift = std::max(tk_drift, 2.0 * std::abs(r.volume - tk.front().volume));
    if (rs_drift > 1e-9) fail("RS integral of phi drifted by " + fmt(rs_drift));
    if (tk_drift > 2.0 * tk.back().mass_bound) fail("penalty model: integral of phi drift exceeds the relaxed bound");
  }
}

}  // namespace

ScenarioReport run_scenario(const std::string& name, const std::vector<std::string>& overrides,
                            const std::string& output_dir) {
  json doc = scenario_document(name);
  for (const auto& o : overrides) apply_override(doc, o);
  ScenarioReport rep;
  rep.name = name;

  BarrierSpec barrier;
  double barrier_tol = 1e-3;
  if (doc.contains("barrier")) {
    const json b = doc["barrier"];
    barrier.gamma = b.value("gamma", barrier.gamma);
    barrier.delta = b.value("delta", barrier.delta);
    barrier_tol = b.value("tolerance", barrier_tol);
    doc.erase("barrier");
  }

  std::vector<std::pair<std::string, json>> plan;
  if (name == "rs-comparison") {
    json tk = doc, rs = doc;
    tk["model"]["kind"] = "takasao";
    rs["model"]["kind"] = "rubinstein-sternberg";
    set_outputs(tk, output_dir, name + ".takasao");
    set_outputs(rs, output_dir, name + ".rs");
    plan = {{"takasao", tk}, {"rs", rs}};
  } else {
    set_outputs(doc, output_dir, name);
    plan = {{name, doc}};
  }

  for (const auto& [label, d] : plan) {
    const RunConfig cfg = config_from_json(d);
    try {
      rep.runs.push_back(execute(cfg));
    } catch (const BlowupError& e) {
      throw BlowupError(name + "/" + label + ": " + e.what(), e.time());
    }
    for (const auto& f : check_invariants(rep.runs.back())) rep.failures.push_back(label + ": " + f);
  }
  scenario_checks(name, rep);

  if (name == "barrier") {
    rep.barrier = barrier_test(rep.runs.front().config, barrier, barrier_tol);
    const BarrierReport& b = *rep.barrier;
    if (!b.precondition_holds) rep.failures.push_back("barrier: phi_bar(., 0) < phi0 somewhere");
    for (const auto& g : b.g_failures) rep.failures.push_back("barrier g: " + g);
    if (b.min_margin < -b.tolerance) {
      rep.failures.push_back("barrier margin " + fmt(b.min_margin) + " below -" + fmt(b.tolerance) +
                             " first at t=" + fmt(*b.first_violation));
    }
  }
  return rep;
}

}  // namespace vpac
