#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vpac/barrier.hpp"
#include "vpac/config.hpp"
#include "vpac/errors.hpp"
#include "vpac/io.hpp"
#include "vpac/plot.hpp"
#include "vpac/scenario.hpp"
#include "vpac/sweep.hpp"

using namespace vpac;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kMinimalDisk = R"({
  "grid": {"dim": 2, "n": 256},
  "model": {"eps": 0.02},
  "shape": {"type": "ball", "center": [0.5, 0.5], "radius": 0.2}
})";

// Small, fast configuration used for the I/O tests.
json small_doc() {
  return json::parse(R"({
    "grid": {"dim": 2, "n": 48},
    "model": {"kind": "takasao", "eps": 0.1},
    "shape": {"type": "ball", "center": [0.5, 0.5], "radius": 0.2},
    "clamp_width": 1.0,
    "stepping": {"T": 0.002, "cadence": 5}
  })");
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vpac_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_violation(const ConfigError& e, const std::string& path, const std::string& fragment) {
  for (const auto& v : e.violations()) {
    if (v.path == path && v.constraint.find(fragment) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config(kMinimalDisk);
  CHECK(c.dim == 2);
  CHECK(c.n == 256);
  CHECK(c.kind == ModelKind::Takasao);
  CHECK(c.alpha == 0.5);
  CHECK(c.safety == 0.2);
  CHECK(c.clamp_width == doctest::Approx(0.2));
  CHECK(c.scheme == Scheme::ExplicitEuler);
  CHECK(std::get<Ball>(c.shape).radius == 0.2);
  CHECK(c.time_step() == stable_dt(Grid(2, 256), 0.02, 0.2));
}

TEST_CASE("config violations are all reported") {
  json doc = json::parse(kMinimalDisk);
  doc["model"]["alpha"] = 1.2;
  try {
    config_from_json(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_violation(e, "model.alpha", "(0,1)"));
  }

  json coarse = json::parse(kMinimalDisk);
  coarse["grid"]["n"] = 64;
  coarse["model"]["eps"] = 0.005;
  coarse["stepping"] = {{"safety", 0.0}, {"bogus", 1}};
  try {
    config_from_json(coarse);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_violation(e, "resolution", "h > eps/4"));
    CHECK(has_violation(e, "stepping.safety", "(0,1]"));
    CHECK(has_violation(e, "stepping.bogus", ""));
    CHECK(std::string(e.what()).find("resolution: h > eps/4") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"shape": {"type": "torus"}})"), ConfigError);
  json narrow = json::parse(kMinimalDisk);
  narrow["clamp_width"] = 0.1;
  CHECK_THROWS_AS(config_from_json(narrow), ConfigError);
  json offside = json::parse(kMinimalDisk);
  offside["shape"]["center"] = {0.1, 0.5};
  CHECK_THROWS_AS(config_from_json(offside), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/vpac.json"), IoError);
}

TEST_CASE("config serialisation round-trips") {
  for (const auto& name : scenario_names()) {
    json doc = scenario_document(name);
    doc.erase("barrier");
    const RunConfig c = config_from_json(doc);
    const RunConfig again = config_from_json(config_to_json(c));
    CHECK(config_to_json(again) == config_to_json(c));
  }
}

TEST_CASE("overrides") {
  json doc = json::parse(kMinimalDisk);
  apply_override(doc, "model.eps=0.04");
  apply_override(doc, "stepping.scheme=rk4");
  apply_override(doc, "output.csv=out/run.csv");
  CHECK(doc["model"]["eps"] == 0.04);
  CHECK(doc["stepping"]["scheme"] == "rk4");
  const RunConfig c = config_from_json(doc);
  CHECK(c.eps == 0.04);
  CHECK(c.scheme == Scheme::RK4Oracle);
  CHECK(c.csv_path == "out/run.csv");
  CHECK_THROWS_AS(apply_override(doc, "no-equals-sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
}

TEST_CASE("density centres are seeded") {
  DensitySpec spec;
  spec.centers = {{0.5, 0.5, 0.0}};
  spec.random = 5;
  spec.seed = 11;
  const auto a = density_centers(spec, 2), b = density_centers(spec, 2);
  REQUIRE(a.size() == 6);
  CHECK(a == b);
  CHECK(a[0] == Point{0.5, 0.5, 0.0});
  for (const auto& p : a) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[2] == 0.0);
  }
  spec.eps_multiples = {2.0, 4.0};
  spec.radii = {0.1};
  CHECK(spec.all_radii(0.02) == std::vector<double>{0.04, 0.08, 0.1});
}

TEST_CASE("snapshot round trip") {
  const Grid g(2, 256);
  ScalarField phi(g);
  for (std::size_t i = 0; i < g.size(); ++i) phi[i] = std::sin(0.1 * static_cast<double>(i)) / 3.0 + 1e-300 * (i % 3);
  const Snapshot snap{ModelKind::RubinsteinSternberg, 0.02, 0.5, 0.0125, -0.1, 1.7, phi};
  const fs::path path = scratch("snap.bin");
  write_snapshot(path.string(), snap);

  const std::string bytes = slurp(path);
  const auto newline = bytes.find('\n');
  REQUIRE(newline != std::string::npos);
  const json header = json::parse(bytes.substr(0, newline));
  CHECK(header["count"] == 65536);
  CHECK(header["dim"] == 2);
  CHECK(header["n"] == 256);
  CHECK(bytes.size() - newline - 1 == 524288);

  const Snapshot back = read_snapshot(path.string());
  CHECK(back.phi == phi);
  CHECK(back.kind == snap.kind);
  CHECK(back.eps == snap.eps);
  CHECK(back.alpha == snap.alpha);
  CHECK(back.t == snap.t);
  CHECK(back.m0 == snap.m0);
  CHECK(back.surface_energy0 == snap.surface_energy0);

  {
    std::ofstream cut(scratch("cut.bin"), std::ios::binary);
    cut << bytes.substr(0, bytes.size() - 8);
  }
  CHECK_THROWS_AS(read_snapshot(scratch("cut.bin").string()), IoError);
  {
    std::ofstream extra(scratch("extra.bin"), std::ios::binary);
    extra << bytes << 'x';
  }
  CHECK_THROWS_AS(read_snapshot(scratch("extra.bin").string()), IoError);
  CHECK_THROWS_AS(read_snapshot(scratch("missing.bin").string()), IoError);
}

TEST_CASE("CSV output") {
  json doc = small_doc();
  doc["stepping"]["T"] = 0.0;
  doc["output"] = {{"csv", scratch("t0.csv").string()}};
  const RunArtifacts art = execute(config_from_json(doc));
  const auto rows = read_csv(scratch("t0.csv").string());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].t == 0.0);

  std::ifstream in(scratch("t0.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,E_S,E_P,E,lambda,int_lambda_sq,mass,mass_deficit,mass_bound,sup_abs_phi,sup_xi,xi_pos_l1,xi_l1,"
        "mu_total,volume,dissipation,willmore_proxy");

  // full precision: values parse back exactly
  json longer = small_doc();
  longer["output"] = {{"csv", scratch("run.csv").string()}};
  const RunArtifacts run = execute(config_from_json(longer));
  const auto back = read_csv(scratch("run.csv").string());
  REQUIRE(back.size() == run.records().size());
  for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k].as_array() == run.records()[k].as_array());

  {
    std::ofstream bad(scratch("bad.csv"));
    bad << "t,E\n0,1\n";
  }
  CHECK_THROWS_AS(read_csv(scratch("bad.csv").string()), IoError);
}

TEST_CASE("identical configs give identical files") {
  json doc = small_doc();
  doc["diagnostics"] = {{"kernel_queries", {{{"y", {0.7, 0.5}}, {"s", 0.01}}}},
                        {"density", {{"centers", {{0.7, 0.5}}}, {"random", 2}, {"radii", {0.1}}}},
                        {"geometry_centers", {{0.5, 0.5}}}};
  for (const char* tag : {"a", "b"}) {
    doc["output"] = {{"csv", scratch(std::string("same_") + tag + ".csv").string()},
                     {"probes", scratch(std::string("same_") + tag + ".probes.csv").string()}};
    execute(config_from_json(doc));
  }
  CHECK(slurp(scratch("same_a.csv")) == slurp(scratch("same_b.csv")));
  CHECK(slurp(scratch("same_a.probes.csv")) == slurp(scratch("same_b.probes.csv")));
  const auto probes = read_probes(scratch("same_a.probes.csv").string());
  CHECK_FALSE(probes.empty());
}

TEST_CASE("execute records probes and snapshots") {
  json doc = small_doc();
  doc["output"] = {{"snapshot_times", {0.0, 0.001}}, {"snapshot_dir", scratch("snaps").string()}};
  doc["diagnostics"] = {{"kernel_queries", {{{"y", {0.7, 0.5}}, {"s", 0.01}}}}, {"geometry_centers", {{0.5, 0.5}}}};
  const RunArtifacts art = execute(config_from_json(doc));
  const auto kernel = art.probe_series("kernel", 0);
  CHECK(kernel.size() == art.records().size());
  CHECK(art.probe_series("radius_mean", 0).size() == art.records().size());
  CHECK(art.probe_series("int_lambda", 0).size() == art.records().size());
  std::size_t snaps = 0;
  for (const auto& w : art.written) snaps += w.find("snap_") != std::string::npos;
  CHECK(snaps == 2);
  const Snapshot first = read_snapshot((scratch("snaps") / "snap_t0.000000.bin").string());
  CHECK(first.t == 0.0);
  CHECK(first.m0 == art.m0);
}

TEST_CASE("invariant battery on a healthy run") {
  const RunArtifacts art = execute(config_from_json(small_doc()));
  CHECK(check_invariants(art).empty());
  CHECK(energy_identity_residual(art.records()) >= 0.0);
}

TEST_CASE("barrier profile g") {
  CHECK(check_barrier_g().empty());
  CHECK(barrier_g(0.0) == 0.0);
  for (double s : {0.1, 0.5, 0.99, 1.0, 2.5}) CHECK(barrier_g(s) == barrier_g(-s));
  for (double s : {1.0, 1.5, 7.0}) CHECK(barrier_g(s) == s - 0.5);
  for (int i = -300; i <= 300; ++i) {
    const double s = i / 100.0;
    CHECK(barrier_g_second(s) >= 0.0);
    CHECK(barrier_g_second(s) <= 2.0);
    CHECK(barrier_g(s) >= 0.0);
  }
  // derivatives join |s| - 1/2 smoothly at |s| = 1
  CHECK(barrier_g_prime(1.0 - 1e-12) == doctest::Approx(1.0));
  CHECK(barrier_g_second(1.0 - 1e-12) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("barrier test on a short run") {
  json doc = scenario_document("barrier");
  const json section = doc["barrier"];
  doc.erase("barrier");
  doc["grid"]["n"] = 128;
  doc["model"]["eps"] = 0.04;
  doc["clamp_width"] = 0.4;
  doc["stepping"]["T"] = 0.001;
  BarrierSpec spec{section["gamma"].get<double>(), section["delta"].get<double>()};
  const BarrierReport rep = barrier_test(config_from_json(doc), spec);
  CHECK(rep.precondition_holds);
  REQUIRE_FALSE(rep.margins.empty());
  CHECK(rep.margins.front() >= 0.0);
  CHECK(rep.passed());
}

TEST_CASE("sweeps") {
  const json base = small_doc();
  const auto only = sweep(base, "model.eps", {});
  REQUIRE(only.size() == 1);
  CHECK(only[0].value == "base");
  CHECK(only[0].ok);

  const auto rows = sweep(base, "model.eps", {"0.1", "0.09", "2.0"}, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].value == "0.1");
  CHECK(rows[1].value == "0.09");
  CHECK(rows[0].ok);
  CHECK(rows[1].ok);
  CHECK_FALSE(rows[2].ok);
  CHECK_FALSE(rows[2].error.empty());
  // concurrency does not change a run
  CHECK(rows[0].E_T == only[0].E_T);
  CHECK(rows[0].int_lambda_sq_T == only[0].int_lambda_sq_T);

  write_sweep_csv(scratch("sweep.csv").string(), "model.eps", rows);
  std::ifstream in(scratch("sweep.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 4);
}

TEST_CASE("dt-halving shows a first-order energy residual") {
  json base = small_doc();
  base["stepping"]["T"] = 0.01;
  const auto rows = sweep(base, "stepping.safety", {"0.2", "0.1", "0.05"});
  for (const auto& r : rows) REQUIRE(r.ok);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].energy_residual < rows[k - 1].energy_residual);
    const double order = std::log2(rows[k - 1].energy_residual / rows[k].energy_residual);
    CHECK(order >= 0.8);
    CHECK(order <= 1.2);
  }
}

TEST_CASE("plots") {
  const RunArtifacts art = execute(config_from_json(small_doc()));
  const fs::path dir = scratch("plots");
  fs::create_directories(dir);
  const auto files = plot_records(art.records(), dir.string(), "small");
  CHECK(files.size() == 16);
  for (const auto& f : files) {
    const std::string svg = slurp(f);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
  }
  CHECK(svg_time_series("flat", {0.0, 1.0}, {2.0, 2.0}).find("</svg>") != std::string::npos);
}

TEST_CASE("scenario registry") {
  const auto& names = scenario_names();
  CHECK(names == std::vector<std::string>{"stationary-disk", "two-disks", "dumbbell", "slab-1d", "rs-comparison", "barrier"});
  CHECK_THROWS_AS(scenario_document("sphere"), std::invalid_argument);
  CHECK_THROWS_AS(run_scenario("sphere", {}, ""), std::invalid_argument);
  CHECK(scenario_document("barrier").contains("barrier"));
}

TEST_CASE("slab scenario") {
  const ScenarioReport rep = run_scenario("slab-1d", {"stepping.T=0.002"}, scratch("scenario").string());
  CHECK(rep.failures.empty());
  CHECK(rep.exit_code() == 0);
  REQUIRE(rep.runs.size() == 1);
  CHECK(fs::exists(scratch("scenario") / "slab-1d.csv"));
}
