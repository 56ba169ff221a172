#pragma once

// Run configuration: a JSON document with sections grid, model, shape,
// stepping, output and diagnostics. The schema is documented in README.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vpac/field.hpp"
#include "vpac/initial.hpp"
#include "vpac/model.hpp"
#include "vpac/stepper.hpp"

namespace vpac {

struct KernelSpec {
  Point y{};
  double s = 0.0;
};

/// Balls for the density-ratio cap: explicit centres plus `random` uniformly
/// drawn ones (seeded); radii given directly and as multiples of eps.
struct DensitySpec {
  std::vector<Point> centers;
  int random = 0;
  std::uint64_t seed = 1;
  std::vector<double> radii;
  std::vector<double> eps_multiples;

  bool enabled() const {
    return (!radii.empty() || !eps_multiples.empty()) && (!centers.empty() || random > 0);
  }
  std::vector<double> all_radii(double eps) const;
};

/// X = amplitude * sin(2 pi (k . x) + phase) e_axis.
struct TestFieldSpec {
  bool enabled = false;
  int axis = 0;
  std::array<int, 3> wavenumber{1, 0, 0};
  double amplitude = 1.0;
  double phase = 0.0;
};

struct RunConfig {
  int dim = 2;
  int n = 256;

  ModelKind kind = ModelKind::Takasao;
  double eps = 0.02;
  double alpha = ModelParams::kDefaultAlpha;

  Shape shape = Ball{{0.5, 0.5, 0.5}, 0.2};
  double clamp_width = 0.0;

  Scheme scheme = Scheme::ExplicitEuler;
  double safety = kDefaultSafety;
  double T = 0.05;
  int cadence = 100;
  std::optional<double> dt;  // defaults to stable_dt
  bool track_step_energy = false;

  std::string csv_path;
  std::string probes_path;
  std::vector<double> snapshot_times;
  std::string snapshot_dir;

  std::vector<KernelSpec> kernel_queries;
  DensitySpec density;
  std::vector<Point> geometry_centers;
  TestFieldSpec test_field;

  Grid grid() const { return Grid(dim, n); }
  double time_step() const;
};

/// Parses and validates; throws ConfigError listing every violation.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Reads `path` and parses it; IoError if unreadable.
RunConfig load_config(const std::string& path);

/// Applies "a.b.c=value" to `doc`. The value is parsed as JSON when possible,
/// otherwise taken as a string. Throws ConfigError on a malformed override.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Re-runs every load-time check on an already-built config.
void validate(const RunConfig& cfg);

nlohmann::json shape_to_json(const Shape& shape, int dim);

ScalarField make_test_field_component(const TestFieldSpec& spec, const Grid& grid, int axis);
VectorField make_test_field(const TestFieldSpec& spec, const Grid& grid);

/// Explicit centres followed by the seeded random ones.
std::vector<Point> density_centers(const DensitySpec& spec, int dim);

}  // namespace vpac
