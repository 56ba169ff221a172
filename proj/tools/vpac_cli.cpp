// Command-line front end: run, scenario, sweep, diagnose, plot.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vpac/config.hpp"
#include "vpac/errors.hpp"
#include "vpac/io.hpp"
#include "vpac/plot.hpp"
#include "vpac/scenario.hpp"
#include "vpac/sweep.hpp"

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vpac::IoError(path, "cannot open configuration");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw vpac::ConfigError("", std::string("not valid JSON: ") + e.what());
  }
}

void print_summary(const vpac::RunArtifacts& art) {
  const auto& first = art.records().front();
  const auto& last = art.records().back();
  std::printf("steps %zu  dt %.4g  records %zu\n", art.result.steps, art.config.time_step(), art.records().size());
  std::printf("E     %.10g -> %.10g\n", first.E, last.E);
  std::printf("mass deficit %.4g (bound %.4g)  lambda %.4g  int lambda^2 %.4g\n", last.mass_deficit,
              last.mass_bound, last.lambda, last.int_lambda_sq);
  std::printf("sup|phi| %.12g  volume %.8g\n", last.sup_abs_phi, last.volume);
  for (const auto& path : art.written) std::printf("wrote %s\n", path.c_str());
}

int report_failures(const std::vector<std::string>& failures) {
  for (const auto& f : failures) std::fprintf(stderr, "FAILED %s\n", f.c_str());
  return failures.empty() ? 0 : 1;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volume-preserving Allen-Cahn solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "run a configuration file");
  run_cmd->add_option("--config", config_path, "JSON configuration")->required();
  run_cmd->add_option("--override", overrides, "key.path=value, applied in order");

  std::string scenario_name;
  std::string out_dir = "out";
  std::vector<std::string> scenario_overrides;
  auto* scen_cmd = app.add_subcommand("scenario", "run a named scenario");
  scen_cmd->add_option("name", scenario_name, "scenario name")
      ->required()
      ->check(CLI::IsMember(vpac::scenario_names()));
  scen_cmd->add_option("overrides", scenario_overrides, "key.path=value");
  scen_cmd->add_option("--out", out_dir, "output directory");

  std::string axis;
  std::string summary_path = "sweep.csv";
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a configuration across values of one key");
  sweep_cmd->add_option("--config", config_path, "JSON configuration")->required();
  sweep_cmd->add_option("--axis", axis, "key.path=v1,v2,...")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", summary_path, "summary CSV");

  std::string snapshot_path;
  auto* diag_cmd = app.add_subcommand("diagnose", "recompute the diagnostics record of a snapshot");
  diag_cmd->add_option("--snapshot", snapshot_path, "snapshot file")->required()->check(CLI::ExistingFile);

  std::string csv_path;
  std::string plot_dir;
  auto* plot_cmd = app.add_subcommand("plot", "write SVG time series of a diagnostics CSV");
  plot_cmd->add_option("--csv", csv_path, "diagnostics CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_dir, "output directory (default: next to the CSV)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      json doc = read_json(config_path);
      for (const auto& o : overrides) vpac::apply_override(doc, o);
      const vpac::RunConfig cfg = vpac::config_from_json(doc);
      const vpac::RunArtifacts art = vpac::execute(cfg);
      print_summary(art);
      return report_failures(vpac::check_invariants(art));
    }
    if (*scen_cmd) {
      const vpac::ScenarioReport rep = vpac::run_scenario(scenario_name, scenario_overrides, out_dir);
      for (const auto& art : rep.runs) print_summary(art);
      if (rep.barrier) {
        std::printf("barrier margin min %.6g over %zu records\n", rep.barrier->min_margin, rep.barrier->margins.size());
      }
      return report_failures(rep.failures);
    }
    if (*sweep_cmd) {
      const auto eq = axis.find('=');
      if (eq == std::string::npos) throw vpac::ConfigError("--axis", "expected key=v1,v2,...");
      const std::string key = axis.substr(0, eq);
      const auto rows = vpac::sweep(read_json(config_path), key, split_list(axis.substr(eq + 1)), jobs);
      vpac::write_sweep_csv(summary_path, key, rows);
      int failed = 0;
      for (const auto& r : rows) {
        if (r.ok) {
          std::printf("%s=%s  E %.8g -> %.8g  int lambda^2 %.6g  residual %.3g\n", key.c_str(), r.value.c_str(), r.E0,
                      r.E_T, r.int_lambda_sq_T, r.energy_residual);
        } else {
          ++failed;
          std::fprintf(stderr, "%s=%s failed: %s\n", key.c_str(), r.value.c_str(), r.error.c_str());
        }
      }
      std::printf("wrote %s\n", summary_path.c_str());
      return failed ? 1 : 0;
    }
    if (*diag_cmd) {
      const vpac::Snapshot snap = vpac::read_snapshot(snapshot_path);
      const vpac::DiagnosticsRecord rec =
          vpac::compute_record(snap.phi, snap.params(), snap.t, 0.0, 0.0, snap.surface_energy0);
      const auto& names = vpac::DiagnosticsRecord::column_names();
      const auto values = rec.as_array();
      json out;
      for (std::size_t i = 0; i < names.size(); ++i) out[std::string(names[i])] = values[i];
      // Accumulated integrals are not stored in snapshots.
      out.erase("int_lambda_sq");
      out.erase("dissipation");
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*plot_cmd) {
      const std::filesystem::path csv(csv_path);
      const std::string dir = plot_dir.empty() ? csv.parent_path().string() : plot_dir;
      for (const auto& p : vpac::plot_records(vpac::read_csv(csv_path), dir.empty() ? "." : dir, csv.stem().string())) {
        std::printf("wrote %s\n", p.c_str());
      }
      return 0;
    }
  } catch (const vpac::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
