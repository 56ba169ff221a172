#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace vpac {

struct SweepRow {
  std::string value;  // axis value as given ("base" for the unmodified run)
  bool ok = false;
  std::string error;
  double dt = 0.0;
  std::size_t steps = 0;
  double E0 = 0.0;
  double E_T = 0.0;
  double int_lambda_sq_T = 0.0;
  double energy_residual = 0.0;
  double max_deficit_ratio = 0.0;  // max over records of mass_deficit / mass_bound
  double max_sup_abs_phi = 0.0;
  double max_xi_pos_l1 = 0.0;
  double max_lambda = 0.0;
  int invariant_failures = 0;
};

/// Runs `base` once per value of the dotted `key` (the base alone if `values` is
/// empty) on up to `jobs` threads. Rows follow the order of `values`; a failed
/// run yields ok = false with its message. Output paths in `base` get a
/// per-run suffix so no two runs write the same file.
std::vector<SweepRow> sweep(const nlohmann::json& base, const std::string& key,
                            const std::vector<std::string>& values, int jobs = 1);

void write_sweep_csv(const std::string& path, const std::string& key, const std::vector<SweepRow>& rows);

}  // namespace vpac
