#include "vpac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "vpac/config.hpp"
#include "vpac/errors.hpp"
#include "vpac/io.hpp"
#include "vpac/scenario.hpp"

namespace vpac {

using nlohmann::json;

namespace {

std::string with_suffix(const std::string& path, std::size_t index) {
  std::filesystem::path p(path);
  const std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + std::to_string(index) + ext;
}

void suffix_outputs(json& doc, std::size_t index) {
  if (!doc.contains("output")) return;
  json& out = doc["output"];
  for (const char* key : {"csv", "probes", "snapshot_dir"}) {
    if (out.contains(key) && out[key].is_string() && !out[key].get<std::string>().empty()) {
      out[key] = with_suffix(out[key].get<std::string>(), index);
    }
  }
}

SweepRow run_one(json doc, const std::string& label) {
  SweepRow row;
  row.value = label;
  try {
    const RunConfig cfg = config_from_json(doc);
    row.dt = cfg.time_step();
    const RunArtifacts art = execute(cfg);
    const auto& recs = art.records();
    row.steps = art.result.steps;
    row.E0 = recs.front().E;
    row.E_T = recs.back().E;
    row.int_lambda_sq_T = recs.back().int_lambda_sq;
    row.energy_residual = energy_identity_residual(recs);
    for (const auto& r : recs) {
      if (r.mass_bound > 0.0) row.max_deficit_ratio = std::max(row.max_deficit_ratio, r.mass_deficit / r.mass_bound);
      row.max_sup_abs_phi = std::max(row.max_sup_abs_phi, r.sup_abs_phi);
      row.max_xi_pos_l1 = std::max(row.max_xi_pos_l1, r.xi_pos_l1);
      row.max_lambda = std::max(row.max_lambda, std::abs(r.lambda));
    }
    row.invariant_failures = static_cast<int>(check_invariants(art).size());
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const json& base, const std::string& key, const std::vector<std::string>& values,
                            int jobs) {
  std::vector<std::pair<json, std::string>> plan;
  if (values.empty()) {
    plan.emplace_back(base, "base");
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      json doc = base;
      apply_override(doc, key + "=" + values[i]);
      suffix_outputs(doc, i);
      plan.emplace_back(std::move(doc), values[i]);
    }
  }

  std::vector<SweepRow> rows(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) rows[i] = run_one(plan[i].first, plan[i].second);
  };
  const int nthreads = std::clamp(jobs, 1, static_cast<int>(plan.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

void write_sweep_csv(const std::string& path, const std::string& key, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  out << (key.empty() ? "value" : key)
      << ",ok,dt,steps,E0,E_T,int_lambda_sq_T,energy_residual,max_deficit_ratio,max_sup_abs_phi,"
         "max_xi_pos_l1,max_lambda,invariant_failures,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.value << ',' << (r.ok ? 1 : 0) << ',' << format_double(r.dt) << ',' << r.steps << ','
        << format_double(r.E0) << ',' << format_double(r.E_T) << ',' << format_double(r.int_lambda_sq_T) << ','
        << format_double(r.energy_residual) << ',' << format_double(r.max_deficit_ratio) << ','
        << format_double(r.max_sup_abs_phi) << ',' << format_double(r.max_xi_pos_l1) << ','
        << format_double(r.max_lambda) << ',' << r.invariant_failures << ',' << err << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

}  // namespace vpac
