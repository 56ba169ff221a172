#pragma once

// CSV time series and binary field snapshots.
//
// Snapshot layout: one line of JSON
//   {"dim":2,"n":256,"eps":...,"alpha":...,"kind":"takasao","t":...,"m0":...,
//    "surface_energy0":...,"count":65536}
// terminated by '\n', followed by `count` little-endian IEEE-754 doubles in
// row-major order.

#include <string>
#include <vector>

#include "vpac/diagnostics.hpp"
#include "vpac/field.hpp"
#include "vpac/model.hpp"

namespace vpac {

void write_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
/// Throws IoError if the header does not match the 17 record columns.
std::vector<DiagnosticsRecord> read_csv(const std::string& path);

/// Named scalar probes (kernel values, densities, radii, ...) in long format.
struct ProbeRow {
  double t = 0.0;
  std::string probe;
  int index = 0;
  double value = 0.0;
};

void write_probes(const std::string& path, const std::vector<ProbeRow>& rows);
std::vector<ProbeRow> read_probes(const std::string& path);

struct Snapshot {
  ModelKind kind = ModelKind::Takasao;
  double eps = 0.0;
  double alpha = 0.0;
  double t = 0.0;
  double m0 = 0.0;
  double surface_energy0 = 0.0;
  ScalarField phi;

  ModelParams params() const { return ModelParams(eps, alpha, kind, m0); }
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// Doubles are written with %.17g so they parse back to the same value.
std::string format_double(double v);

}  // namespace vpac
