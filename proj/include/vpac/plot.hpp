#pragma once

#include <string>
#include <vector>

#include "vpac/diagnostics.hpp"

namespace vpac {

/// Polyline chart of one series against t as a standalone SVG document.
std::string svg_time_series(const std::string& title, const std::vector<double>& t, const std::vector<double>& y);

/// Writes <out_dir>/<stem>.<column>.svg for every non-time column of the
/// records and returns the paths.
std::vector<std::string> plot_records(const std::vector<DiagnosticsRecord>& records, const std::string& out_dir,
                                      const std::string& stem);

}  // namespace vpac
