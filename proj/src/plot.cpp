#include "vpac/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "vpac/errors.hpp"

namespace vpac {

namespace {

constexpr double kWidth = 640, kHeight = 360, kLeft = 80, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> finite_range(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo <= 1e-300 + 1e-12 * std::abs(hi)) {
    const double pad = std::abs(hi) > 0 ? 0.5 * std::abs(hi) : 0.5;
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

}  // namespace

std::string svg_time_series(const std::string& title, const std::vector<double>& t, const std::vector<double>& y) {
  const auto [t0, t1] = finite_range(t);
  const auto [y0, y1] = finite_range(y);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - t0) / (t1 - t0) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << escape(title) << "</text>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const char* label = "font-family=\"sans-serif\" font-size=\"11\"";
  s << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\" " << label << ">" << num(y1)
    << "</text>\n";
  s << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + ph << "\" text-anchor=\"end\" " << label << ">" << num(y0)
    << "</text>\n";
  s << "<text x=\"" << kLeft << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\" " << label << ">"
    << num(t0) << "</text>\n";
  s << "<text x=\"" << kLeft + pw << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\" " << label << ">"
    << num(t1) << "</text>\n";
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\" " << label
    << ">t</text>\n";

  // Non-finite samples break the line into separate segments.
  std::string points;
  auto flush = [&] {
    if (!points.empty()) s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
    points.clear();
  };
  for (std::size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) {
      flush();
      continue;
    }
    if (!points.empty()) points += ' ';
    points += num(px(t[i])) + "," + num(py(y[i]));
  }
  flush();
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> plot_records(const std::vector<DiagnosticsRecord>& records, const std::string& out_dir,
                                      const std::string& stem) {
  std::filesystem::create_directories(out_dir);
  const auto& names = DiagnosticsRecord::column_names();
  std::vector<double> t;
  for (const auto& r : records) t.push_back(r.t);
  std::vector<std::string> paths;
  for (std::size_t c = 1; c < names.size(); ++c) {
    std::vector<double> y;
    for (const auto& r : records) y.push_back(r.as_array()[c]);
    const std::string path = (std::filesystem::path(out_dir) / (stem + "." + std::string(names[c]) + ".svg")).string();
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << svg_time_series(std::string(names[c]), t, y);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace vpac
