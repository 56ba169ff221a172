#include "vpac/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vpac/errors.hpp"

namespace vpac {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw IoError(path, "line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
  return v;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError(path, "cannot open for reading");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  auto out = open_out(path);
  const auto& names = DiagnosticsRecord::column_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (const auto& r : records) {
    const auto row = r.as_array();
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

std::vector<DiagnosticsRecord> read_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "empty file");
  const auto header = split(line, ',');
  const auto& names = DiagnosticsRecord::column_names();
  if (header.size() != names.size() || !std::equal(header.begin(), header.end(), names.begin())) {
    throw IoError(path, "unexpected CSV header");
  }
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != names.size()) {
      throw IoError(path, "line " + std::to_string(lineno) + ": expected " + std::to_string(names.size()) + " fields");
    }
    std::array<double, DiagnosticsRecord::kColumns> v{};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_double(cells[i], path, lineno);
    out.push_back(DiagnosticsRecord::from_array(v));
  }
  return out;
}

void write_probes(const std::string& path, const std::vector<ProbeRow>& rows) {
  auto out = open_out(path);
  out << "t,probe,index,value\n";
  for (const auto& r : rows) out << format_double(r.t) << ',' << r.probe << ',' << r.index << ',' << format_double(r.value) << '\n';
  if (!out) throw IoError(path, "write failed");
}

std::vector<ProbeRow> read_probes(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "t,probe,index,value") throw IoError(path, "unexpected probe header");
  std::vector<ProbeRow> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 4) throw IoError(path, "line " + std::to_string(lineno) + ": expected 4 fields");
    out.push_back({parse_double(cells[0], path, lineno), cells[1],
                   static_cast<int>(parse_double(cells[2], path, lineno)), parse_double(cells[3], path, lineno)});
  }
  return out;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const Grid& g = snap.phi.grid();
  nlohmann::json header = {{"dim", g.dim()},
                           {"n", g.n()},
                           {"eps", snap.eps},
                           {"alpha", snap.alpha},
                           {"kind", std::string(to_string(snap.kind))},
                           {"t", snap.t},
                           {"m0", snap.m0},
                           {"surface_energy0", snap.surface_energy0},
                           {"count", g.size()}};
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << header.dump() << '\n';
  std::vector<unsigned char> bytes(g.size() * 8);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(snap.phi[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path, "write failed");
}

Snapshot read_snapshot(const std::string& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "missing snapshot header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path, std::string("malformed snapshot header: ") + e.what());
  }
  Snapshot snap{ModelKind::Takasao, 0.0, 0.0, 0.0, 0.0, 0.0, ScalarField(Grid(1, 8))};
  std::size_t count = 0;
  int dim = 0, n = 0;
  try {
    dim = header.at("dim").get<int>();
    n = header.at("n").get<int>();
    snap.eps = header.at("eps").get<double>();
    snap.alpha = header.at("alpha").get<double>();
    snap.kind = parse_model_kind(header.at("kind").get<std::string>());
    snap.t = header.at("t").get<double>();
    snap.m0 = header.at("m0").get<double>();
    snap.surface_energy0 = header.value("surface_energy0", 0.0);
    count = header.at("count").get<std::size_t>();
  } catch (const std::exception& e) {
    throw IoError(path, std::string("bad snapshot header: ") + e.what());
  }
  Grid g = [&] {
    try {
      return Grid(dim, n);
    } catch (const std::exception& e) {
      throw IoError(path, e.what());
    }
  }();
  if (count != g.size()) throw IoError(path, "header count does not match n^dim");
  std::vector<unsigned char> bytes(count * 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw IoError(path, "truncated payload");
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path, "trailing bytes after payload");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  snap.phi = ScalarField(g, std::move(values));
  return snap;
}

}  // namespace vpac
