#include "vpac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "vpac/errors.hpp"

namespace vpac {

using nlohmann::json;

namespace {

class Reader {
 public:
  std::vector<ConfigViolation> violations;

  void fail(const std::string& path, const std::string& constraint) {
    violations.push_back({path, constraint});
  }

  // Flags keys of `obj` outside `known`.
  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
      fail(path, "must be an object");
      return;
    }
    std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) fail(join(path, it.key()), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  const json* child(const json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  void number(const json& obj, const std::string& path, const char* key, double& out) {
    if (const json* v = child(obj, key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(join(path, key), "must be a number");
      }
    }
  }

  void integer(const json& obj, const std::string& path, const char* key, int& out) {
    if (const json* v = child(obj, key)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        fail(join(path, key), "must be an integer");
      }
    }
  }

  void text(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (const json* v = child(obj, key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(join(path, key), "must be a string");
      }
    }
  }

  void boolean(const json& obj, const std::string& path, const char* key, bool& out) {
    if (const json* v = child(obj, key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(join(path, key), "must be true or false");
      }
    }
  }

  std::optional<Point> point(const json& v, const std::string& path, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
      fail(path, "must be an array of " + std::to_string(dim) + " numbers");
      return std::nullopt;
    }
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      if (!v[a].is_number()) {
        fail(path, "must be an array of " + std::to_string(dim) + " numbers");
        return std::nullopt;
      }
      p[a] = v[a].get<double>();
    }
    return p;
  }

  std::vector<Point> points(const json& v, const std::string& path, int dim) {
    std::vector<Point> out;
    if (!v.is_array()) {
      fail(path, "must be an array of points");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (auto p = point(v[i], path + "[" + std::to_string(i) + "]", dim)) out.push_back(*p);
    }
    return out;
  }

  std::vector<double> numbers(const json& v, const std::string& path) {
    std::vector<double> out;
    if (!v.is_array()) {
      fail(path, "must be an array of numbers");
      return out;
    }
    for (const auto& x : v) {
      if (!x.is_number()) {
        fail(path, "must be an array of numbers");
        return {};
      }
      out.push_back(x.get<double>());
    }
    return out;
  }
};

std::optional<Shape> read_shape(Reader& r, const json& s, int dim) {
  const std::string path = "shape";
  if (!s.is_object()) {
    r.fail(path, "must be an object");
    return std::nullopt;
  }
  std::string type;
  r.text(s, path, "type", type);
  auto pt = [&](const char* key) -> std::optional<Point> {
    const json* v = r.child(s, key);
    if (!v) {
      r.fail(Reader::join(path, key), "required");
      return std::nullopt;
    }
    return r.point(*v, Reader::join(path, key), dim);
  };
  auto num = [&](const char* key) -> std::optional<double> {
    if (!r.child(s, key)) {
      r.fail(Reader::join(path, key), "required");
      return std::nullopt;
    }
    double v = 0.0;
    const std::size_t before = r.violations.size();
    r.number(s, path, key, v);
    if (r.violations.size() != before) return std::nullopt;
    return v;
  };

  if (type == "ball") {
    r.check_keys(s, path, {"type", "center", "radius"});
    auto c = pt("center");
    auto rad = num("radius");
    if (c && rad) return Ball{*c, *rad};
  } else if (type == "ball_union") {
    r.check_keys(s, path, {"type", "balls"});
    const json* balls = r.child(s, "balls");
    if (!balls || !balls->is_array()) {
      r.fail("shape.balls", "must be an array of {center, radius}");
      return std::nullopt;
    }
    BallUnion u;
    for (std::size_t i = 0; i < balls->size(); ++i) {
      const std::string bp = "shape.balls[" + std::to_string(i) + "]";
      const json& b = (*balls)[i];
      r.check_keys(b, bp, {"center", "radius"});
      const json* c = r.child(b, "center");
      double rad = 0.0;
      r.number(b, bp, "radius", rad);
      if (!c) {
        r.fail(bp + ".center", "required");
        continue;
      }
      if (auto p = r.point(*c, bp + ".center", dim)) u.balls.push_back({*p, rad});
    }
    return u;
  } else if (type == "ellipsoid") {
    r.check_keys(s, path, {"type", "center", "semi_axes"});
    auto c = pt("center");
    auto ax = pt("semi_axes");
    if (c && ax) return Ellipsoid{*c, *ax};
  } else if (type == "slab") {
    r.check_keys(s, path, {"type", "axis", "center", "half_width"});
    Slab slab;
    r.integer(s, path, "axis", slab.axis);
    r.number(s, path, "center", slab.center);
    auto hw = num("half_width");
    if (slab.axis < 0 || slab.axis >= dim) {
      r.fail("shape.axis", "must lie in [0, grid.dim)");
      return std::nullopt;
    }
    if (hw) {
      slab.half_width = *hw;
      return slab;
    }
  } else if (type == "dumbbell") {
    r.check_keys(s, path, {"type", "first", "second", "radius", "neck_radius"});
    auto a = pt("first");
    auto b = pt("second");
    auto rad = num("radius");
    auto neck = num("neck_radius");
    if (a && b && rad && neck) return Dumbbell{*a, *b, *rad, *neck};
  } else {
    r.fail("shape.type", "one of ball, ball_union, ellipsoid, slab, dumbbell");
  }
  return std::nullopt;
}

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

// Load-time checks that need the assembled config.
void check_semantics(Reader& r, const RunConfig& c, bool shape_ok) {
  if (c.dim < 1 || c.dim > 3) r.fail("grid.dim", "one of 1, 2, 3");
  bool grid_ok = false;
  if (c.n < 8) {
    r.fail("grid.n", ">= 8");
  } else if (c.dim >= 1 && c.dim <= 3) {
    try {
      Grid g(c.dim, c.n);
      grid_ok = true;
    } catch (const std::exception& e) {
      r.fail("grid.n", e.what());
    }
  }
  const bool eps_ok = c.eps > 0.0 && c.eps < 1.0;
  if (!eps_ok) r.fail("model.eps", "(0,1)");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) r.fail("model.alpha", "(0,1)");
  if (grid_ok && eps_ok && 1.0 / c.n > c.eps / 4.0) {
    std::ostringstream msg;
    msg << "h > eps/4 (h = " << 1.0 / c.n << ", eps/4 = " << c.eps / 4.0 << ")";
    r.fail("resolution", msg.str());
  }
  if (eps_ok && !(c.clamp_width >= 10.0 * c.eps)) r.fail("clamp_width", ">= 10*eps");
  if (shape_ok && c.dim >= 1 && c.dim <= 3) {
    try {
      validate_shape(c.shape, c.dim);
    } catch (const GeometryError& e) {
      r.fail("shape", e.what());
    }
  }
  if (!(c.safety > 0.0 && c.safety <= 1.0)) r.fail("stepping.safety", "(0,1]");
  if (!(c.T >= 0.0) || !std::isfinite(c.T)) r.fail("stepping.T", ">= 0");
  if (c.cadence < 1) r.fail("stepping.cadence", ">= 1");
  if (c.dt) {
    if (!(*c.dt > 0.0)) {
      r.fail("stepping.dt", "> 0");
    } else if (grid_ok && eps_ok && c.safety > 0.0 && c.safety <= 1.0) {
      const double limit = stable_dt(Grid(c.dim, c.n), c.eps, c.safety);
      if (*c.dt > limit * (1.0 + 1e-12)) r.fail("stepping.dt", "<= safety*min(h^2/(2d), eps^2/4)");
    }
  }
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0 && t <= c.T)) r.fail("output.snapshot_times", "each in [0, T]");
  }
  if (!c.snapshot_times.empty() && c.snapshot_dir.empty()) {
    r.fail("output.snapshot_dir", "required when snapshot_times is set");
  }
  for (std::size_t i = 0; i < c.kernel_queries.size(); ++i) {
    if (!(c.kernel_queries[i].s > 0.0)) {
      r.fail("diagnostics.kernel_queries[" + std::to_string(i) + "].s", "> 0");
    }
  }
  for (double rad : c.density.radii) {
    if (!(rad > 0.0 && rad < 0.5)) r.fail("diagnostics.density.radii", "each in (0, 0.5)");
  }
  for (double m : c.density.eps_multiples) {
    if (!(m > 0.0 && m * c.eps < 0.5)) r.fail("diagnostics.density.eps_multiples", "each with 0 < m*eps < 0.5");
  }
  if (c.density.random < 0) r.fail("diagnostics.density.random", ">= 0");
  if (!c.geometry_centers.empty() && c.dim == 1) {
    r.fail("diagnostics.geometry_centers", "needs grid.dim 2 or 3");
  }
  if (c.test_field.enabled && (c.test_field.axis < 0 || c.test_field.axis >= c.dim)) {
    r.fail("diagnostics.test_field.axis", "must lie in [0, grid.dim)");
  }
}

}  // namespace

double RunConfig::time_step() const { return dt ? *dt : stable_dt(grid(), eps, safety); }

RunConfig config_from_json(const json& doc) {
  Reader r;
  RunConfig c;
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  r.check_keys(doc, "", {"grid", "model", "shape", "clamp_width", "stepping", "output", "diagnostics"});

  if (const json* g = r.child(doc, "grid")) {
    r.check_keys(*g, "grid", {"dim", "n"});
    r.integer(*g, "grid", "dim", c.dim);
    r.integer(*g, "grid", "n", c.n);
  }
  const int dim = c.dim >= 1 && c.dim <= 3 ? c.dim : 3;

  if (const json* m = r.child(doc, "model")) {
    r.check_keys(*m, "model", {"kind", "eps", "alpha"});
    std::string kind = std::string(to_string(c.kind));
    r.text(*m, "model", "kind", kind);
    try {
      c.kind = parse_model_kind(kind);
    } catch (const std::invalid_argument&) {
      r.fail("model.kind", "one of takasao, rubinstein-sternberg, rs");
    }
    r.number(*m, "model", "eps", c.eps);
    r.number(*m, "model", "alpha", c.alpha);
  }

  bool shape_ok = true;
  if (const json* s = r.child(doc, "shape")) {
    if (auto shape = read_shape(r, *s, dim)) {
      c.shape = *shape;
    } else {
      shape_ok = false;
    }
  } else {
    Ball centred;
    centred.radius = 0.2;
    for (int a = 0; a < 3; ++a) centred.center[a] = a < dim ? 0.5 : 0.0;
    c.shape = centred;
    if (dim == 1) c.shape = Slab{0, 0.5, 0.25};
  }

  c.clamp_width = default_clamp_width(c.eps > 0.0 ? c.eps : 0.0);
  r.number(doc, "", "clamp_width", c.clamp_width);

  if (const json* s = r.child(doc, "stepping")) {
    r.check_keys(*s, "stepping", {"scheme", "safety", "T", "cadence", "dt", "track_step_energy"});
    std::string scheme = "euler";
    r.text(*s, "stepping", "scheme", scheme);
    if (scheme == "euler") {
      c.scheme = Scheme::ExplicitEuler;
    } else if (scheme == "rk4") {
      c.scheme = Scheme::RK4Oracle;
    } else {
      r.fail("stepping.scheme", "one of euler, rk4");
    }
    r.number(*s, "stepping", "safety", c.safety);
    r.number(*s, "stepping", "T", c.T);
    r.integer(*s, "stepping", "cadence", c.cadence);
    if (r.child(*s, "dt")) {
      double dt = 0.0;
      r.number(*s, "stepping", "dt", dt);
      c.dt = dt;
    }
    r.boolean(*s, "stepping", "track_step_energy", c.track_step_energy);
  }

  if (const json* o = r.child(doc, "output")) {
    r.check_keys(*o, "output", {"csv", "probes", "snapshot_times", "snapshot_dir"});
    r.text(*o, "output", "csv", c.csv_path);
    r.text(*o, "output", "probes", c.probes_path);
    if (const json* t = r.child(*o, "snapshot_times")) c.snapshot_times = r.numbers(*t, "output.snapshot_times");
    r.text(*o, "output", "snapshot_dir", c.snapshot_dir);
  }

  if (const json* d = r.child(doc, "diagnostics")) {
    r.check_keys(*d, "diagnostics", {"kernel_queries", "density", "geometry_centers", "test_field"});
    if (const json* k = r.child(*d, "kernel_queries")) {
      if (!k->is_array()) {
        r.fail("diagnostics.kernel_queries", "must be an array of {y, s}");
      } else {
        for (std::size_t i = 0; i < k->size(); ++i) {
          const std::string kp = "diagnostics.kernel_queries[" + std::to_string(i) + "]";
          const json& q = (*k)[i];
          r.check_keys(q, kp, {"y", "s"});
          KernelSpec spec;
          r.number(q, kp, "s", spec.s);
          if (const json* y = r.child(q, "y")) {
            if (auto p = r.point(*y, kp + ".y", dim)) spec.y = *p;
          } else {
            r.fail(kp + ".y", "required");
          }
          c.kernel_queries.push_back(spec);
        }
      }
    }
    if (const json* ds = r.child(*d, "density")) {
      const std::string dp = "diagnostics.density";
      r.check_keys(*ds, dp, {"centers", "random", "seed", "radii", "eps_multiples"});
      if (const json* cs = r.child(*ds, "centers")) c.density.centers = r.points(*cs, dp + ".centers", dim);
      r.integer(*ds, dp, "random", c.density.random);
      if (const json* seed = r.child(*ds, "seed")) {
        if (seed->is_number_integer() && seed->get<std::int64_t>() >= 0) {
          c.density.seed = seed->get<std::uint64_t>();
        } else {
          r.fail(dp + ".seed", "must be a nonnegative integer");
        }
      }
      if (const json* rs = r.child(*ds, "radii")) c.density.radii = r.numbers(*rs, dp + ".radii");
      if (const json* em = r.child(*ds, "eps_multiples")) {
        c.density.eps_multiples = r.numbers(*em, dp + ".eps_multiples");
      }
    }
    if (const json* gc = r.child(*d, "geometry_centers")) {
      c.geometry_centers = r.points(*gc, "diagnostics.geometry_centers", dim);
    }
    if (const json* tf = r.child(*d, "test_field")) {
      const std::string tp = "diagnostics.test_field";
      r.check_keys(*tf, tp, {"axis", "wavenumber", "amplitude", "phase"});
      c.test_field.enabled = true;
      r.integer(*tf, tp, "axis", c.test_field.axis);
      r.number(*tf, tp, "amplitude", c.test_field.amplitude);
      r.number(*tf, tp, "phase", c.test_field.phase);
      if (const json* k = r.child(*tf, "wavenumber")) {
        if (!k->is_array() || static_cast<int>(k->size()) != dim ||
            !std::all_of(k->begin(), k->end(), [](const json& v) { return v.is_number_integer(); })) {
          r.fail(tp + ".wavenumber", "must be an array of " + std::to_string(dim) + " integers");
        } else {
          c.test_field.wavenumber = {0, 0, 0};
          for (int a = 0; a < dim; ++a) c.test_field.wavenumber[a] = (*k)[a].get<int>();
        }
      }
    }
  }

  check_semantics(r, c, shape_ok);
  if (!r.violations.empty()) throw ConfigError(std::move(r.violations));
  return c;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open configuration");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& cfg) { config_from_json(config_to_json(cfg)); }

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like key.path=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError(key, "path crosses a non-object value");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

json shape_to_json(const Shape& shape, int dim) {
  struct Visitor {
    int dim;
    json operator()(const Ball& b) const {
      return {{"type", "ball"}, {"center", point_json(b.center, dim)}, {"radius", b.radius}};
    }
    json operator()(const BallUnion& u) const {
      json balls = json::array();
      for (const auto& b : u.balls) balls.push_back({{"center", point_json(b.center, dim)}, {"radius", b.radius}});
      return {{"type", "ball_union"}, {"balls", balls}};
    }
    json operator()(const Ellipsoid& e) const {
      return {{"type", "ellipsoid"}, {"center", point_json(e.center, dim)}, {"semi_axes", point_json(e.semi_axes, dim)}};
    }
    json operator()(const Slab& s) const {
      return {{"type", "slab"}, {"axis", s.axis}, {"center", s.center}, {"half_width", s.half_width}};
    }
    json operator()(const Dumbbell& d) const {
      return {{"type", "dumbbell"},
              {"first", point_json(d.first, dim)},
              {"second", point_json(d.second, dim)},
              {"radius", d.radius},
              {"neck_radius", d.neck_radius}};
    }
  };
  return std::visit(Visitor{dim}, shape);
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["grid"] = {{"dim", c.dim}, {"n", c.n}};
  doc["model"] = {{"kind", std::string(to_string(c.kind))}, {"eps", c.eps}, {"alpha", c.alpha}};
  doc["shape"] = shape_to_json(c.shape, c.dim);
  doc["clamp_width"] = c.clamp_width;
  doc["stepping"] = {{"scheme", c.scheme == Scheme::ExplicitEuler ? "euler" : "rk4"},
                     {"safety", c.safety},
                     {"T", c.T},
                     {"cadence", c.cadence},
                     {"track_step_energy", c.track_step_energy}};
  if (c.dt) doc["stepping"]["dt"] = *c.dt;
  doc["output"] = {{"csv", c.csv_path},
                   {"probes", c.probes_path},
                   {"snapshot_times", c.snapshot_times},
                   {"snapshot_dir", c.snapshot_dir}};
  json diag = json::object();
  json kq = json::array();
  for (const auto& q : c.kernel_queries) kq.push_back({{"y", point_json(q.y, c.dim)}, {"s", q.s}});
  diag["kernel_queries"] = kq;
  json centers = json::array();
  for (const auto& p : c.density.centers) centers.push_back(point_json(p, c.dim));
  diag["density"] = {{"centers", centers},
                     {"random", c.density.random},
                     {"seed", c.density.seed},
                     {"radii", c.density.radii},
                     {"eps_multiples", c.density.eps_multiples}};
  json gc = json::array();
  for (const auto& p : c.geometry_centers) gc.push_back(point_json(p, c.dim));
  diag["geometry_centers"] = gc;
  if (c.test_field.enabled) {
    json k = json::array();
    for (int a = 0; a < c.dim; ++a) k.push_back(c.test_field.wavenumber[a]);
    diag["test_field"] = {{"axis", c.test_field.axis},
                          {"wavenumber", k},
                          {"amplitude", c.test_field.amplitude},
                          {"phase", c.test_field.phase}};
  }
  doc["diagnostics"] = diag;
  return doc;
}

ScalarField make_test_field_component(const TestFieldSpec& spec, const Grid& grid, int axis) {
  if (axis != spec.axis) return ScalarField(grid);
  return sample(grid, [&](const Point& x) {
    double arg = spec.phase;
    for (int a = 0; a < grid.dim(); ++a) arg += 2.0 * std::numbers::pi * spec.wavenumber[a] * x[a];
    return spec.amplitude * std::sin(arg);
  });
}

VectorField make_test_field(const TestFieldSpec& spec, const Grid& grid) {
  VectorField out(grid);
  for (int a = 0; a < grid.dim(); ++a) out[a] = make_test_field_component(spec, grid, a);
  return out;
}

std::vector<double> DensitySpec::all_radii(double eps) const {
  std::vector<double> out;
  for (double m : eps_multiples) out.push_back(m * eps);
  out.insert(out.end(), radii.begin(), radii.end());
  return out;
}

std::vector<Point> density_centers(const DensitySpec& spec, int dim) {
  std::vector<Point> out = spec.centers;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < spec.random; ++i) {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) p[a] = unit(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace vpac
