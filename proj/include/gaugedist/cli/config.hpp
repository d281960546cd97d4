#pragma once

// Job configuration for the gaugedist tool. One JSON document; unknown keys are
// errors, and every error names the offending field.

#include "gaugedist/boundary.hpp"
#include "gaugedist/grid.hpp"
#include "gaugedist/polytope.hpp"
#include "gaugedist/setups.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gaugedist::cli {

using json = nlohmann::json;

struct Outputs {
  std::string csv = "field.csv";
  std::string pgm;  // empty: not written
  std::string svg;
  std::string report = "report.txt";
  std::string table = "derivatives.csv";
};

struct VerifyConfig {
  int duality_samples = 10000;
  int grid_resolution = 101;
  int touch_queries = 100;
  int probes = 1000;
  int gradient_points = 200;
  int hessian_points = 50;
};

struct JobConfig {
  std::optional<SetupKind> setup;
  int dim = 0;
  std::optional<DualPolytope> polytope;
  std::optional<BoundaryShape> boundary;
  Method method = Method::closed_form;
  std::optional<Window> window;
  int nx = 101, ny = 101;
  int budget = 10000;
  std::uint64_t seed = 1;
  double h = 1e-5;
  Vector slice;
  std::vector<Vector> points;
  bool signed_field = false;
  SignConvention convention = SignConvention::reflected;
  Outputs outputs;
  VerifyConfig verify;

  /// The worked example, with the configured polytope where one applies.
  std::optional<Setup> make_setup() const {
    if (!setup) return std::nullopt;
    switch (*setup) {
      case SetupKind::parabola: return Setup::parabola();
      case SetupKind::sphere_polytope: return Setup::sphere_polytope(polytope ? *polytope : cube(dim));
      case SetupKind::ball_maxnorm: return Setup::ball_maxnorm(dim);
      case SetupKind::two_disks: return Setup::two_disks();
    }
    return std::nullopt;
  }
};

[[noreturn]] inline void config_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigError, where + ": " + what);
}

namespace detail {

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) config_error(where.empty() ? k : where + "." + k, "unknown key");
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) config_error(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(where, "not finite");
  return v;
}

inline int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) config_error(where, "expected an integer");
  return j.get<int>();
}

inline std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) config_error(where, "expected a string");
  return j.get<std::string>();
}

inline Vector vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) config_error(where, "expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline std::vector<Vector> vec_list(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where, "expected an array of points");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Side side_of(const json& j, const std::string& where) {
  const auto s = text(j, where);
  if (s == "interior") return Side::interior;
  if (s == "exterior") return Side::exterior;
  config_error(where, "expected \"interior\" or \"exterior\"");
}

inline json parse_document(const std::string& doc, const std::string& where) {
  try {
    return json::parse(doc);
  } catch (const json::parse_error& e) {
    // report a line number rather than a byte offset
    const std::size_t upto = std::min<std::size_t>(e.byte, doc.size());
    const long line = 1 + std::count(doc.begin(), doc.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    config_error(where + ":" + std::to_string(line), e.what());
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) config_error(p.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void check_dim(const std::vector<Vector>& pts, int n, const std::string& where) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].size() != n) config_error(where + "[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " coordinates");
}

}  // namespace detail

/// Polytope document: {"dim", "vertices", optional "polar_vertices"}.
inline DualPolytope parse_polytope(const json& j, const std::string& where) {
  detail::only_keys(j, where, {"dim", "vertices", "polar_vertices"});
  if (!j.contains("dim")) config_error(where + ".dim", "missing");
  if (!j.contains("vertices")) config_error(where + ".vertices", "missing");
  const int n = detail::integer(j["dim"], where + ".dim");
  const auto V = detail::vec_list(j["vertices"], where + ".vertices");
  detail::check_dim(V, n, where + ".vertices");
  try {
    if (j.contains("polar_vertices")) {
      const auto W = detail::vec_list(j["polar_vertices"], where + ".polar_vertices");
      detail::check_dim(W, n, where + ".polar_vertices");
      return build_dual_pair(V, W);
    }
    return build_polytope(V);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(where, e.what());
  }
}

inline DualPolytope load_polytope_file(const std::filesystem::path& p) {
  return parse_polytope(detail::parse_document(detail::read_file(p), p.string()), p.string());
}

/// Writes a polytope document that parse_polytope reads back.
inline std::string polytope_document(const DualPolytope& P) {
  json j;
  j["dim"] = P.dim();
  auto list = [](const std::vector<Vector>& pts) {
    json a = json::array();
    for (const auto& v : pts) a.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return a;
  };
  j["vertices"] = list(P.vertices());
  j["polar_vertices"] = list(P.polar_vertices());
  return j.dump(2);
}

inline BoundaryShape parse_boundary(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) config_error(where + ".kind", "missing");
  const auto kind = detail::text(j["kind"], where + ".kind");
  try {
    if (kind == "sphere") {
      detail::only_keys(j, where, {"kind", "center", "radius", "side"});
      if (!j.contains("center")) config_error(where + ".center", "missing");
      const Vector c = detail::vec(j["center"], where + ".center");
      const double r = j.contains("radius") ? detail::number(j["radius"], where + ".radius") : 1.0;
      const Side s = j.contains("side") ? detail::side_of(j["side"], where + ".side") : Side::interior;
      return BoundaryShape::sphere(c, r, s);
    }
    if (kind == "parabola") {
      detail::only_keys(j, where, {"kind", "side"});
      ParabolaSide s = ParabolaSide::above;
      if (j.contains("side")) {
        const auto t = detail::text(j["side"], where + ".side");
        if (t == "below") s = ParabolaSide::below;
        else if (t != "above") config_error(where + ".side", "expected \"above\" or \"below\"");
      }
      return BoundaryShape::parabola(s);
    }
    if (kind == "polygon") {
      detail::only_keys(j, where, {"kind", "loop", "side"});
      if (!j.contains("loop")) config_error(where + ".loop", "missing");
      const auto loop = detail::vec_list(j["loop"], where + ".loop");
      const Side s = j.contains("side") ? detail::side_of(j["side"], where + ".side") : Side::interior;
      return BoundaryShape::polygon(loop, s);
    }
    if (kind == "disk_union_exterior") {
      detail::only_keys(j, where, {"kind", "disks"});
      if (!j.contains("disks") || !j["disks"].is_array()) config_error(where + ".disks", "expected an array");
      std::vector<Disk> disks;
      for (std::size_t i = 0; i < j["disks"].size(); ++i) {
        const std::string w = where + ".disks[" + std::to_string(i) + "]";
        const auto& d = j["disks"][i];
        detail::only_keys(d, w, {"center", "radius"});
        if (!d.contains("center")) config_error(w + ".center", "missing");
        disks.push_back({detail::vec(d["center"], w + ".center"),
                         d.contains("radius") ? detail::number(d["radius"], w + ".radius") : 1.0});
      }
      return BoundaryShape::disk_union_exterior(disks);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(where, e.what());
  }
  config_error(where + ".kind", "unknown boundary kind \"" + kind + "\"");
}

/// Parses a job document. Relative polytope files resolve against `base_dir`.
inline JobConfig parse_config(const std::string& doc, const std::string& source = "config",
                              const std::filesystem::path& base_dir = {}) {
  const json j = detail::parse_document(doc, source);
  detail::only_keys(j, "", {"setup", "dim", "vertices", "polar_vertices", "polytope_file", "boundary", "method",
                            "window", "resolution", "budget", "seed", "h", "slice", "points", "signed",
                            "convention", "outputs", "verify"});
  JobConfig c;

  if (j.contains("setup")) {
    const auto s = detail::text(j["setup"], "setup");
    c.setup = setup_from_string(s);
    if (!c.setup) config_error("setup", "unknown setup \"" + s + "\"");
  }
  if (j.contains("dim")) {
    c.dim = detail::integer(j["dim"], "dim");
    if (c.dim < 2 || c.dim > 3) config_error("dim", "must be 2 or 3");
  }

  if (j.contains("vertices") && j.contains("polytope_file")) config_error("polytope_file", "conflicts with vertices");
  if (j.contains("polar_vertices") && !j.contains("vertices")) config_error("polar_vertices", "needs vertices");
  if (j.contains("vertices")) {
    json p = {{"dim", c.dim ? c.dim : (j["vertices"].is_array() && !j["vertices"].empty() ? static_cast<int>(j["vertices"][0].size()) : 0)},
              {"vertices", j["vertices"]}};
    if (j.contains("polar_vertices")) p["polar_vertices"] = j["polar_vertices"];
    c.polytope = parse_polytope(p, "polytope");
  } else if (j.contains("polytope_file")) {
    std::filesystem::path p = detail::text(j["polytope_file"], "polytope_file");
    if (p.is_relative()) p = base_dir / p;
    c.polytope = load_polytope_file(p);
  }
  if (c.polytope) {
    if (c.dim && c.dim != c.polytope->dim()) config_error("dim", "does not match the polytope");
    c.dim = c.polytope->dim();
  }
  if (!c.dim) c.dim = 2;

  if (j.contains("boundary")) {
    c.boundary = parse_boundary(j["boundary"], "boundary");
    if (c.boundary->dim() != c.dim) config_error("boundary", "dimension does not match dim");
  }

  if (c.setup) {
    if (c.boundary) config_error("boundary", "not allowed together with setup");
    const bool planar = *c.setup == SetupKind::parabola || *c.setup == SetupKind::two_disks;
    if (planar && c.dim != 2) config_error("dim", "setup is planar");
    if (*c.setup != SetupKind::sphere_polytope && c.polytope) config_error("vertices", "this setup fixes the max-norm cube");
    try {
      (void)c.make_setup();
    } catch (const Error& e) {
      config_error("setup", e.what());
    }
  } else {
    if (!c.polytope) config_error("vertices", "a polytope is required without setup");
    if (!c.boundary) config_error("boundary", "a boundary is required without setup");
    c.method = Method::oracle;
  }

  if (j.contains("method")) {
    const auto m = detail::text(j["method"], "method");
    if (m == "oracle") c.method = Method::oracle;
    else if (m == "closed_form") {
      if (!c.setup) config_error("method", "closed_form needs a setup");
      c.method = Method::closed_form;
    } else config_error("method", "expected \"oracle\" or \"closed_form\"");
  }

  if (j.contains("window")) {
    const auto& w = j["window"];
    detail::only_keys(w, "window", {"min", "max"});
    if (!w.contains("min") || !w.contains("max")) config_error("window", "needs min and max");
    Window win{detail::vec(w["min"], "window.min"), detail::vec(w["max"], "window.max")};
    try {
      check_grid_shape(win, 2, 2);
    } catch (const Error& e) {
      config_error("window", e.what());
    }
    c.window = win;
  } else if (auto s = c.make_setup()) {
    c.window = s->default_window();
  }

  if (j.contains("resolution")) {
    const auto& r = j["resolution"];
    if (r.is_array()) {
      if (r.size() != 2) config_error("resolution", "expected n or [nx, ny]");
      c.nx = detail::integer(r[0], "resolution[0]");
      c.ny = detail::integer(r[1], "resolution[1]");
    } else {
      c.nx = c.ny = detail::integer(r, "resolution");
    }
    if (c.nx < 2 || c.ny < 2) config_error("resolution", "must be at least 2 per axis");
  }
  if (j.contains("budget")) c.budget = detail::integer(j["budget"], "budget");
  if (c.budget < 100) config_error("budget", "must be at least 100");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_error("seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("h")) {
    c.h = detail::number(j["h"], "h");
    if (!(c.h > 0)) config_error("h", "must be positive");
  }

  if (j.contains("slice")) c.slice = detail::vec(j["slice"], "slice");
  else if (auto s = c.make_setup()) c.slice = s->default_slice();
  if (c.slice.size() != c.dim - 2) config_error("slice", "needs dim - 2 = " + std::to_string(c.dim - 2) + " coordinates");

  if (j.contains("points")) {
    c.points = detail::vec_list(j["points"], "points");
    detail::check_dim(c.points, c.dim, "points");
  }

  if (j.contains("signed")) {
    if (!j["signed"].is_boolean()) config_error("signed", "expected true or false");
    c.signed_field = j["signed"].get<bool>();
  }
  if (j.contains("convention")) {
    const auto s = detail::text(j["convention"], "convention");
    if (s == "reflected") c.convention = SignConvention::reflected;
    else if (s == "same_gauge") c.convention = SignConvention::same_gauge;
    else config_error("convention", "expected \"reflected\" or \"same_gauge\"");
  }

  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    detail::only_keys(o, "outputs", {"csv", "pgm", "svg", "report", "table"});
    auto get = [&](const char* k, std::string& dst) {
      if (o.contains(k)) dst = detail::text(o[k], std::string("outputs.") + k);
    };
    get("csv", c.outputs.csv);
    get("pgm", c.outputs.pgm);
    get("svg", c.outputs.svg);
    get("report", c.outputs.report);
    get("table", c.outputs.table);
  }

  if (j.contains("verify")) {
    const auto& v = j["verify"];
    detail::only_keys(v, "verify", {"duality_samples", "grid_resolution", "touch_queries", "probes",
                                    "gradient_points", "hessian_points"});
    auto get = [&](const char* k, int& dst, int lo) {
      if (!v.contains(k)) return;
      dst = detail::integer(v[k], std::string("verify.") + k);
      if (dst < lo) config_error(std::string("verify.") + k, "must be at least " + std::to_string(lo));
    };
    get("duality_samples", c.verify.duality_samples, 1);
    get("grid_resolution", c.verify.grid_resolution, 2);
    get("touch_queries", c.verify.touch_queries, 0);
    get("probes", c.verify.probes, 0);
    get("gradient_points", c.verify.gradient_points, 0);
    get("hessian_points", c.verify.hessian_points, 0);
  }
  return c;
}

inline JobConfig load_config(const std::filesystem::path& p) {
  return parse_config(detail::read_file(p), p.string(), p.parent_path());
}

}  // namespace gaugedist::cli
