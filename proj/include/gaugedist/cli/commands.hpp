#pragma once

// The tool's subcommands. Each returns the process exit status.

#include "gaugedist/cli/config.hpp"
#include "gaugedist/cli/export.hpp"
#include "gaugedist/grid.hpp"
#include "gaugedist/regularity.hpp"
#include "gaugedist/verify.hpp"

#include <filesystem>
#include <memory>
#include <ostream>

namespace gaugedist::cli {

enum ExitStatus { exit_ok = 0, exit_verification_failed = 1, exit_config_error = 2 };

struct Context {
  std::filesystem::path out_dir = ".";
  std::ostream* log = nullptr;
};

inline std::filesystem::path output_path(const Context& ctx, const std::string& name) {
  const std::filesystem::path p(name);
  return p.is_absolute() ? p : ctx.out_dir / p;
}

/// Creates the output directory and makes sure files can be written there.
inline void check_writable(const Context& ctx, const std::vector<std::string>& names) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) config_error("--out", ctx.out_dir.string() + ": " + ec.message());
  for (const auto& n : names) {
    if (n.empty()) continue;
    const auto p = output_path(ctx, n);
    const bool existed = std::filesystem::exists(p);
    std::ofstream probe(p, std::ios::app);
    if (!probe) config_error("outputs", p.string() + ": not writable");
    probe.close();
    if (!existed) std::filesystem::remove(p);
  }
}

/// The distance function a job evaluates, with what it needs kept alive.
struct Field {
  DistanceFn rho;
  DomainFn domain;
  std::optional<Setup> setup;
  std::shared_ptr<const DualPolytope> P;
  std::shared_ptr<const BoundaryShape> B;
  std::shared_ptr<const Oracle> oracle, oracle_outside;
};

namespace detail {

inline DistanceResult negate(DistanceResult r) {
  r.value = -r.value;
  r.region.branch = "complement:" + r.region.branch;
  return r;
}

}  // namespace detail

inline Field make_field(const JobConfig& c) {
  Field f;
  f.setup = c.make_setup();
  f.P = std::make_shared<const DualPolytope>(f.setup ? f.setup->polytope() : *c.polytope);
  f.B = std::make_shared<const BoundaryShape>(f.setup ? f.setup->boundary() : *c.boundary);
  const bool closed = c.method == Method::closed_form;
  if (!closed) f.oracle = std::make_shared<const Oracle>(*f.P, *f.B, c.budget);

  DistanceFn inside;
  if (closed) {
    const Setup s = *f.setup;
    inside = [s](const Vector& x) { return s.closed_form(x); };
  } else {
    inside = [o = f.oracle](const Vector& x) { return o->evaluate(x); };
  }

  if (!c.signed_field) {
    f.rho = inside;
    if (f.setup) f.domain = [s = *f.setup](const Vector& x) { return s.in_domain(x); };
    else f.domain = [B = f.B](const Vector& x) { return region_membership(*B, x) != Membership::outside; };
    return f;
  }

  // signed: rho on the closure of U, minus the distance from the complement
  DistanceFn outside;
  const bool reflect = c.convention == SignConvention::reflected;
  if (closed) {
    const Setup s = *f.setup;
    switch (s.kind()) {
      case SetupKind::sphere_polytope: {
        auto Q = std::make_shared<const DualPolytope>(reflect ? reflected(s.polytope()) : s.polytope());
        outside = [Q](const Vector& x) { return rho_sphere_polytope(*Q, x); };
        break;
      }
      case SetupKind::parabola:
      case SetupKind::ball_maxnorm: outside = inside; break;  // symmetric cube
      case SetupKind::two_disks: config_error("signed", "no closed form inside the disks; use method \"oracle\"");
    }
  } else {
    f.oracle_outside = std::make_shared<const Oracle>(reflect ? reflected(*f.P) : *f.P, *f.B, c.budget);
    outside = [o = f.oracle_outside](const Vector& x) { return o->evaluate(x); };
  }
  f.rho = [B = f.B, inside, outside](const Vector& x) {
    if (region_membership(*B, x) != Membership::outside) return inside(x);
    return detail::negate(outside(x));
  };
  return f;
}

inline FieldGrid field_grid(const JobConfig& c, const Field& f) {
  if (!c.window) fail(ErrorCode::WindowRequired, "window is required");
  return evaluate_grid(f.rho, *c.window, c.nx, c.ny, c.slice, f.domain);
}

inline int cmd_distfield(const JobConfig& c, const Context& ctx) {
  if (!c.window) config_error("window", "required for distfield");
  check_writable(ctx, {c.outputs.csv, c.outputs.pgm, c.outputs.svg});
  const Field f = make_field(c);
  const FieldGrid g = field_grid(c, f);
  write_file(output_path(ctx, c.outputs.csv).string(), field_csv(g));
  if (!c.outputs.pgm.empty()) write_file(output_path(ctx, c.outputs.pgm).string(), field_pgm(g));
  if (!c.outputs.svg.empty()) write_file(output_path(ctx, c.outputs.svg).string(), regions_svg(g));
  if (ctx.log) {
    *ctx.log << "grid " << g.nx << "x" << g.ny << ", " << g.labels.size() << " region labels:";
    for (const auto& l : g.labels) *ctx.log << " " << l;
    *ctx.log << "\n";
  }
  return exit_ok;
}

inline std::string report_text(const std::vector<Report>& reports, std::uint64_t seed) {
  std::string out = "seed " + std::to_string(seed) + "\n";
  long checks = 0;
  bool ok = true;
  for (const auto& r : reports) {
    out += "\n[" + r.title + "] " + (r.passed() ? "PASS" : "FAIL") + "  checks=" + std::to_string(r.total_checks()) + "\n";
    out += r.to_text();
    checks += r.total_checks();
    ok = ok && r.passed();
  }
  out += "\ntotal checks " + std::to_string(checks) + "\nresult " + (ok ? "PASS" : "FAIL") + "\n";
  return out;
}

inline int cmd_verify(const JobConfig& c, const Context& ctx) {
  check_writable(ctx, {c.outputs.report});
  DistanceOptions dopt;
  dopt.grid_resolution = c.verify.grid_resolution;
  dopt.budget = c.budget;
  dopt.touch_queries = c.verify.touch_queries;
  dopt.probes = c.verify.probes;
  std::vector<Report> reports;
  if (auto s = c.make_setup()) {
    RegularityOptions ropt;
    ropt.grad_points = c.verify.gradient_points;
    ropt.hessian_points = c.verify.hessian_points;
    reports = verify_suite(*s, c.seed, c.verify.duality_samples, dopt, ropt);
  } else {
    if (!c.window) config_error("window", "required for verify without setup");
    reports = verify_pair(*c.polytope, *c.boundary, *c.window, c.slice, c.seed, c.verify.duality_samples, dopt);
  }
  const std::string text = report_text(reports, c.seed);
  write_file(output_path(ctx, c.outputs.report).string(), text);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  if (ctx.log) {
    for (const auto& r : reports)
      *ctx.log << (r.passed() ? "PASS " : "FAIL ") << r.title << " (" << r.total_checks() << " checks)\n";
  }
  return ok ? exit_ok : exit_verification_failed;
}

/// One row of the derivative table.
struct DerivativeRow {
  Vector x;
  std::string status = "ok";  // an ErrorCode name, "boundary_limit" or "ok"
  std::optional<double> rho;
  std::optional<Vector> grad, grad_fd;
  std::optional<Matrix> hess, hess_fd;
  std::optional<double> hj;
  std::vector<Vector> closest;
};

inline DerivativeRow derivative_row(const JobConfig& c, const Field& f, const Vector& x) {
  DerivativeRow row;
  row.x = x;
  const ScalarField rho = [&](const Vector& p) { return f.rho(p).value; };
  try {
    if (f.domain && !f.domain(x)) fail(ErrorCode::OutsideDomain, format_vector(x));
    const auto res = f.rho(x);
    row.rho = res.value;
    row.closest = res.closest;
    const BoundaryShape B = f.setup ? f.setup->boundary_for(x) : *f.B;

    // On the boundary the derivatives are one-sided limits; D rho and D^2 rho
    // are constant along x + t z, so the differences are taken there.
    Vector probe = x;
    if (region_membership(B, x) == Membership::on_boundary) {
      row.status = "boundary_limit";
      const Vector nu = inward_normal(B, x);
      const Vector& z = f.P->vertices()[static_cast<std::size_t>(gaugedist::detail::unique_support_vertex(*f.P, nu))];
      probe = x + 1e-3 * z;
    }
    row.grad = grad_rho(*f.P, B, x, res);
    row.grad_fd = fd_gradient(rho, probe, c.h);
    row.hj = hj_residual(*f.P, rho, probe, c.h);
    try {
      row.hess = hessian_rho(*f.P, B, x, res);
      row.hess_fd = fd_hessian(rho, probe, std::max(c.h, 1e-4));
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
      row.hess_fd = fd_hessian(rho, probe, std::max(c.h, 1e-4));
    }
  } catch (const Error& e) {
    row.status = std::string(to_string(e.code()));
  }
  return row;
}

inline std::string derivative_table(const std::vector<DerivativeRow>& rows, int n) {
  std::string out;
  auto cols = [&](const std::string& base) {
    for (int i = 0; i < n; ++i) out += "," + base + std::to_string(i + 1);
  };
  auto mcols = [&](const std::string& base) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out += "," + base + std::to_string(i + 1) + std::to_string(j + 1);
  };
  for (int i = 0; i < n; ++i) out += (i ? ",x" : "x") + std::to_string(i + 1);
  out += ",status,rho";
  cols("grad");
  cols("grad_fd");
  mcols("hess");
  mcols("hess_fd");
  out += ",hj_residual,closest\n";

  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  for (const auto& r : rows) {
    for (int i = 0; i < n; ++i) out += (i ? "," : "") + fmt17(r.x[i]);
    out += "," + r.status + "," + opt(r.rho);
    for (const auto* v : {&r.grad, &r.grad_fd})
      for (int i = 0; i < n; ++i) out += "," + (*v ? fmt17((**v)[i]) : std::string());
    for (const auto* m : {&r.hess, &r.hess_fd})
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out += "," + (*m ? fmt17((**m)(i, j)) : std::string());
    out += "," + opt(r.hj) + ",";
    std::string cl;
    for (std::size_t k = 0; k < r.closest.size(); ++k) {
      if (k) cl += ";";
      for (int i = 0; i < n; ++i) cl += (i ? " " : "") + fmt17(r.closest[k][i]);
    }
    out += csv_quote(cl) + "\n";
  }
  return out;
}

inline int cmd_derivatives(const JobConfig& c, const std::vector<Vector>& points, const Context& ctx) {
  if (points.empty()) config_error("points", "no points given");
  check_writable(ctx, {c.outputs.table});
  const Field f = make_field(c);
  std::vector<DerivativeRow> rows;
  for (const auto& x : points) {
    if (x.size() != f.P->dim()) config_error("points", format_vector(x) + " has the wrong dimension");
    rows.push_back(derivative_row(c, f, x));
  }
  write_file(output_path(ctx, c.outputs.table).string(), derivative_table(rows, f.P->dim()));
  if (ctx.log)
    for (const auto& r : rows)
      *ctx.log << format_vector(r.x) << " " << r.status << (r.rho ? " rho=" + fmt17(*r.rho) : std::string()) << "\n";
  return exit_ok;
}

inline const DualPolytope& job_polytope(const JobConfig& c, std::optional<Setup>& keep) {
  keep = c.make_setup();
  if (keep) return keep->polytope();
  if (!c.polytope) config_error("vertices", "no polytope configured");
  return *c.polytope;
}

/// gamma_K(x), one value per line.
inline int cmd_gauge(const JobConfig& c, const std::vector<Vector>& points, std::ostream& out) {
  std::optional<Setup> keep;
  const auto& P = job_polytope(c, keep);
  if (points.empty()) config_error("--point", "no points given");
  for (const auto& x : points) {
    if (x.size() != P.dim()) config_error("--point", format_vector(x) + " has the wrong dimension");
    out << fmt17(gauge_value(P, x)) << "\n";
  }
  return exit_ok;
}

/// gamma_{K°}(x) = h_K(x), one value per line.
inline int cmd_polar(const JobConfig& c, const std::vector<Vector>& points, std::ostream& out) {
  std::optional<Setup> keep;
  const auto& P = job_polytope(c, keep);
  if (points.empty()) config_error("--point", "no points given");
  for (const auto& x : points) {
    if (x.size() != P.dim()) config_error("--point", format_vector(x) + " has the wrong dimension");
    out << fmt17(support_value(P, x)) << "\n";
  }
  return exit_ok;
}

/// "0.3,0.1" -> (0.3, 0.1)
inline Vector parse_point(const std::string& s) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    const std::string tok = s.substr(pos, end - pos);
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(tok, &used);
    } catch (const std::exception&) {
      config_error("--point", "\"" + s + "\" is not a comma-separated list of numbers");
    }
    if (used != tok.size() || !std::isfinite(d)) config_error("--point", "\"" + s + "\" is not a comma-separated list of numbers");
    v.push_back(d);
    pos = end + 1;
  }
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace gaugedist::cli
