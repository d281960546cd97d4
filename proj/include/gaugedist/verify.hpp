#pragma once

#include "gaugedist/duality.hpp"
#include "gaugedist/regularity.hpp"
#include "gaugedist/report.hpp"
#include "gaugedist/setups.hpp"
#include "gaugedist/touching_ball.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace gaugedist {

namespace detail {

// Uniform points in the setup's window; a 3-D setup reuses the x1 range for x3.
struct BoxSampler {
  BoxSampler(const Setup& s, std::uint64_t seed) : rng(seed), n(s.dim()) {
    const Window w = s.default_window();
    lo = Vector(n);
    hi = Vector(n);
    for (int k = 0; k < n; ++k) {
      lo[k] = w.lo[k == 1 ? 1 : 0];
      hi[k] = w.hi[k == 1 ? 1 : 0];
    }
  }
  Vector draw() {
    Vector x(n);
    for (int k = 0; k < n; ++k) x[k] = std::uniform_real_distribution<double>(lo[k], hi[k])(rng);
    return x;
  }
  Vector direction() {
    Vector d(n);
    for (int k = 0; k < n; ++k) d[k] = std::normal_distribution<double>()(rng);
    return d.normalized();
  }
  std::mt19937_64 rng;
  int n;
  Vector lo, hi;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace detail

/// x is usable for derivative checks when it lies inside U with a unique
/// closest point, the support is differentiable at the normal there, and every
/// point of a 3h stencil sees the same branch and a nearby closest point.
inline std::optional<DistanceResult> smooth_point(const Setup& s, const Vector& x, double h) {
  if (!s.in_domain(x)) return std::nullopt;
  const BoundaryShape B = s.boundary_for(x);
  if (region_membership(B, x) != Membership::inside) return std::nullopt;
  DistanceResult res;
  try {
    res = s.closed_form(x);
    if (res.closest.size() != 1 || res.region.boundary_of_regions) return std::nullopt;
    x_projector(s.polytope(), inward_normal(B, res.closest.front()));
  } catch (const Error&) {
    return std::nullopt;
  }
  const int n = s.dim();
  std::vector<Vector> offsets;
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 3 * h;
    offsets.push_back(e);
    offsets.push_back(-e);
    for (int j = i + 1; j < n; ++j) {
      Vector f = Vector::Zero(n);
      f[j] = 3 * h;
      offsets.push_back(e + f);
      offsets.push_back(e - f);
      offsets.push_back(-e + f);
      offsets.push_back(-e - f);
    }
  }
  for (const auto& d : offsets) {
    const Vector p = x + d;
    if (!s.in_domain(p) || region_membership(B, p) != Membership::inside) return std::nullopt;
    try {
      const auto r = s.closed_form(p);
      if (r.closest.size() != 1 || r.region.boundary_of_regions || r.region.label() != res.region.label())
        return std::nullopt;
      if ((r.closest.front() - res.closest.front()).norm() > 0.05) return std::nullopt;
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  return res;
}

struct RegularityOptions {
  int grad_points = 200;
  int hessian_points = 50;
  double h_grad = 1e-5;
  double h_hess = 1e-4;
  long max_draws = 400000;
};

/// Derivative formulas against finite differences of the closed-form field.
inline Report verify_regularity(const Setup& s, std::uint64_t seed, RegularityOptions opt = {}) {
  Report rep;
  rep.title = "regularity: " + s.name();
  auto& found = rep.add("smooth sample points found", 0.0);
  auto& g_fd = rep.add("grad_rho vs fd_gradient", 1e-6);
  auto& eik = rep.add("polar gauge of grad_rho is 1", 1e-12);
  auto& hj = rep.add("hj residual of fd gradient", 1e-7);
  auto& jac = rep.add("jacobian_closest vs fd of closest point", 1e-4);
  auto& idem = rep.add("projector idempotent", 1e-10);
  auto& ray = rep.add("(I-X) maps D polar-gauge(nu) to 0", 1e-10);
  auto& h_fd = rep.add("hessian_rho vs fd_hessian", 1e-4);
  auto& hsym = rep.add("hessian symmetric", 1e-10);
  auto& hker = rep.add("hessian kernel contains D polar-gauge(nu)", 1e-8);
  auto& seg = rep.add("hessian constant along segment", 1e-10);
  auto& lim = rep.add("grad_rho limit at the foot point", 1e-8);
  CheckTally* eig = nullptr;
  const bool sphere_inside = s.kind() == SetupKind::sphere_polytope && s.dim() == 2;
  if (sphere_inside) eig = &rep.add("hessian eigenvalues {0, negative} inside the sphere", 1e-8);

  const DualPolytope& P = s.polytope();
  const int n = s.dim();
  const ScalarField f = [&](const Vector& p) { return s.closed_form(p).value; };
  detail::BoxSampler bs(s, seed);

  int grads = 0, hess = 0;
  for (long draw = 0; draw < opt.max_draws && (grads < opt.grad_points || hess < opt.hessian_points); ++draw) {
    const Vector x = bs.draw();
    const auto res = smooth_point(s, x, opt.h_hess);
    if (!res) continue;
    const BoundaryShape B = s.boundary_for(x);
    const Vector& y = res->closest.front();
    const Vector nu = inward_normal(B, y);
    const Vector z = P.vertices()[static_cast<std::size_t>(detail::unique_support_vertex(P, nu))];
    auto ctx = [&] { return "x=" + format_vector(x); };

    if (grads < opt.grad_points) {
      ++grads;
      const Vector g = grad_rho(P, B, x, *res);
      const Vector gf = fd_gradient(f, x, opt.h_grad);
      g_fd.record((g - gf).cwiseAbs().maxCoeff(), ctx);
      eik.record(std::abs(support_value(P, g) - 1.0), ctx);
      hj.record(hj_residual(P, f, x, opt.h_grad), ctx);

      const Matrix X = x_projector(P, nu);
      idem.record(detail::max_abs(X * X - X), ctx);
      ray.record(((Matrix::Identity(n, n) - X) * z).cwiseAbs().maxCoeff(), ctx);
      const Matrix Dy = jacobian_closest(P, B, x, *res);
      const Vector d = bs.direction();
      const double hj_step = 1e-4;
      const Vector yp = s.closed_form(x + hj_step * d).closest.front();
      const Vector ym = s.closed_form(x - hj_step * d).closest.front();
      jac.record(((yp - ym) / (2 * hj_step) - Dy * d).norm(), ctx);
    }

    if (hess < opt.hessian_points) {
      ++hess;
      const Matrix H = hessian_rho(P, B, x, *res);
      h_fd.record(detail::max_abs(H - fd_hessian(f, x, opt.h_hess)), ctx);
      hsym.record(detail::max_abs(H - H.transpose()), ctx);
      hker.record((H * z).cwiseAbs().maxCoeff(), ctx);
      for (double t : {0.25, 0.5}) {
        const Vector p = x + t * (y - x);
        const auto rp = s.closed_form(p);
        if (rp.closest.size() != 1) {
          seg.record(1.0, ctx);
          continue;
        }
        seg.record(detail::max_abs(hessian_rho(P, s.boundary_for(p), p, rp) - H), ctx);
      }
      const Vector mu = nu / support_value(P, nu);
      double worst = 0.0;
      for (double t : {1e-2, 1e-4, 1e-6}) {
        const Vector p = y + t * z;
        const auto rp = s.closed_form(p);
        worst = std::max(worst, (grad_rho(P, s.boundary_for(p), p, rp) - mu).cwiseAbs().maxCoeff());
      }
      lim.record(worst, ctx);
      if (eig && x.norm() < 1.0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
        const auto ev = es.eigenvalues();
        eig->record(std::max(std::abs(ev[1]), ev[0] < -1e-8 ? 0.0 : 1.0), ctx);
      }
    }
  }
  found.record_bool(grads >= opt.grad_points && hess >= opt.hessian_points, [&] {
    return "only " + std::to_string(grads) + " gradient and " + std::to_string(hess) + " hessian points";
  });
  return rep;
}

struct DistanceOptions {
  int grid_resolution = 101;
  int budget = 10000;
  int pair_count = 2000;
  int segment_points = 200;
  int continuity_points = 200;
  int touch_queries = 100;
  int probes = 1000;
};

/// Oracle against closed form, Lipschitz bound, segment linearity, closest-point
/// continuity, the touching ball and exterior uniqueness.
inline Report verify_distance(const Setup& s, std::uint64_t seed, DistanceOptions opt = {}) {
  Report rep;
  rep.title = "distance: " + s.name();
  auto& grid = rep.add("oracle vs closed form on the window grid", 5e-7);
  auto& lip = rep.add("lipschitz bound", 1e-9);
  auto& lin = rep.add("segment linearity", 1e-7);
  auto& keep = rep.add("closest point kept along the segment", 0.0);
  auto& cont = rep.add("closest-point continuity", 1e-2);
  CheckTally* uniq = nullptr;
  if (s.kind() == SetupKind::sphere_polytope || s.kind() == SetupKind::ball_maxnorm)
    uniq = &rep.add("exterior uniqueness (oracle)", 0.0);

  const Oracle oracle = s.make_oracle(opt.budget);
  const DualPolytope& P = s.polytope();
  const int n = s.dim();

  {
    const Window w = s.default_window();
    const Vector slice = s.default_slice();
    const int R = opt.grid_resolution;
    for (int j = 0; j < R; ++j)
      for (int i = 0; i < R; ++i) {
        Vector x(n);
        x[0] = w.lo[0] + (w.hi[0] - w.lo[0]) * i / (R - 1);
        x[1] = w.lo[1] + (w.hi[1] - w.lo[1]) * j / (R - 1);
        for (Eigen::Index k = 0; k < slice.size(); ++k) x[2 + k] = slice[k];
        if (!s.in_domain(x)) continue;
        const double a = oracle.evaluate(x).value, b = s.closed_form(x).value;
        grid.record(std::abs(a - b), [&] { return "x=" + format_vector(x); });
      }
  }

  detail::BoxSampler bs(s, seed);
  auto draw_domain = [&] {
    for (;;) {
      const Vector x = bs.draw();
      if (s.in_domain(x)) return x;
    }
  };

  for (int k = 0; k < opt.pair_count; ++k) {
    const Vector x = draw_domain();
    Vector xt = k % 2 ? draw_domain() : Vector(x + 0.05 * bs.direction());
    if (!s.in_domain(xt)) xt = draw_domain();
    const double d = s.closed_form(xt).value - s.closed_form(x).value;
    const double up = gauge_value(P, xt - x), down = gauge_value(P, x - xt);
    lip.record(std::max({0.0, d - up, -down - d}), [&] { return "x=" + format_vector(x) + " x~=" + format_vector(xt); });
  }

  for (int k = 0; k < opt.segment_points; ++k) {
    const Vector x = draw_domain();
    const auto res = s.closed_form(x);
    if (res.value <= 0) continue;
    const Vector& y = res.closest.front();
    for (int q = 1; q <= 10; ++q) {
      const double t = q / 11.0;
      const Vector z = x + t * (y - x);
      const auto rz = s.closed_form(z);
      lin.record(std::abs(rz.value - (1 - t) * res.value), [&] { return "x=" + format_vector(x); });
      bool has = false;
      for (const auto& c : rz.closest) has = has || (c - y).norm() <= 1e-6;
      keep.record_bool(has, [&] { return "x=" + format_vector(x) + " t=" + std::to_string(t); });
    }
  }

  for (int k = 0, tries = 0; k < opt.continuity_points && tries < 100 * opt.continuity_points; ++tries) {
    const Vector x = draw_domain();
    const auto res = smooth_point(s, x, 1e-3);
    if (!res) continue;
    ++k;
    const Vector p = x + 1e-4 * bs.direction();
    const auto rp = s.closed_form(p);
    double best = 1e300;
    for (const auto& c : rp.closest) best = std::min(best, (c - res->closest.front()).norm());
    cont.record(best, [&] { return "x=" + format_vector(x); });
  }

  // The touching ball is checked against the exact closed-form result; the
  // oracle's closest points are compared with it separately.
  auto& match = rep.add("oracle closest points match closed form", 1e-6);
  for (int k = 0; k < opt.touch_queries; ++k) {
    Vector x = draw_domain();
    const BoundaryShape B = s.boundary_for(x);
    if (region_membership(B, x) == Membership::on_boundary) continue;
    const auto exact = s.closed_form(x);
    rep.merge(verify_touching_ball(P, B, x, exact, opt.probes, seed + static_cast<std::uint64_t>(k)));
    const auto res = oracle.evaluate(x);
    double worst = res.closest.size() == exact.closest.size() ? 0.0 : 1.0;
    for (const auto& y : res.closest) {
      double best = 1e300;
      for (const auto& c : exact.closest) best = std::min(best, (c - y).norm());
      worst = std::max(worst, best);
    }
    match.record(worst, [&] { return "x=" + format_vector(x); });
    if (uniq && x.norm() > 1.0)
      uniq->record_bool(res.closest.size() == 1, [&] { return "x=" + format_vector(x); });
  }
  return rep;
}

/// Normals, foot points and the distance Hessian of a boundary.
inline Report verify_boundary(const BoundaryShape& B, int samples, const std::optional<Window>& window = {}) {
  Report rep;
  rep.title = "boundary";
  auto& unit = rep.add("unit normal", 1e-12);
  auto& orth = rep.add("normal orthogonal to tangent", 1e-8);
  auto& frame = rep.add("normal orthogonal to tangent frame", 1e-12);
  auto& on = rep.add("samples on the boundary", 0.0);
  auto& hfd = rep.add("distance hessian vs fd at foot point", 1e-4);
  auto& hker = rep.add("distance hessian kills the normal", 1e-10);

  const auto pts = sample_boundary(B, samples, window);
  const int n = B.dim();
  const ScalarField sd = [&](const Vector& p) { return euclid_signed_distance(B, p); };
  for (const auto& y : pts) {
    auto ctx = [&] { return "y=" + format_vector(y); };
    on.record_bool(region_membership(B, y) == Membership::on_boundary, ctx);
    Vector nu;
    try {
      nu = inward_normal(B, y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CornerPoint) continue;
      throw;
    }
    unit.record(std::abs(nu.norm() - 1.0), ctx);
    for (const auto& t : detail::orthonormal_complement(nu)) frame.record(std::abs(t.dot(nu)), ctx);
    if (n == 2) {
      // numerical tangent from the nearest piece's parametrization
      std::optional<std::pair<double, double>> range;
      if (B.as<Parabola>()) range = std::pair{y[0] - 1.0, y[0] + 1.0};
      double best = 1e300;
      Eigen::Vector2d tan{0, 0};
      for (const auto& c : boundary_pieces(B, range)) {
        const auto [t, p] = detail::nearest_on_piece(c, y.head<2>());
        const double d = (p - y.head<2>()).norm();
        if (d < best) {
          best = d;
          const double h = 1e-6;
          tan = (c.point(t + h) - c.point(t - h)) / (2 * h);
        }
      }
      orth.record(std::abs(tan.normalized().dot(nu.head<2>())), ctx);
    }
    Matrix D2;
    try {
      D2 = euclid_dist_hessian(B, y);
    } catch (const Error&) {
      continue;
    }
    hker.record((D2 * nu).cwiseAbs().maxCoeff(), ctx);
    if (!B.as<Polygon>()) hfd.record(detail::max_abs(D2 - fd_hessian(sd, y, 1e-4)), ctx);
  }
  return rep;
}

/// The default suite: duality on P, and every distance/derivative/boundary check
/// of the setup.
inline std::vector<Report> verify_suite(const Setup& s, std::uint64_t seed, int duality_samples = 10000,
                                        DistanceOptions dopt = {}, RegularityOptions ropt = {}) {
  std::vector<Report> out;
  out.push_back(check_duality_identities(s.polytope(), duality_samples, seed));
  out.back().title = "duality: " + s.name();
  std::optional<Window> w;
  if (s.kind() == SetupKind::parabola) w = s.default_window();
  out.push_back(verify_boundary(s.boundary(), 400, w));
  out.back().title = "boundary: " + s.name();
  out.push_back(verify_distance(s, seed, dopt));
  out.push_back(verify_regularity(s, seed, ropt));
  return out;
}

/// Suite for an arbitrary polytope/boundary pair without a closed form: the
/// duality identities, the boundary checks, and oracle-only distance checks.
/// Oracle closest points are accurate to about 1e-7, so the normal-cone
/// inclusions of the touching ball use a 1e-6 tolerance here.
inline std::vector<Report> verify_pair(const DualPolytope& P, const BoundaryShape& B, const Window& window,
                                       const Vector& slice, std::uint64_t seed, int duality_samples = 10000,
                                       DistanceOptions opt = {}) {
  std::vector<Report> out;
  out.push_back(check_duality_identities(P, duality_samples, seed));
  out.back().title = "duality";
  out.push_back(verify_boundary(B, 400, B.as<Parabola>() ? std::optional<Window>(window) : std::nullopt));
  out.back().title = "boundary";

  Report rep;
  rep.title = "distance (oracle)";
  auto& lip = rep.add("lipschitz bound", 1e-6);
  auto& lin = rep.add("segment linearity", 1e-6);
  const Oracle oracle(P, B, opt.budget);
  const int n = P.dim();
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    for (;;) {
      Vector x(n);
      for (int k = 0; k < n; ++k) {
        if (k < 2) x[k] = std::uniform_real_distribution<double>(window.lo[k], window.hi[k])(rng);
        else x[k] = slice.size() > k - 2 ? slice[k - 2] : 0.0;
      }
      if (region_membership(B, x) != Membership::outside) return x;
    }
  };
  const int pairs = std::min(opt.pair_count, 200);
  for (int k = 0; k < pairs; ++k) {
    const Vector x = draw(), xt = draw();
    const double d = oracle.evaluate(xt).value - oracle.evaluate(x).value;
    lip.record(std::max({0.0, d - gauge_value(P, xt - x), -gauge_value(P, x - xt) - d}),
               [&] { return "x=" + format_vector(x) + " x~=" + format_vector(xt); });
  }
  for (int k = 0; k < opt.touch_queries; ++k) {
    const Vector x = draw();
    if (region_membership(B, x) == Membership::on_boundary) continue;
    const auto res = oracle.evaluate(x);
    rep.merge(verify_touching_ball(P, B, x, res, opt.probes, seed + static_cast<std::uint64_t>(k), 1e-6));
    if (res.value <= 0) continue;
    const Vector& y = res.closest.front();
    for (double t : {0.25, 0.5, 0.75}) {
      const Vector z = x + t * (y - x);
      lin.record(std::abs(oracle.evaluate(z).value - (1 - t) * res.value), [&] { return "x=" + format_vector(x); });
    }
  }
  out.push_back(std::move(rep));
  return out;
}

}  // namespace gaugedist
