#pragma once

#include "gaugedist/boundary.hpp"
#include "gaugedist/distance_result.hpp"
#include "gaugedist/oracle.hpp"
#include "gaugedist/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace gaugedist {

namespace detail {

inline int face_dim_at(const DualPolytope& P, const Vector& x, const Vector& y) {
  const Vector d = x - y;
  if (d.isZero(0.0)) return -1;
  return rank_of(pick(P.polar_vertices(), gauge(P, d).active)) - 1;
}

inline bool near_equal(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * (1.0 + scale); }

// The square [-1,1]^2, built once.
inline const DualPolytope& square() {
  static const DualPolytope P = cube(2);
  return P;
}

inline double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace detail

// ---------------------------------------------------------------------------
// parabola x2 = x1^2, max norm

/// Max-norm distance to the parabola x2 = x1^2. The value is the same on both sides;
/// the label says which formula applies.
inline DistanceResult rho_parabola_maxnorm(const Vector& x) {
  if (x.size() != 2) fail(ErrorCode::DimensionMismatch, "the parabola lives in the plane");
  const double x1 = x[0], x2 = x[1], a = std::abs(x1);
  const double scale = a + std::abs(x2);
  DistanceResult r;
  r.method = Method::closed_form;
  const bool above = x2 > x1 * x1;
  const bool flat = a <= -x2;
  if (above) {
    const double d = std::sqrt(a + x2 + 0.25) - a - 0.5;
    r.value = d;
    r.region.branch = "above-parabola";
    if (x1 == 0) {
      r.closest = {make_vector({-d, x2 - d}), make_vector({d, x2 - d})};
    } else {
      r.closest = {make_vector({x1 + detail::sgn(x1) * d, x2 - d})};
    }
  } else if (flat) {
    r.value = -x2;
    r.region.branch = "flat-cone";
    r.closest = {make_vector({0.0, 0.0})};
  } else {
    const double d = -std::sqrt(a + x2 + 0.25) + a + 0.5;
    r.value = d;
    r.region.branch = "below-parabola";
    r.closest = {make_vector({x1 - detail::sgn(x1) * d, x2 + d})};
  }
  // ties: on the curve (above/below) and on |x1| = -x2 (flat/below)
  const bool on_curve = detail::near_equal(x2, x1 * x1, scale * scale);
  const bool on_cone_edge = x2 <= 0 && detail::near_equal(a, -x2, scale);
  if (on_curve || on_cone_edge) {
    r.region.boundary_of_regions = true;
    r.region.branch = on_curve ? "above-parabola" : "below-parabola";
  }
  r.region.active_face_dim = r.value == 0 ? -1 : detail::face_dim_at(detail::square(), x, r.closest.front());
  return r;
}

// ---------------------------------------------------------------------------
// unit ball, cube / max norm in R^n

namespace detail {

// rho for the exterior with coordinates J frozen at zero; NaN when the
// quadratic has no real root.
inline double ball_exterior_value(const Vector& x, const std::vector<bool>& inJ) {
  double l1 = 0.0, l2 = 0.0;
  int m = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (inJ[static_cast<std::size_t>(i)]) continue;
    l1 += std::abs(x[i]);
    l2 += x[i] * x[i];
    ++m;
  }
  if (m == 0) return std::numeric_limits<double>::quiet_NaN();
  const double disc = l1 * l1 + m - m * l2;
  if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
  // smaller root of m r^2 - 2 l1 r + l2 - 1 = 0, written without cancellation
  const double s = std::sqrt(disc);
  return (l2 - 1.0) / (l1 + s);
}

inline bool ball_fixed_point(const Vector& x, const std::vector<bool>& inJ, double rho) {
  if (!std::isfinite(rho) || rho < 0) return false;
  const double slack = 1e-12 * (1.0 + rho);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (inJ[static_cast<std::size_t>(i)] ? a > rho + slack : a < rho - slack) return false;
  }
  return true;
}

}  // namespace detail

/// Max-norm distance to the unit sphere in R^n.
inline DistanceResult rho_ball_maxnorm(const Vector& x, int n) {
  if (n < 1) fail(ErrorCode::UnsupportedDimension, "n must be positive");
  if (x.size() != n) fail(ErrorCode::DimensionMismatch, "point dimension differs from n");
  DistanceResult r;
  r.method = Method::closed_form;
  const double norm = x.norm();
  const double l1 = x.lpNorm<1>();
  if (norm <= 1.0) {
    const double disc = l1 * l1 + n - n * x.squaredNorm();
    r.value = (1.0 - x.squaredNorm()) / (l1 + std::sqrt(disc));  // = (-l1 + sqrt(disc)) / n
    r.region.branch = "inside-ball";
    // corners z with z_i = -sgn(x_i); zero coordinates admit both signs
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (x[i] == 0) free.push_back(i);
    if (free.size() > 12) fail(ErrorCode::UnsupportedDimension, "too many tied corners to enumerate");
    for (unsigned mask = 0; mask < (1u << free.size()); ++mask) {
      Vector z(n);
      for (Eigen::Index i = 0; i < n; ++i) z[i] = -detail::sgn(x[i]);
      for (std::size_t k = 0; k < free.size(); ++k) z[free[k]] = (mask >> k) & 1u ? -1.0 : 1.0;
      r.closest.push_back(x - r.value * z);
    }
    r.region.boundary_of_regions = std::abs(norm - 1.0) <= 1e-12;
    r.region.active_face_dim = r.value == 0 ? -1 : n - 1;
    return r;
  }

  // Exterior: iterate J = {j : |x_j| <= rho}.
  std::vector<bool> inJ(static_cast<std::size_t>(n), false);
  double rho = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0; iter <= n; ++iter) {
    rho = detail::ball_exterior_value(x, inJ);
    if (!std::isfinite(rho)) {
      // no real root: freeze the smallest coordinate not yet in J
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!inJ[static_cast<std::size_t>(i)] && (pick < 0 || std::abs(x[i]) < std::abs(x[pick]))) pick = i;
      if (pick < 0) break;
      inJ[static_cast<std::size_t>(pick)] = true;
      continue;
    }
    bool grew = false;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!inJ[static_cast<std::size_t>(i)] && std::abs(x[i]) <= rho) {
        inJ[static_cast<std::size_t>(i)] = true;
        grew = true;
      }
    if (!grew) break;
  }
  if (!detail::ball_fixed_point(x, inJ, rho)) {
    // Exact fallback: rho solves sum_i max(|x_i| - rho, 0)^2 = 1, so J is a set
    // of smallest coordinates; try each size.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(x[a]) < std::abs(x[b]); });
    bool ok = false;
    for (int k = 0; k < n && !ok; ++k) {
      std::vector<bool> trial(static_cast<std::size_t>(n), false);
      for (int q = 0; q < k; ++q) trial[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])] = true;
      const double v = detail::ball_exterior_value(x, trial);
      if (detail::ball_fixed_point(x, trial, v)) {
        inJ = trial;
        rho = v;
        ok = true;
      }
    }
    if (!ok) fail(ErrorCode::EmptyComplement, "no consistent index set for " + format_vector(x));
  }
  std::vector<int> J;
  Vector y(n);
  bool tie = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(x[i]);
    if (detail::near_equal(a, rho, rho)) tie = true;
    if (inJ[static_cast<std::size_t>(i)]) {
      J.push_back(static_cast<int>(i) + 1);
      y[i] = 0.0;
    } else {
      y[i] = x[i] - rho * detail::sgn(x[i]);
    }
  }
  if (static_cast<int>(J.size()) == n) fail(ErrorCode::EmptyComplement, "J covers every index");
  r.value = rho;
  r.closest = {y};
  r.region.branch = J.empty() ? "vertex-branch" : "singular-cone";
  if (!J.empty()) r.region.J = J;
  r.region.boundary_of_regions = tie;
  r.region.active_face_dim = n - 1 - static_cast<int>(J.size());
  return r;
}

/// The same exterior value with the frozen coordinates J (1-based) projected away,
/// evaluated as a problem in dimension n - |J|.
inline double rho_ball_projected(const Vector& x, const std::vector<int>& J) {
  std::vector<double> keep;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::find(J.begin(), J.end(), static_cast<int>(i) + 1) == J.end()) keep.push_back(x[i]);
  Vector xh = Eigen::Map<Vector>(keep.data(), static_cast<Eigen::Index>(keep.size()));
  return rho_ball_maxnorm(xh, static_cast<int>(keep.size())).value;
}

// ---------------------------------------------------------------------------
// unit sphere, inscribed polytope

namespace detail {

inline bool is_standard_cube(const DualPolytope& P) {
  const int n = P.dim();
  if (P.polar_vertices().size() != static_cast<std::size_t>(2 * n)) return false;
  if (P.vertices().size() != (std::size_t{1} << n)) return false;
  for (const auto& z : P.vertices())
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(std::abs(z[i]) - 1.0) > 1e-12) return false;
  return true;
}

}  // namespace detail

/// gamma-distance to the unit sphere centred at the origin, for a polytope whose
/// vertices all lie on a common sphere of radius r.
inline DistanceResult rho_sphere_polytope(const DualPolytope& P, const Vector& x, int fallback_budget = 10000) {
  detail::check_dim(P, x);
  if (!P.circumradius()) fail(ErrorCode::NotInscribed, "vertices are not equidistant from the origin");
  const int n = P.dim();
  if (n != 2) {
    if (detail::is_standard_cube(P)) return rho_ball_maxnorm(x, n);
    if (n != 3) fail(ErrorCode::UnsupportedDimension, "exact sphere formulas are planar or cube-only");
    const auto B = BoundaryShape::unit_sphere(3, x.norm() <= 1.0 ? Side::interior : Side::exterior);
    auto res = rho_oracle(P, B, x, fallback_budget);
    res.region.branch = "oracle-fallback";
    return res;
  }
  const double r = *P.circumradius();
  const double r2 = r * r;
  const double nx = x.norm();
  DistanceResult res;
  res.method = Method::closed_form;

  if (nx <= 1.0) {
    const auto h = support(P, Vector(-x));
    const double disc = h.value * h.value + r2 - r2 * x.squaredNorm();
    res.value = (1.0 - x.squaredNorm()) / (h.value + std::sqrt(disc));
    res.region.branch = "inside-ball";
    for (int j : h.active) res.closest.push_back(x - res.value * P.vertices()[static_cast<std::size_t>(j)]);
    res.region.boundary_of_regions = std::abs(nx - 1.0) <= 1e-12;
    res.region.active_face_dim = res.value == 0 ? -1 : detail::face_dim_at(P, x, res.closest.front());
    return res;
  }

  // Singular branch: a facet with normal w touches the circle at w/|w|.
  const DualPolytope Pd = polar(P);
  for (const auto& w : P.polar_vertices()) {
    const Vector y = w / w.norm();
    const Vector d = x - y;
    const auto cone = normal_cone(Pd, w);  // generated by the vertices z with <z,w> = 1
    if (cone.contains(d)) {
      res.value = gauge_value(P, d);
      res.closest = {y};
      res.region.branch = "singular-cone";
      // on the edge of the cone the vertex formula gives the same value
      Matrix g(2, 2);
      if (cone.generators.size() == 2) {
        g.col(0) = cone.generators[0];
        g.col(1) = cone.generators[1];
        const Vector lam = g.fullPivLu().solve(d);
        res.region.boundary_of_regions = lam.minCoeff() <= 1e-12 * (1.0 + d.norm());
      }
      res.region.active_face_dim = detail::face_dim_at(P, x, y);
      return res;
    }
  }

  const auto h = support(P, x);
  const double disc = h.value * h.value + r2 - r2 * x.squaredNorm();
  if (disc < -1e-12 * (1.0 + h.value * h.value))
    fail(ErrorCode::InvalidShape, "vertex branch without a real root at " + format_vector(x));
  res.value = (x.squaredNorm() - 1.0) / (h.value + std::sqrt(std::max(0.0, disc)));
  res.region.branch = "vertex-branch";
  for (int j : h.active) res.closest.push_back(x - res.value * P.vertices()[static_cast<std::size_t>(j)]);
  if (res.closest.size() != 1)
    fail(ErrorCode::MultipleClosestPoints, "exterior point with several closest points: " + format_vector(x));
  res.region.active_face_dim = detail::face_dim_at(P, x, res.closest.front());
  return res;
}

// ---------------------------------------------------------------------------
// exterior of two unit disks at (+-1, 0), max norm

namespace detail {

// Exact minimum of gamma(x - y) over the boundary of a disk union, by enumerating
// the configurations where the minimum can sit: a vertex of K_x on a circle, a
// facet of K_x tangent to a circle, or an arc endpoint.
inline DistanceResult disk_union_enumerated(const DualPolytope& P, const DiskUnionExterior& du, const Vector& x) {
  const auto arcs = disk_union_arcs(du);
  auto on_valid_arc = [&](const Eigen::Vector2d& y) {
    for (const auto& d : du.disks)
      if ((y - d.center.head<2>()).norm() < d.radius - 1e-12) return false;
    return true;
  };
  std::vector<Eigen::Vector2d> cand;
  const Eigen::Vector2d q = x.head<2>();
  for (const auto& d : du.disks) {
    const Eigen::Vector2d c = d.center.head<2>();
    for (const auto& w : P.polar_vertices()) cand.push_back(c + d.radius * Eigen::Vector2d(w[0], w[1]).normalized());
    for (const auto& zv : P.vertices()) {
      const Eigen::Vector2d z(zv[0], zv[1]);
      const Eigen::Vector2d e = q - c;
      // |e - t z|^2 = R^2
      const double A = z.squaredNorm(), Bq = -2 * e.dot(z), C = e.squaredNorm() - d.radius * d.radius;
      const double disc = Bq * Bq - 4 * A * C;
      if (disc < 0) continue;
      for (double s : {-1.0, 1.0}) {
        const double t = (-Bq + s * std::sqrt(disc)) / (2 * A);
        if (t >= 0) {
          // project back onto the circle to remove rounding
          Eigen::Vector2d y = q - t * z;
          y = c + d.radius * (y - c).normalized();
          cand.push_back(y);
        }
      }
    }
  }
  for (const auto& a : arcs)
    if (!a.periodic) {
      cand.push_back(a.point(a.t0));
      cand.push_back(a.point(a.t1));
    }
  DistanceResult r;
  r.method = Method::closed_form;
  r.value = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Eigen::Vector2d>> vals;
  for (const auto& y : cand) {
    if (!on_valid_arc(y)) continue;
    const double v = gauge_value(P, Vector(x - Vector(y)));
    vals.emplace_back(v, y);
    r.value = std::min(r.value, v);
  }
  const double keep = 1e-9 + 1e-9 * r.value;
  for (const auto& [v, y] : vals) {
    if (v > r.value + keep) continue;
    bool dup = false;
    for (const auto& c : r.closest)
      if ((c - Vector(y)).norm() < 1e-6) { dup = true; break; }
    if (!dup) r.closest.push_back(Vector(y));
  }
  return r;
}

}  // namespace detail

inline DistanceResult rho_two_disks_maxnorm(const Vector& x) {
  if (x.size() != 2) fail(ErrorCode::DimensionMismatch, "the two-disk setup is planar");
  for (double c : {-1.0, 1.0})
    if (std::hypot(x[0] - c, x[1]) < 1.0 - 1e-12)
      fail(ErrorCode::OutsideDomain, format_vector(x) + " is inside a disk");
  const double a = std::abs(x[0]), h = std::abs(x[1]) - 1.0;
  const double s = detail::sgn(x[1]) == 0 ? 1.0 : detail::sgn(x[1]);
  DistanceResult r;
  r.method = Method::closed_form;
  const bool left = std::abs(x[0] + 1.0) <= h;
  const bool right = std::abs(x[0] - 1.0) <= h;
  if (h >= 0 && (left || right)) {
    r.value = h;
    if (left) r.closest.push_back(make_vector({-1.0, s}));
    if (right) r.closest.push_back(make_vector({1.0, s}));
    r.region.branch = (left && right) ? "two-closest" : "one-closest-flat";
    const double scale = a + std::abs(x[1]);
    r.region.boundary_of_regions = detail::near_equal(a, h - 1.0, scale) ||
                                   detail::near_equal(std::abs(x[0] + 1.0), h, scale) ||
                                   detail::near_equal(std::abs(x[0] - 1.0), h, scale);
  } else {
    const DualPolytope& P = detail::square();
    static const DiskUnionExterior du = *BoundaryShape::two_unit_disks().as<DiskUnionExterior>();
    r = detail::disk_union_enumerated(P, du, x);
    r.region.branch = "generic";
  }
  r.region.active_face_dim = r.value == 0 ? -1 : detail::face_dim_at(detail::square(), x, r.closest.front());
  return r;
}

}  // namespace gaugedist
