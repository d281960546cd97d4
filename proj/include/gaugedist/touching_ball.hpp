#pragma once

#include "gaugedist/boundary.hpp"
#include "gaugedist/distance_result.hpp"
#include "gaugedist/duality.hpp"
#include "gaugedist/polytope.hpp"
#include "gaugedist/report.hpp"

#include <cstdint>

namespace gaugedist {

/// Checks the touching ball K_x = x - rho(x) K against a distance result:
/// its interior stays in U, and the reported closest points lie on both
/// boundaries with compatible normals. Violations are counted, never thrown.
inline Report verify_touching_ball(const DualPolytope& P, const BoundaryShape& B, const Vector& x,
                                   const DistanceResult& res, int probe_count, std::uint64_t seed = 1,
                                   double cone_tol = 1e-8) {
  Report rep;
  rep.title = "touching ball";
  auto& escape = rep.add("interior-escape", 0.0);
  auto& on_kx = rep.add("closest on boundary of K_x", 1e-8);
  auto& on_u = rep.add("closest on boundary of U", 0.0);
  auto& normal_in_cone = rep.add("-nu in N(K_x, y)", 0.0);
  auto& foot_normal = rep.add("foot-point normal inclusion", 0.0);

  const double rho = res.value;
  const auto& Z = P.vertices();
  const int n = P.dim();
  detail::Sampler s(seed, n);
  const double shrink = 1.0 - 1e-9;

  // Interior probes: shrunken vertices, shrunken boundary points of K, and
  // random points of the open body. Only rho > 0 has an interior.
  if (rho > 0) {
    for (int k = 0; k < probe_count; ++k) {
      Vector kp;
      if (static_cast<std::size_t>(k) < Z.size()) {
        kp = Z[static_cast<std::size_t>(k)] * shrink;
      } else if (k % 2 == 0) {
        Vector d(n);
        for (int i = 0; i < n; ++i) d[i] = s.normal(s.rng);
        kp = d / gauge_value(P, d) * shrink;
      } else {
        kp = detail::convex_mix(Z, s) * s.uniform(0.0, 1.0);
      }
      const Vector p = x - rho * kp;
      escape.record_bool(region_membership(B, p) != Membership::outside,
                         [&] { return "probe " + format_vector(p) + " is outside U"; });
    }
  }

  const double scale = 1.0 + rho;
  for (const auto& y : res.closest) {
    on_kx.record(std::abs(gauge_value(P, x - y) - rho) / scale, [&] { return "y=" + format_vector(y); });
    on_u.record_bool(region_membership(B, y) == Membership::on_boundary, [&] { return "y=" + format_vector(y); });
    if (!(rho > 0)) continue;

    Vector nu;
    try {
      nu = inward_normal(B, y);
    } catch (const Error&) {
      continue;  // corners: no normal to test
    }
    // K_x = x - rho K, so N(K_x, y) = -N(K, k0) with k0 = (x - y) / rho
    const Vector k0 = (x - y) / gauge_value(P, x - y);
    const auto g = gauge(P, k0);
    const auto active = detail::pick(P.polar_vertices(), g.active);
    normal_in_cone.record_bool(detail::in_cone(active, nu, cone_tol), [&] { return "y=" + format_vector(y); });

    const Vector mu = nu / support_value(P, nu);
    foot_normal.record_bool(detail::in_convex_hull(active, mu, cone_tol), [&] { return "y=" + format_vector(y) + " mu=" + format_vector(mu); });
  }
  return rep;
}

}  // namespace gaugedist
