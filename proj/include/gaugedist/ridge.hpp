#pragma once

#include "gaugedist/grid.hpp"
#include "gaugedist/oracle.hpp"
#include "gaugedist/regularity.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace gaugedist {

struct RidgeOptions {
  double h = 1e-4;                 // step of the one-sided stencils
  double first_threshold = 1e-3;   // fd_grad_jump
  double second_threshold = 0.1;   // fd_second_jump
};

/// Per-node ridge indicators. The jumps are the largest one-sided mismatch over
/// the two grid axes, measured with stencils of width 3h on either side of the
/// node, so they describe the node itself rather than the whole cell.
struct RidgeReport {
  FieldGrid grid;
  RidgeOptions options;
  std::vector<std::uint8_t> multi_closest, fd_grad_jump, fd_second_jump, region_boundary, probed;
  std::vector<double> first_jump, second_jump;

  long count(const std::vector<std::uint8_t>& flags) const {
    long c = 0;
    for (auto f : flags) c += f;
    return c;
  }
};

inline RidgeReport ridge_scan(const DistanceFn& rho, const Window& w, int nx, int ny, const Vector& slice = {},
                              const DomainFn& in_domain = {}, RidgeOptions opt = {}) {
  RidgeReport r;
  r.options = opt;
  r.grid = evaluate_grid(rho, w, nx, ny, slice, in_domain);
  const std::size_t m = r.grid.size();
  for (auto* v : {&r.multi_closest, &r.fd_grad_jump, &r.fd_second_jump, &r.region_boundary, &r.probed}) v->assign(m, 0);
  r.first_jump.assign(m, 0.0);
  r.second_jump.assign(m, 0.0);

  const ScalarField f = [&](const Vector& x) { return rho(x).value; };
  const int n = static_cast<int>(2 + slice.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = r.grid.index(i, j);
      if (r.grid.label[k] < 0) continue;
      r.multi_closest[k] = r.grid.n_closest[k] >= 2;
      r.region_boundary[k] = r.grid.boundary_of_regions[k];
      const Vector x = r.grid.point(i, j);

      // the stencil must stay in the domain
      bool inside = true;
      for (int axis = 0; axis < 2 && inside; ++axis)
        for (double s : {-3.0, 3.0}) {
          Vector p = x;
          p[axis] += s * opt.h;
          if (in_domain && !in_domain(p)) inside = false;
        }
      if (!inside) continue;

      double j1 = 0, j2 = 0;
      for (int axis = 0; axis < 2; ++axis) {
        Vector e = Vector::Zero(n);
        e[axis] = 1.0;
        const auto o = one_sided_differences(f, x, e, opt.h);
        j1 = std::max(j1, std::abs(o.d1_plus - o.d1_minus));
        j2 = std::max(j2, std::abs(o.d2_plus - o.d2_minus));
      }
      r.probed[k] = 1;
      r.first_jump[k] = j1;
      r.second_jump[k] = j2;
      r.fd_grad_jump[k] = j1 > opt.first_threshold;
      r.fd_second_jump[k] = j2 > opt.second_threshold;
    }
  return r;
}

/// Oracle-driven scan of an arbitrary polytope/boundary pair.
inline RidgeReport ridge_scan(const DualPolytope& P, const BoundaryShape& B, const Window& w, int resolution,
                              int budget, const Vector& slice = {}, RidgeOptions opt = {}) {
  const Oracle oracle(P, B, budget);
  const DistanceFn rho = [&](const Vector& x) { return oracle.evaluate(x); };
  const DomainFn dom = [&](const Vector& x) { return region_membership(B, x) != Membership::outside; };
  return ridge_scan(rho, w, resolution, resolution, slice, dom, opt);
}

/// One-sided derivatives of a signed field along the inward normal at boundary points.
struct NormalJump {
  Vector y;
  double inside = 0.0;   // derivative from the U side
  double outside = 0.0;  // derivative from the complement
};

inline std::vector<NormalJump> boundary_normal_jumps(const ScalarField& signed_field, const BoundaryShape& B,
                                                     const std::vector<Vector>& points, double h = 1e-4) {
  std::vector<NormalJump> out;
  for (const auto& y : points) {
    Vector nu;
    try {
      nu = inward_normal(B, y);
    } catch (const Error&) {
      continue;
    }
    const auto o = one_sided_differences(signed_field, y, nu, h);
    out.push_back({y, o.d1_plus, o.d1_minus});
  }
  return out;
}

}  // namespace gaugedist
