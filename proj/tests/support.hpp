#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own gauge/support/oracle code.

#include "gaugedist/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace testref {

using gaugedist::Vector;

// Point in a convex polygon given by its vertices in any order.
inline bool in_convex_polygon(std::vector<Vector> pts, const Vector& p, double eps = 1e-12) {
  Vector c = Vector::Zero(2);
  for (const auto& q : pts) c += q;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector& a = pts[i];
    const Vector& b = pts[(i + 1) % pts.size()];
    const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    if (cross < -eps) return false;
  }
  return true;
}

// inf{l > 0 : x / l in conv(pts)} by bisection.
inline double gauge_bisect(const std::vector<Vector>& pts, const Vector& x) {
  if (x.norm() == 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!in_convex_polygon(pts, x / hi, 0.0)) hi *= 2;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (in_convex_polygon(pts, x / mid, 0.0) ? hi : lo) = mid;
  }
  return hi;
}

inline double max_norm(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

// Golden-section minimum of a unimodal function on [a, b].
inline double golden(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d, d = c, fd = fc, c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd, d = a + r * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// min over t in [t0, t1] of f(t): dense scan, then golden refinement around
// the best few samples.
inline double curve_min(const std::function<double(double)>& f, double t0, double t1, int samples = 200000) {
  std::vector<std::pair<double, int>> vals;
  vals.reserve(static_cast<std::size_t>(samples) + 1);
  const double dt = (t1 - t0) / samples;
  for (int k = 0; k <= samples; ++k) vals.push_back({f(t0 + k * dt), k});
  std::partial_sort(vals.begin(), vals.begin() + 8, vals.end());
  double best = vals.front().first;
  for (int q = 0; q < 8; ++q) {
    const int k = vals[static_cast<std::size_t>(q)].second;
    const double a = std::max(t0, t0 + (k - 1) * dt), b = std::min(t1, t0 + (k + 1) * dt);
    best = std::min(best, f(golden(f, a, b)));
  }
  return best;
}

// Max-norm distance from x to the unit circle (as the min over the circle).
inline double maxnorm_to_circle(const Vector& x) {
  return curve_min([&](double t) { return std::max(std::abs(x[0] - std::cos(t)), std::abs(x[1] - std::sin(t))); }, 0.0,
                   2 * std::numbers::pi);
}

}  // namespace testref
