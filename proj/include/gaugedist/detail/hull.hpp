#pragma once

#include "gaugedist/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace gaugedist::detail {

inline double bbox_diameter(const std::vector<Vector>& pts) {
  if (pts.empty()) return 0.0;
  Vector lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

/// Removes points closer than tol to an earlier point. Keeps first occurrence.
inline std::vector<Vector> dedup_points(const std::vector<Vector>& pts, double tol) {
  std::vector<Vector> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out)
      if ((p - q).norm() <= tol) { dup = true; break; }
    if (!dup) out.push_back(p);
  }
  return out;
}

inline double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Andrew's monotone chain. Returns the strictly convex hull in counter-clockwise
/// order (collinear points dropped). Fewer than 3 points back means degenerate.
inline std::vector<Vector> monotone_chain(std::vector<Vector> pts, double eps) {
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  if (pts.size() < 3) return pts;
  std::vector<Vector> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

struct Hull3 {
  std::vector<std::array<int, 3>> faces;  // outward-oriented triangles
};

/// Incremental 3-D hull over pts. Empty `faces` means the points are coplanar.
inline Hull3 incremental_hull3(const std::vector<Vector>& pts, double eps) {
  using V3 = Eigen::Vector3d;
  const int m = static_cast<int>(pts.size());
  std::vector<V3> p(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(i)].head<3>();
  Hull3 hull;
  if (m < 4) return hull;

  // initial tetrahedron
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = eps;
  for (int i = 1; i < m; ++i) {
    double d = (p[i] - p[i0]).norm();
    if (d > best) { best = d; i1 = i; }
  }
  if (i1 < 0) return hull;
  best = eps * eps;
  for (int i = 1; i < m; ++i) {
    double a = (p[i1] - p[i0]).cross(p[i] - p[i0]).norm();
    if (a > best) { best = a; i2 = i; }
  }
  if (i2 < 0) return hull;
  const V3 n012 = (p[i1] - p[i0]).cross(p[i2] - p[i0]);
  best = eps * eps * eps;
  for (int i = 1; i < m; ++i) {
    double v = std::abs(n012.dot(p[i] - p[i0]));
    if (v > best) { best = v; i3 = i; }
  }
  if (i3 < 0) return hull;

  auto normal = [&](const std::array<int, 3>& f) {
    return V3((p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]));
  };
  auto above = [&](const std::array<int, 3>& f, int q) {
    V3 nrm = normal(f);
    return nrm.dot(p[q] - p[f[0]]) > eps * nrm.norm();
  };

  std::vector<std::array<int, 3>> faces;
  if (n012.dot(p[i3] - p[i0]) > 0) {
    faces = {{i0, i2, i1}, {i0, i1, i3}, {i1, i2, i3}, {i2, i0, i3}};
  } else {
    faces = {{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i2, i3, i0}};
  }

  for (int q = 0; q < m; ++q) {
    if (q == i0 || q == i1 || q == i2 || q == i3) continue;
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (above(faces[f], q)) { visible[f] = true; any = true; }
    if (!any) continue;
    // horizon: directed edges of visible faces whose twin belongs to a hidden face
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      for (int e = 0; e < 3; ++e) edge_count[{faces[f][e], faces[f][(e + 1) % 3]}]++;
    }
    std::vector<std::array<int, 3>> next;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) next.push_back(faces[f]);
    for (const auto& [edge, cnt] : edge_count) {
      (void)cnt;
      if (edge_count.count({edge.second, edge.first})) continue;
      next.push_back({edge.first, edge.second, q});
    }
    faces = std::move(next);
  }
  hull.faces = std::move(faces);
  return hull;
}

}  // namespace gaugedist::detail
