#pragma once

#include "gaugedist/detail/hull.hpp"
#include "gaugedist/detail/linalg.hpp"
#include "gaugedist/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace gaugedist {

/// Convex polytope with the origin in its interior, held as both its vertex
/// list and the list of polar vertices (facet normals scaled so <x,v> <= 1).
/// Only the factories below can construct one; the result is immutable.
class DualPolytope {
 public:
  struct Unchecked {};

  DualPolytope(Unchecked, std::vector<Vector> vertices, std::vector<Vector> polar_vertices)
      : vertices_(std::move(vertices)), polar_(std::move(polar_vertices)) {
    dim_ = static_cast<int>(vertices_.front().size());
    vmat_.resize(static_cast<Eigen::Index>(vertices_.size()), dim_);
    for (std::size_t j = 0; j < vertices_.size(); ++j) vmat_.row(static_cast<Eigen::Index>(j)) = vertices_[j].transpose();
    pmat_.resize(static_cast<Eigen::Index>(polar_.size()), dim_);
    for (std::size_t i = 0; i < polar_.size(); ++i) pmat_.row(static_cast<Eigen::Index>(i)) = polar_[i].transpose();
    double lo = vertices_.front().norm(), hi = lo;
    for (const auto& z : vertices_) {
      lo = std::min(lo, z.norm());
      hi = std::max(hi, z.norm());
    }
    if (lo > 0 && hi / lo <= 1.0 + tol::circumradius_ratio) circumradius_ = hi;
  }

  int dim() const noexcept { return dim_; }
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }
  const std::vector<Vector>& polar_vertices() const noexcept { return polar_; }
  std::optional<double> circumradius() const noexcept { return circumradius_; }
  // Row-stacked copies for batched dot products.
  const Matrix& vertex_matrix() const noexcept { return vmat_; }
  const Matrix& polar_matrix() const noexcept { return pmat_; }

 private:
  int dim_ = 0;
  std::vector<Vector> vertices_;
  std::vector<Vector> polar_;
  Matrix vmat_, pmat_;
  std::optional<double> circumradius_;
};

/// Value of a max over finitely many linear forms plus the indices attaining it.
struct ActiveMax {
  double value = 0.0;
  std::vector<int> active;
};

namespace detail {

inline void check_dim(const DualPolytope& P, const Vector& x) {
  if (x.size() != P.dim())
    fail(ErrorCode::DimensionMismatch,
         "expected dimension " + std::to_string(P.dim()) + ", got " + std::to_string(x.size()));
}

inline ActiveMax max_of_forms(const Matrix& rows, const Vector& x) {
  ActiveMax out;
  if (x.isZero(0.0)) {
    out.active.resize(static_cast<std::size_t>(rows.rows()));
    std::iota(out.active.begin(), out.active.end(), 0);
    return out;
  }
  const Vector dots = rows * x;
  out.value = dots.maxCoeff();
  for (Eigen::Index i = 0; i < dots.size(); ++i)
    if (within_active(dots[i], out.value)) out.active.push_back(static_cast<int>(i));
  return out;
}

inline std::vector<Vector> pick(const std::vector<Vector>& all, const std::vector<int>& idx) {
  std::vector<Vector> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(all[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace detail

/// gamma(x) = max_i <x, v_i>.
inline ActiveMax gauge(const DualPolytope& P, const Vector& x) {
  detail::check_dim(P, x);
  return detail::max_of_forms(P.polar_matrix(), x);
}

/// gamma°(x) = h_K(x) = max_j <x, z_j>.
inline ActiveMax support(const DualPolytope& P, const Vector& x) {
  detail::check_dim(P, x);
  return detail::max_of_forms(P.vertex_matrix(), x);
}

inline double gauge_value(const DualPolytope& P, const Vector& x) { return gauge(P, x).value; }
inline double support_value(const DualPolytope& P, const Vector& x) { return support(P, x).value; }

inline DualPolytope polar(const DualPolytope& P) {
  return DualPolytope(DualPolytope::Unchecked{}, P.polar_vertices(), P.vertices());
}

/// -K, whose gauge is x -> gamma(-x).
inline DualPolytope reflected(const DualPolytope& P) {
  std::vector<Vector> z, v;
  for (const auto& a : P.vertices()) z.push_back(-a);
  for (const auto& a : P.polar_vertices()) v.push_back(-a);
  return DualPolytope(DualPolytope::Unchecked{}, std::move(z), std::move(v));
}

struct NormalCone {
  Vector base_point;
  std::vector<Vector> generators;
  std::vector<int> generator_indices;
  int cone_dim = 0;

  bool contains(const Vector& w, double residual_tol = tol::cone_residual) const {
    return detail::in_cone(generators, w, residual_tol);
  }
};

inline void require_unit(const DualPolytope& P, const Vector& z, const ActiveMax& g) {
  if (std::abs(g.value - 1.0) > tol::unit_level)
    fail(ErrorCode::NotOnBoundary, "gauge of " + format_vector(z) + " is " + std::to_string(g.value));
  (void)P;
}

inline NormalCone normal_cone(const DualPolytope& P, const Vector& z) {
  auto g = gauge(P, z);
  require_unit(P, z, g);
  NormalCone nc;
  nc.base_point = z;
  nc.generator_indices = g.active;
  nc.generators = detail::pick(P.polar_vertices(), g.active);
  nc.cone_dim = detail::rank_of(nc.generators);
  return nc;
}

struct SubdifferentialResult {
  Vector point;
  std::vector<Vector> active_polar_vertices;
  std::vector<int> active_indices;
  bool is_singleton = false;
  std::optional<Vector> gradient;
};

inline SubdifferentialResult gauge_subdifferential(const DualPolytope& P, const Vector& x) {
  auto g = gauge(P, x);
  SubdifferentialResult r;
  r.point = x;
  r.active_indices = g.active;
  r.active_polar_vertices = detail::pick(P.polar_vertices(), g.active);
  r.is_singleton = g.active.size() == 1;
  if (r.is_singleton) r.gradient = r.active_polar_vertices.front();
  return r;
}

enum class FaceKind { vertex, singular, smooth };

constexpr std::string_view to_string(FaceKind k) noexcept {
  switch (k) {
    case FaceKind::vertex: return "vertex";
    case FaceKind::singular: return "singular";
    case FaceKind::smooth: return "smooth";
  }
  return "?";
}

struct FaceDescriptor {
  int face_dim = 0;
  std::vector<int> containing_facets;
  FaceKind classification = FaceKind::smooth;
};

inline FaceDescriptor face_of(const DualPolytope& P, const Vector& z) {
  auto g = gauge(P, z);
  require_unit(P, z, g);
  FaceDescriptor f;
  f.containing_facets = g.active;
  f.face_dim = P.dim() - detail::rank_of(detail::pick(P.polar_vertices(), g.active));
  if (f.face_dim == 0)
    f.classification = FaceKind::vertex;
  else if (f.face_dim == P.dim() - 1)
    f.classification = FaceKind::smooth;
  else
    f.classification = FaceKind::singular;
  return f;
}

// ---------------------------------------------------------------------------
// construction

namespace detail {

inline void inconsistent(const std::string& what) { fail(ErrorCode::InconsistentPair, what); }

inline std::uint64_t binomial(int m, int k) {
  if (k < 0 || k > m) return 0;
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r > 1e18L ? std::uint64_t(-1) : static_cast<std::uint64_t>(std::llround(r));
}

// Every vertex of {x : <x,a> <= 1 for a in A} must appear in B. Skipped when the
// subset enumeration would be too large.
inline void check_complete(const std::vector<Vector>& a, const Matrix& amat, const std::vector<Vector>& b,
                           const char* a_name, const char* b_name) {
  const int n = static_cast<int>(a.front().size());
  const int m = static_cast<int>(a.size());
  if (binomial(m, n) > 2000000ULL) return;
  double scale = 1.0;
  for (const auto& q : b) scale = std::max(scale, q.norm());
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Matrix sys(n, n);
  const Vector ones = Vector::Ones(n);
  while (true) {
    for (int r = 0; r < n; ++r) sys.row(r) = a[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])].transpose();
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.isInvertible()) {
      Vector p = lu.solve(ones);
      if ((amat * p).maxCoeff() <= 1.0 + tol::incidence) {
        bool found = false;
        for (const auto& q : b)
          if ((q - p).norm() <= 1e-8 * scale) { found = true; break; }
        if (!found)
          inconsistent(std::string("the facets in ") + a_name + " produce a vertex " + format_vector(p) +
                       " missing from " + b_name);
      }
    }
    int k = n - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - n + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int r = k + 1; r < n; ++r) idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
  }
}

inline void check_list(const std::vector<Vector>& list, const char* name, int n) {
  if (list.empty()) inconsistent(std::string(name) + " is empty");
  for (const auto& p : list) {
    if (p.size() != n) fail(ErrorCode::DimensionMismatch, std::string(name) + " entry " + format_vector(p));
    if (!p.allFinite()) inconsistent(std::string(name) + " has a non-finite entry");
  }
  const double dedup = tol::dedup_rel * std::max(bbox_diameter(list), 1e-300);
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j)
      if ((list[i] - list[j]).norm() <= dedup)
        inconsistent(std::string(name) + " has duplicate " + format_vector(list[i]));
  for (int k = 0; k < n; ++k) {
    Vector e = Vector::Zero(n);
    e[k] = 1.0;
    double up = -1e300, down = -1e300;
    for (const auto& p : list) {
      up = std::max(up, p.dot(e));
      down = std::max(down, -p.dot(e));
    }
    if (!(up > 0 && down > 0))
      inconsistent(std::string("origin not interior to conv(") + name + ") along axis " + std::to_string(k));
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < list.size(); ++j)
      if (j != i) others.push_back(list[j]);
    if (in_convex_hull(others, list[i], 1e-12))
      inconsistent(std::string(name) + " entry " + format_vector(list[i]) +
                   " is not extreme (convex combination of the others)");
  }
}

}  // namespace detail

/// Ingests both representations and verifies every consistency condition.
inline DualPolytope build_dual_pair(const std::vector<Vector>& vertices, const std::vector<Vector>& polar_vertices) {
  if (vertices.empty() || polar_vertices.empty()) detail::inconsistent("empty vertex or polar-vertex list");
  const int n = static_cast<int>(vertices.front().size());
  if (n < 1) fail(ErrorCode::DimensionMismatch, "zero-dimensional vertex");
  if (static_cast<int>(polar_vertices.front().size()) != n)
    fail(ErrorCode::DimensionMismatch, "vertices have dimension " + std::to_string(n) + ", polar vertices " +
                                           std::to_string(polar_vertices.front().size()));
  detail::check_list(vertices, "vertices", n);
  detail::check_list(polar_vertices, "polar_vertices", n);

  DualPolytope P(DualPolytope::Unchecked{}, vertices, polar_vertices);
  const Matrix dots = P.vertex_matrix() * P.polar_matrix().transpose();  // z_j . v_i
  for (Eigen::Index j = 0; j < dots.rows(); ++j) {
    const double mx = dots.row(j).maxCoeff();
    if (std::abs(mx - 1.0) > tol::incidence)
      detail::inconsistent("vertex " + format_vector(vertices[static_cast<std::size_t>(j)]) +
                           " has max <z,v> = " + std::to_string(mx));
    std::vector<Vector> act;
    for (Eigen::Index i = 0; i < dots.cols(); ++i)
      if (std::abs(dots(j, i) - 1.0) <= tol::incidence) act.push_back(polar_vertices[static_cast<std::size_t>(i)]);
    if (detail::rank_of(act) < n)
      detail::inconsistent("vertex " + format_vector(vertices[static_cast<std::size_t>(j)]) +
                           " lies on fewer than n independent facets");
  }
  for (Eigen::Index i = 0; i < dots.cols(); ++i) {
    const double mx = dots.col(i).maxCoeff();
    if (std::abs(mx - 1.0) > tol::incidence)
      detail::inconsistent("polar vertex " + format_vector(polar_vertices[static_cast<std::size_t>(i)]) +
                           " has max <z,v> = " + std::to_string(mx));
    std::vector<Vector> act;
    for (Eigen::Index j = 0; j < dots.rows(); ++j)
      if (std::abs(dots(j, i) - 1.0) <= tol::incidence) act.push_back(vertices[static_cast<std::size_t>(j)]);
    if (detail::rank_of(act) < n)
      detail::inconsistent("polar vertex " + format_vector(polar_vertices[static_cast<std::size_t>(i)]) +
                           " is not a facet normal (fewer than n independent vertices attain 1)");
  }
  detail::check_complete(polar_vertices, P.polar_matrix(), vertices, "polar_vertices", "vertices");
  detail::check_complete(vertices, P.vertex_matrix(), polar_vertices, "vertices", "polar_vertices");

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> nd;
  for (int s = 0; s < 256; ++s) {
    Vector x(n), y(n);
    for (int k = 0; k < n; ++k) {
      x[k] = nd(rng);
      y[k] = nd(rng);
    }
    const double lhs = x.dot(y);
    const double rhs = gauge_value(P, x) * support_value(P, y);
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs)))
      detail::inconsistent("Cauchy-Schwarz fails for x=" + format_vector(x) + ", y=" + format_vector(y));
  }
  return P;
}

/// Hull plus facet normals of a point cloud in dimension 2 or 3.
inline DualPolytope build_polytope(const std::vector<Vector>& points) {
  if (points.empty()) fail(ErrorCode::DegenerateHull, "no points");
  const int n = static_cast<int>(points.front().size());
  for (const auto& p : points) {
    if (p.size() != n) fail(ErrorCode::DimensionMismatch, "mixed point dimensions");
    if (!p.allFinite()) fail(ErrorCode::InvalidShape, "non-finite point");
  }
  if (n != 2 && n != 3)
    fail(ErrorCode::UnsupportedDimension, "hulls are computed in dimension 2 or 3 only; supply both lists");
  const double diam = detail::bbox_diameter(points);
  if (diam == 0.0) fail(ErrorCode::DegenerateHull, "all points coincide");
  const auto pts = detail::dedup_points(points, tol::dedup_rel * diam);
  if (static_cast<int>(pts.size()) < n + 1)
    fail(ErrorCode::DegenerateHull, "need at least " + std::to_string(n + 1) + " distinct points");
  const double eps = 1e-12 * diam;

  std::vector<Vector> verts, normals;
  if (n == 2) {
    verts = detail::monotone_chain(pts, eps * diam);
    if (verts.size() < 3) fail(ErrorCode::DegenerateHull, "points are collinear");
    for (std::size_t j = 0; j < verts.size(); ++j) {
      const Vector& a = verts[j];
      const Vector& b = verts[(j + 1) % verts.size()];
      const double c = a[0] * b[1] - a[1] * b[0];
      if (c <= eps * diam)
        fail(ErrorCode::OriginNotInterior, "origin is not strictly inside the hull (edge " + format_vector(a) +
                                               " -> " + format_vector(b) + ")");
      normals.push_back(make_vector({(b[1] - a[1]) / c, (a[0] - b[0]) / c}));
    }
  } else {
    auto hull = detail::incremental_hull3(pts, eps);
    if (hull.faces.empty()) fail(ErrorCode::DegenerateHull, "points are coplanar");
    for (const auto& f : hull.faces) {
      const Eigen::Vector3d a = pts[static_cast<std::size_t>(f[0])].head<3>();
      const Eigen::Vector3d b = pts[static_cast<std::size_t>(f[1])].head<3>();
      const Eigen::Vector3d c = pts[static_cast<std::size_t>(f[2])].head<3>();
      Eigen::Vector3d nrm = (b - a).cross(c - a);
      nrm.normalize();
      const double off = nrm.dot(a);
      if (off <= eps) fail(ErrorCode::OriginNotInterior, "origin is not strictly inside the hull");
      Vector v = nrm / off;
      bool dup = false;
      for (const auto& w : normals)
        if ((w - v).norm() <= 1e-9 * (1.0 + v.norm())) { dup = true; break; }
      if (!dup) normals.push_back(v);
    }
    for (const auto& p : pts) {
      std::vector<Vector> act;
      double mx = -1e300;
      for (const auto& v : normals) mx = std::max(mx, p.dot(v));
      if (std::abs(mx - 1.0) > 1e-9) continue;
      for (const auto& v : normals)
        if (std::abs(p.dot(v) - 1.0) <= 1e-9) act.push_back(v);
      if (detail::rank_of(act) == 3) verts.push_back(p);
    }
  }
  return DualPolytope(DualPolytope::Unchecked{}, std::move(verts), std::move(normals));
}

// ---------------------------------------------------------------------------
// presets

/// The cube [-1,1]^n; gamma is the max norm and gamma° the l1 norm.
inline DualPolytope cube(int n) {
  if (n < 1 || n > 16) fail(ErrorCode::UnsupportedDimension, "cube dimension " + std::to_string(n));
  std::vector<Vector> z, v;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vector p(n);
    for (int k = 0; k < n; ++k) p[k] = (mask >> k) & 1u ? -1.0 : 1.0;
    z.push_back(p);
  }
  for (int k = 0; k < n; ++k)
    for (double s : {1.0, -1.0}) {
      Vector e = Vector::Zero(n);
      e[k] = s;
      v.push_back(e);
    }
  if (n <= 8) return build_dual_pair(z, v);
  return DualPolytope(DualPolytope::Unchecked{}, std::move(z), std::move(v));
}

inline DualPolytope cross_polytope(int n) { return polar(cube(n)); }

/// Regular m-gon inscribed in the circle of the given radius, first vertex at angle `phase`.
inline DualPolytope regular_polygon(int m, double radius = 1.0, double phase = 0.0) {
  if (m < 3) fail(ErrorCode::DegenerateHull, "polygon needs at least 3 vertices");
  std::vector<Vector> pts;
  for (int k = 0; k < m; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / m;
    pts.push_back(make_vector({radius * std::cos(a), radius * std::sin(a)}));
  }
  return build_polytope(pts);
}

}  // namespace gaugedist
