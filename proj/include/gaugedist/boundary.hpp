#pragma once

#include "gaugedist/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gaugedist {

/// Which side of a closed curve/surface is the region U.
enum class Side { interior, exterior };
/// Which side of the parabola x2 = x1^2 is U.
enum class ParabolaSide { above, below };

struct Sphere {
  Vector center;
  double radius = 1.0;
  Side side = Side::interior;
};

struct Parabola {
  ParabolaSide side = ParabolaSide::above;
};

/// Simple polygon given as a counter-clockwise vertex loop.
struct Polygon {
  std::vector<Vector> loop;
  Side side = Side::interior;
};

struct Disk {
  Vector center;
  double radius = 1.0;
};

/// U = the plane minus the union of the disks.
struct DiskUnionExterior {
  std::vector<Disk> disks;
};

/// Axis-aligned box.
struct Window {
  Vector lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vector& x) const {
    return ((x - lo).array() >= 0).all() && ((hi - x).array() >= 0).all();
  }
};

/// One smooth parametrized piece of a planar boundary curve.
struct CurvePiece {
  enum class Kind { arc, parabola, segment };
  Kind kind = Kind::arc;
  Eigen::Vector2d a{0, 0}, b{0, 0};  // arc: a = center; segment: endpoints
  double radius = 0.0;
  double t0 = 0.0, t1 = 1.0;
  bool periodic = false;

  Eigen::Vector2d point(double t) const {
    switch (kind) {
      case Kind::arc: return a + radius * Eigen::Vector2d(std::cos(t), std::sin(t));
      case Kind::parabola: return {t, t * t};
      case Kind::segment: return a + t * (b - a);
    }
    return a;
  }
  Eigen::Vector2d tangent(double t) const {
    switch (kind) {
      case Kind::arc: return Eigen::Vector2d(-std::sin(t), std::cos(t));
      case Kind::parabola: return Eigen::Vector2d(1.0, 2.0 * t).normalized();
      case Kind::segment: return (b - a).normalized();
    }
    return a;
  }
  double length() const {
    switch (kind) {
      case Kind::arc: return radius * (t1 - t0);
      case Kind::segment: return (b - a).norm() * (t1 - t0);
      case Kind::parabola: {
        auto F = [](double t) { return 0.5 * t * std::sqrt(1 + 4 * t * t) + 0.25 * std::asinh(2 * t); };
        return F(t1) - F(t0);
      }
    }
    return 0.0;
  }
};

enum class Membership { inside, outside, on_boundary };

constexpr std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::inside: return "inside";
    case Membership::outside: return "outside";
    case Membership::on_boundary: return "on_boundary";
  }
  return "?";
}

class BoundaryShape {
 public:
  using Variant = std::variant<Sphere, Parabola, Polygon, DiskUnionExterior>;

  static BoundaryShape sphere(Vector center, double radius, Side side) {
    if (!(radius > 0) || !std::isfinite(radius)) fail(ErrorCode::InvalidShape, "sphere radius must be positive");
    if (center.size() < 1 || !center.allFinite()) fail(ErrorCode::InvalidShape, "bad sphere center");
    return BoundaryShape(Sphere{std::move(center), radius, side});
  }
  static BoundaryShape unit_sphere(int n, Side side) { return sphere(Vector::Zero(n), 1.0, side); }

  static BoundaryShape parabola(ParabolaSide side) { return BoundaryShape(Parabola{side}); }

  static BoundaryShape polygon(std::vector<Vector> loop, Side side) {
    if (loop.size() < 3) fail(ErrorCode::InvalidShape, "polygon needs at least 3 vertices");
    for (const auto& p : loop)
      if (p.size() != 2 || !p.allFinite()) fail(ErrorCode::InvalidShape, "polygon vertices must be finite 2-vectors");
    double area = 0.0;
    const std::size_t m = loop.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = loop[i];
      const auto& b = loop[(i + 1) % m];
      area += a[0] * b[1] - a[1] * b[0];
    }
    if (!(area > 0)) fail(ErrorCode::InvalidShape, "polygon loop must be counter-clockwise");
    auto orient = [](const Vector& p, const Vector& q, const Vector& r) {
      const double v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
      return (v > 0) - (v < 0);
    };
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        if (j == i + 1 || (i == 0 && j == m - 1)) continue;
        const auto &p1 = loop[i], &p2 = loop[(i + 1) % m], &q1 = loop[j], &q2 = loop[(j + 1) % m];
        if (orient(p1, p2, q1) * orient(p1, p2, q2) <= 0 && orient(q1, q2, p1) * orient(q1, q2, p2) <= 0)
          fail(ErrorCode::InvalidShape, "polygon loop is not simple");
      }
    return BoundaryShape(Polygon{std::move(loop), side});
  }

  static BoundaryShape disk_union_exterior(std::vector<Disk> disks) {
    if (disks.empty()) fail(ErrorCode::InvalidShape, "disk union needs at least one disk");
    for (const auto& d : disks)
      if (d.center.size() != 2 || !d.center.allFinite() || !(d.radius > 0))
        fail(ErrorCode::InvalidShape, "disks need a finite 2-D center and positive radius");
    return BoundaryShape(DiskUnionExterior{std::move(disks)});
  }

  /// The exterior of the unit disks centred at (-1,0) and (1,0).
  static BoundaryShape two_unit_disks() {
    return disk_union_exterior({Disk{make_vector({-1.0, 0.0}), 1.0}, Disk{make_vector({1.0, 0.0}), 1.0}});
  }

  int dim() const {
    if (auto* s = std::get_if<Sphere>(&v_)) return static_cast<int>(s->center.size());
    return 2;
  }
  const Variant& variant() const { return v_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }
  bool is_bounded_curve() const { return !std::holds_alternative<Parabola>(v_); }

 private:
  explicit BoundaryShape(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct FootpointResult {
  Vector foot;
  double euclid_dist = 0.0;
  Vector normal;
  std::vector<Vector> tangent_frame;
};

namespace detail {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a, double base) {
  // into [base, base + 2pi)
  double r = std::fmod(a - base, two_pi);
  if (r < 0) r += two_pi;
  return base + r;
}

inline double on_tol(const Vector& y) { return 1e-9 * (1.0 + y.cwiseAbs().maxCoeff()); }

// Valid arcs of each circle in a disk union: the parts not covered by another disk.
inline std::vector<CurvePiece> disk_union_arcs(const DiskUnionExterior& du) {
  std::vector<CurvePiece> out;
  for (std::size_t i = 0; i < du.disks.size(); ++i) {
    const auto& di = du.disks[i];
    std::vector<std::pair<double, double>> cut;  // excluded open angle intervals
    bool swallowed = false;
    for (std::size_t j = 0; j < du.disks.size(); ++j) {
      if (j == i) continue;
      const auto& dj = du.disks[j];
      const double D = (dj.center - di.center).norm();
      if (D + di.radius <= dj.radius && !(D == 0 && di.radius == dj.radius && j > i)) {
        swallowed = true;
        break;
      }
      if (D >= di.radius + dj.radius || D + dj.radius <= di.radius) continue;
      const double c = (di.radius * di.radius + D * D - dj.radius * dj.radius) / (2 * di.radius * D);
      const double half = std::acos(std::clamp(c, -1.0, 1.0));
      if (half <= 0) continue;
      const double mid = std::atan2(dj.center[1] - di.center[1], dj.center[0] - di.center[0]);
      cut.emplace_back(mid - half, mid + half);
    }
    if (swallowed) continue;
    CurvePiece base;
    base.kind = CurvePiece::Kind::arc;
    base.a = di.center.head<2>();
    base.radius = di.radius;
    if (cut.empty()) {
      base.t0 = 0.0;
      base.t1 = two_pi;
      base.periodic = true;
      out.push_back(base);
      continue;
    }
    // Start from the end of the first cut and sweep once around the circle.
    const double start = cut.front().second;
    std::vector<std::pair<double, double>> c2;
    for (auto [lo, hi] : cut) {
      double l = wrap_angle(lo, start);
      double h = l + (hi - lo);
      c2.emplace_back(l, h);
      if (h > start + two_pi) c2.emplace_back(start, h - two_pi);
    }
    std::sort(c2.begin(), c2.end());
    double cursor = start;
    for (auto [l, h] : c2) {
      if (l > cursor) {
        CurvePiece p = base;
        p.t0 = cursor;
        p.t1 = std::min(l, start + two_pi);
        if (p.t1 > p.t0) out.push_back(p);
      }
      cursor = std::max(cursor, h);
    }
    if (cursor < start + two_pi) {
      CurvePiece p = base;
      p.t0 = cursor;
      p.t1 = start + two_pi;
      out.push_back(p);
    }
  }
  return out;
}

inline std::vector<CurvePiece> polygon_edges(const Polygon& pg) {
  std::vector<CurvePiece> out;
  const std::size_t m = pg.loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    CurvePiece p;
    p.kind = CurvePiece::Kind::segment;
    p.a = pg.loop[i].head<2>();
    p.b = pg.loop[(i + 1) % m].head<2>();
    p.t0 = 0.0;
    p.t1 = 1.0;
    out.push_back(p);
  }
  return out;
}

// Real roots of 2t^3 + (1 - 2 x2) t - x1 = 0 (stationary points of |(t,t^2) - x|^2).
inline std::vector<double> parabola_stationary(double x1, double x2) {
  const double p = 0.5 - x2, q = -0.5 * x1;  // t^3 + p t + q = 0
  std::vector<double> roots;
  const double disc = q * q / 4 + p * p * p / 27;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    roots.push_back(std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s));
  } else {
    const double r = std::sqrt(-p / 3);
    const double phi = r > 0 ? std::acos(std::clamp(-q / (2 * r * r * r), -1.0, 1.0)) : 0.0;
    for (int k = 0; k < 3; ++k) roots.push_back(2 * r * std::cos((phi - two_pi * k) / 3));
  }
  for (double& t : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = 2 * t * t * t + (1 - 2 * x2) * t - x1;
      const double df = 6 * t * t + (1 - 2 * x2);
      if (df == 0) break;
      const double step = f / df;
      t -= step;
      if (std::abs(step) < 1e-17 * (1 + std::abs(t))) break;
    }
  }
  return roots;
}

// Nearest point of a piece to x, with its parameter.
inline std::pair<double, Eigen::Vector2d> nearest_on_piece(const CurvePiece& c, const Eigen::Vector2d& x) {
  switch (c.kind) {
    case CurvePiece::Kind::segment: {
      const Eigen::Vector2d d = c.b - c.a;
      const double t = std::clamp((x - c.a).dot(d) / d.squaredNorm(), c.t0, c.t1);
      return {t, c.point(t)};
    }
    case CurvePiece::Kind::arc: {
      const Eigen::Vector2d r = x - c.a;
      double ang = r.norm() > 0 ? std::atan2(r[1], r[0]) : c.t0;
      if (c.periodic) return {ang, c.point(ang)};
      ang = wrap_angle(ang, c.t0);
      if (ang <= c.t1) return {ang, c.point(ang)};
      const auto p0 = c.point(c.t0), p1 = c.point(c.t1);
      return (x - p0).norm() <= (x - p1).norm() ? std::pair{c.t0, p0} : std::pair{c.t1, p1};
    }
    case CurvePiece::Kind::parabola: {
      double best_t = c.t0;
      double best = 1e300;
      auto consider = [&](double t) {
        t = std::clamp(t, c.t0, c.t1);
        const double d = (c.point(t) - x).norm();
        if (d < best) {
          best = d;
          best_t = t;
        }
      };
      for (double t : parabola_stationary(x[0], x[1])) consider(t);
      consider(c.t0);
      consider(c.t1);
      return {best_t, c.point(best_t)};
    }
  }
  return {0.0, c.a};
}

inline std::vector<Vector> orthonormal_complement(const Vector& nu) {
  const int n = static_cast<int>(nu.size());
  Matrix m = Matrix::Identity(n, n);
  m.col(0) = nu;
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  std::vector<Vector> out;
  for (int k = 1; k < n; ++k) out.push_back(q.col(k));
  return out;
}

}  // namespace detail

/// Smooth pieces of a planar boundary. Parabola pieces are clipped to `x1_range`.
inline std::vector<CurvePiece> boundary_pieces(const BoundaryShape& B,
                                               std::optional<std::pair<double, double>> x1_range = {}) {
  std::vector<CurvePiece> out;
  if (auto* s = B.as<Sphere>()) {
    if (s->center.size() != 2) fail(ErrorCode::UnsupportedDimension, "curve pieces exist in 2-D only");
    CurvePiece c;
    c.kind = CurvePiece::Kind::arc;
    c.a = s->center.head<2>();
    c.radius = s->radius;
    c.t0 = 0.0;
    c.t1 = detail::two_pi;
    c.periodic = true;
    out.push_back(c);
  } else if (B.as<Parabola>()) {
    if (!x1_range) fail(ErrorCode::WindowRequired, "the parabola is unbounded; supply a window");
    CurvePiece c;
    c.kind = CurvePiece::Kind::parabola;
    c.t0 = x1_range->first;
    c.t1 = x1_range->second;
    out.push_back(c);
  } else if (auto* pg = B.as<Polygon>()) {
    out = detail::polygon_edges(*pg);
  } else if (auto* du = B.as<DiskUnionExterior>()) {
    out = detail::disk_union_arcs(*du);
  }
  return out;
}

/// Quasi-uniform points on the boundary.
inline std::vector<Vector> sample_boundary(const BoundaryShape& B, int n, const std::optional<Window>& window = {}) {
  if (n < 2) fail(ErrorCode::InvalidShape, "need at least 2 samples");
  std::vector<Vector> out;
  if (auto* s = B.as<Sphere>()) {
    const int d = static_cast<int>(s->center.size());
    if (d == 2) {
      for (int k = 0; k < n; ++k) {
        const double a = detail::two_pi * k / n;
        out.push_back(s->center + s->radius * make_vector({std::cos(a), std::sin(a)}));
      }
      // exact quarter points keep the symmetric samples symmetric
      for (auto& p : out)
        for (Eigen::Index i = 0; i < 2; ++i)
          if (std::abs(p[i] - s->center[i]) < 1e-15 * s->radius) p[i] = s->center[i];
      return out;
    }
    if (d == 3) {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int k = 0; k < n; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        out.push_back(s->center + s->radius * make_vector({r * std::cos(phi), r * std::sin(phi), z}));
      }
      return out;
    }
    fail(ErrorCode::UnsupportedDimension, "sphere sampling in dimension 2 or 3 only");
  }
  std::optional<std::pair<double, double>> range;
  if (B.as<Parabola>()) {
    if (!window) fail(ErrorCode::WindowRequired, "the parabola is unbounded; supply a window");
    range = std::pair{window->lo[0], window->hi[0]};
    for (int k = 0; k < n; ++k) {
      const double t = range->first + (range->second - range->first) * k / (n - 1);
      out.push_back(make_vector({t, t * t}));
    }
    return out;
  }
  const auto pieces = boundary_pieces(B);
  double total = 0.0;
  for (const auto& c : pieces) total += c.length();
  if (total <= 0) return out;
  // Equal arc-length stations along the concatenated pieces.
  for (int k = 0; k < n; ++k) {
    double s = total * k / n;
    for (const auto& c : pieces) {
      const double L = c.length();
      if (s <= L || &c == &pieces.back()) {
        const double t = c.t0 + (c.t1 - c.t0) * std::min(1.0, s / L);
        const Eigen::Vector2d p = c.point(t);
        out.push_back(make_vector({p[0], p[1]}));
        break;
      }
      s -= L;
    }
  }
  return out;
}

/// Nearest boundary point in the Euclidean sense (the first one on ties).
inline FootpointResult footpoint(const BoundaryShape& B, const Vector& x);

inline Membership region_membership(const BoundaryShape& B, const Vector& x) {
  constexpr double on = tol::on_boundary;
  if (auto* s = B.as<Sphere>()) {
    const double r = (x - s->center).norm() - s->radius;
    if (std::abs(r) <= on) return Membership::on_boundary;
    const bool in_ball = r < 0;
    return (in_ball == (s->side == Side::interior)) ? Membership::inside : Membership::outside;
  }
  if (auto* p = B.as<Parabola>()) {
    const double g = x[1] - x[0] * x[0];
    if (std::abs(g) <= on * (1 + std::abs(x[0]))) return Membership::on_boundary;
    return ((g > 0) == (p->side == ParabolaSide::above)) ? Membership::inside : Membership::outside;
  }
  if (auto* pg = B.as<Polygon>()) {
    const Eigen::Vector2d q = x.head<2>();
    double dmin = 1e300;
    for (const auto& c : detail::polygon_edges(*pg)) dmin = std::min(dmin, (detail::nearest_on_piece(c, q).second - q).norm());
    if (dmin <= on) return Membership::on_boundary;
    // crossing number
    bool in = false;
    const auto& L = pg->loop;
    for (std::size_t i = 0, j = L.size() - 1; i < L.size(); j = i++) {
      if (((L[i][1] > q[1]) != (L[j][1] > q[1])) &&
          (q[0] < (L[j][0] - L[i][0]) * (q[1] - L[i][1]) / (L[j][1] - L[i][1]) + L[i][0]))
        in = !in;
    }
    return (in == (pg->side == Side::interior)) ? Membership::inside : Membership::outside;
  }
  const auto& du = *B.as<DiskUnionExterior>();
  double m = 1e300;
  for (const auto& d : du.disks) m = std::min(m, (x - d.center).norm() - d.radius);
  if (std::abs(m) <= on) return Membership::on_boundary;
  return m > 0 ? Membership::inside : Membership::outside;
}

/// Unit normal at y pointing into U.
inline Vector inward_normal(const BoundaryShape& B, const Vector& y) {
  if (y.size() != B.dim()) fail(ErrorCode::DimensionMismatch, "point dimension differs from boundary dimension");
  const double t = detail::on_tol(y);
  if (auto* s = B.as<Sphere>()) {
    const Vector r = y - s->center;
    if (std::abs(r.norm() - s->radius) > t) fail(ErrorCode::NotOnBoundary, format_vector(y));
    return s->side == Side::interior ? Vector(-r / r.norm()) : Vector(r / r.norm());
  }
  if (auto* p = B.as<Parabola>()) {
    if (std::abs(y[1] - y[0] * y[0]) > t * (1 + std::abs(y[0]))) fail(ErrorCode::NotOnBoundary, format_vector(y));
    Vector nu = make_vector({-2 * y[0], 1.0}) / std::sqrt(1 + 4 * y[0] * y[0]);
    return p->side == ParabolaSide::above ? nu : Vector(-nu);
  }
  if (auto* pg = B.as<Polygon>()) {
    const Eigen::Vector2d q = y.head<2>();
    for (const auto& v : pg->loop)
      if ((v - y).norm() <= t) fail(ErrorCode::CornerPoint, "polygon corner " + format_vector(y));
    for (const auto& c : detail::polygon_edges(*pg)) {
      if ((detail::nearest_on_piece(c, q).second - q).norm() <= t) {
        const Eigen::Vector2d d = (c.b - c.a).normalized();
        Vector nu = make_vector({-d[1], d[0]});
        return pg->side == Side::interior ? nu : Vector(-nu);
      }
    }
    fail(ErrorCode::NotOnBoundary, format_vector(y));
  }
  const auto& du = *B.as<DiskUnionExterior>();
  std::vector<const Disk*> on;
  for (const auto& d : du.disks) {
    const double r = (y - d.center).norm() - d.radius;
    if (r < -t) fail(ErrorCode::NotOnBoundary, format_vector(y) + " lies inside a disk");
    if (std::abs(r) <= t) on.push_back(&d);
  }
  if (on.empty()) fail(ErrorCode::NotOnBoundary, format_vector(y));
  if (on.size() > 1) fail(ErrorCode::CornerPoint, "point on two circles " + format_vector(y));
  const Vector r = y - on.front()->center;
  return r / r.norm();
}

/// Hessian of the Euclidean distance into U, evaluated at a boundary point.
inline Matrix euclid_dist_hessian(const BoundaryShape& B, const Vector& y) {
  const Vector nu = inward_normal(B, y);  // validates y; throws CornerPoint at corners
  const int n = B.dim();
  if (auto* s = B.as<Sphere>()) {
    const Vector u = (y - s->center) / s->radius;
    const Matrix proj = Matrix::Identity(n, n) - u * u.transpose();
    return (s->side == Side::interior ? -1.0 : 1.0) / s->radius * proj;
  }
  if (auto* p = B.as<Parabola>()) {
    const double t = y[0];
    const double kappa = 2.0 / std::pow(1 + 4 * t * t, 1.5);
    const Vector tan = make_vector({1.0, 2 * t}) / std::sqrt(1 + 4 * t * t);
    return (p->side == ParabolaSide::above ? -kappa : kappa) * tan * tan.transpose();
  }
  if (B.as<Polygon>()) return Matrix::Zero(2, 2);
  const auto& du = *B.as<DiskUnionExterior>();
  for (const auto& d : du.disks) {
    if (std::abs((y - d.center).norm() - d.radius) <= detail::on_tol(y)) {
      const Vector u = (y - d.center) / d.radius;
      return (Matrix::Identity(2, 2) - u * u.transpose()) / d.radius;
    }
  }
  (void)nu;
  fail(ErrorCode::NotOnBoundary, format_vector(y));
}

inline FootpointResult footpoint(const BoundaryShape& B, const Vector& x) {
  if (x.size() != B.dim()) fail(ErrorCode::DimensionMismatch, "point dimension differs from boundary dimension");
  FootpointResult fr;
  if (auto* s = B.as<Sphere>()) {
    Vector r = x - s->center;
    if (r.norm() == 0) {
      r = Vector::Zero(x.size());
      r[0] = 1.0;
    }
    fr.foot = s->center + s->radius * r / r.norm();
  } else {
    std::optional<std::pair<double, double>> range;
    if (B.as<Parabola>()) {
      // the foot is within |x - (x1, x1^2)| of x, so |t - x1| is bounded by that distance
      const double bound = std::abs(x[1] - x[0] * x[0]) + 1.0;
      range = std::pair{x[0] - bound, x[0] + bound};
    }
    const Eigen::Vector2d q = x.head<2>();
    double best = 1e300;
    Eigen::Vector2d foot = q;
    for (const auto& c : boundary_pieces(B, range)) {
      const auto [t, p] = detail::nearest_on_piece(c, q);
      (void)t;
      const double d = (p - q).norm();
      if (d < best) {
        best = d;
        foot = p;
      }
    }
    fr.foot = make_vector({foot[0], foot[1]});
  }
  fr.euclid_dist = (x - fr.foot).norm();
  try {
    fr.normal = inward_normal(B, fr.foot);
    fr.tangent_frame = detail::orthonormal_complement(fr.normal);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CornerPoint) throw;
  }
  return fr;
}

/// Euclidean distance to the boundary, positive in U and negative outside.
inline double euclid_signed_distance(const BoundaryShape& B, const Vector& x) {
  if (auto* s = B.as<Sphere>()) {
    const double r = (x - s->center).norm() - s->radius;
    return s->side == Side::interior ? -r : r;
  }
  const double d = footpoint(B, x).euclid_dist;
  return region_membership(B, x) == Membership::outside ? -d : d;
}

}  // namespace gaugedist
