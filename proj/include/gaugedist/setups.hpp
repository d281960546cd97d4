#pragma once

#include "gaugedist/boundary.hpp"
#include "gaugedist/closed_forms.hpp"
#include "gaugedist/oracle.hpp"
#include "gaugedist/polytope.hpp"

#include <memory>
#include <optional>
#include <string>

namespace gaugedist {

/// The worked examples with closed-form distance fields.
enum class SetupKind { parabola, sphere_polytope, ball_maxnorm, two_disks };

constexpr std::string_view to_string(SetupKind k) noexcept {
  switch (k) {
    case SetupKind::parabola: return "parabola";
    case SetupKind::sphere_polytope: return "sphere_polytope";
    case SetupKind::ball_maxnorm: return "ball_maxnorm";
    case SetupKind::two_disks: return "two_disks";
  }
  return "?";
}

inline std::optional<SetupKind> setup_from_string(std::string_view s) {
  for (auto k : {SetupKind::parabola, SetupKind::sphere_polytope, SetupKind::ball_maxnorm, SetupKind::two_disks})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// A polytope, a boundary and (where the example has one) a closed-form field.
/// For the sphere setups the side of the boundary follows the query point.
class Setup {
 public:
  static Setup parabola() { return Setup(SetupKind::parabola, cube(2), BoundaryShape::parabola(ParabolaSide::above)); }

  static Setup sphere_polytope(DualPolytope P) {
    if (!P.circumradius()) fail(ErrorCode::NotInscribed, "vertices are not equidistant from the origin");
    const int n = P.dim();
    return Setup(SetupKind::sphere_polytope, std::move(P), BoundaryShape::unit_sphere(n, Side::interior));
  }
  static Setup sphere_square() { return sphere_polytope(cube(2)); }

  static Setup ball_maxnorm(int n) {
    return Setup(SetupKind::ball_maxnorm, cube(n), BoundaryShape::unit_sphere(n, Side::interior), n);
  }

  static Setup two_disks() { return Setup(SetupKind::two_disks, cube(2), BoundaryShape::two_unit_disks()); }

  SetupKind kind() const { return kind_; }
  int dim() const { return P_.dim(); }
  const DualPolytope& polytope() const { return P_; }
  std::string name() const {
    std::string s(to_string(kind_));
    if (kind_ == SetupKind::ball_maxnorm) s += "(n=" + std::to_string(n_) + ")";
    return s;
  }

  /// Boundary oriented so that x lies in the closure of U.
  BoundaryShape boundary_for(const Vector& x) const {
    switch (kind_) {
      case SetupKind::parabola:
        return BoundaryShape::parabola(x[1] >= x[0] * x[0] ? ParabolaSide::above : ParabolaSide::below);
      case SetupKind::sphere_polytope:
      case SetupKind::ball_maxnorm:
        return BoundaryShape::unit_sphere(dim(), x.norm() <= 1.0 ? Side::interior : Side::exterior);
      case SetupKind::two_disks: return B_;
    }
    return B_;
  }
  /// The boundary with its default orientation.
  const BoundaryShape& boundary() const { return B_; }

  bool in_domain(const Vector& x) const {
    if (kind_ != SetupKind::two_disks) return true;
    return region_membership(B_, x) != Membership::outside;
  }

  DistanceResult closed_form(const Vector& x) const {
    switch (kind_) {
      case SetupKind::parabola: return rho_parabola_maxnorm(x);
      case SetupKind::sphere_polytope: return rho_sphere_polytope(P_, x);
      case SetupKind::ball_maxnorm: return rho_ball_maxnorm(x, n_);
      case SetupKind::two_disks: return rho_two_disks_maxnorm(x);
    }
    fail(ErrorCode::InvalidShape, "unknown setup");
  }

  /// rho in the closure of U, minus the distance to the boundary outside it.
  double signed_value(const Vector& x, SignConvention conv = SignConvention::reflected) const {
    const auto m = region_membership(B_, x);
    if (m != Membership::outside) return closed_form(x).value;
    switch (kind_) {
      case SetupKind::sphere_polytope:
        return -rho_sphere_polytope(conv == SignConvention::reflected ? reflected(P_) : P_, x).value;
      case SetupKind::parabola:
      case SetupKind::ball_maxnorm: return -closed_form(x).value;  // centrally symmetric K
      case SetupKind::two_disks: break;
    }
    fail(ErrorCode::OutsideDomain, "no signed closed form inside the disks");
  }

  /// Default plotting window (the 3-D ball uses the slice x3 = 0.3).
  Window default_window() const {
    switch (kind_) {
      case SetupKind::parabola: return {make_vector({-2.0, -2.5}), make_vector({2.0, 4.0})};
      case SetupKind::sphere_polytope: return {make_vector({-3.0, -3.0}), make_vector({3.0, 3.0})};
      case SetupKind::ball_maxnorm:
        if (n_ == 2) return {make_vector({-4.5, -4.5}), make_vector({4.5, 4.5})};
        return {make_vector({-3.0, -3.0}), make_vector({3.0, 3.0})};
      case SetupKind::two_disks: return {make_vector({-4.5, -4.5}), make_vector({4.5, 4.5})};
    }
    return {};
  }
  /// Fixed trailing coordinates for plotting a 2-D slice of a 3-D setup.
  Vector default_slice() const { return dim() == 3 ? make_vector({0.3}) : Vector(0); }

  Oracle make_oracle(int budget) const { return Oracle(P_, B_, budget); }

 private:
  Setup(SetupKind k, DualPolytope P, BoundaryShape B, int n = 2)
      : kind_(k), P_(std::move(P)), B_(std::move(B)), n_(n) {}

  SetupKind kind_;
  DualPolytope P_;
  BoundaryShape B_;
  int n_;
};

/// Region of x in one of the worked examples.
inline RegionTag classify_region(const Setup& s, const Vector& x) {
  if (!s.in_domain(x)) fail(ErrorCode::OutsideDomain, format_vector(x) + " is outside the domain");
  return s.closed_form(x).region;
}

}  // namespace gaugedist
