#pragma once

#include "gaugedist/boundary.hpp"
#include "gaugedist/distance_result.hpp"
#include "gaugedist/oracle.hpp"
#include "gaugedist/polytope.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace gaugedist {

using ScalarField = std::function<double(const Vector&)>;

enum class DerivativeSource { formula, finite_difference };

struct DerivativeBundle {
  Vector grad;
  Matrix projector;
  Matrix jacobian_y;
  Matrix hessian;
  DerivativeSource source = DerivativeSource::formula;
};

namespace detail {

// Unique maximizing vertex of the support at nu, with a 1e-9 relative gap to the runner-up.
inline int unique_support_vertex(const DualPolytope& P, const Vector& nu) {
  check_dim(P, nu);
  const Vector dots = P.vertex_matrix() * nu;
  Eigen::Index best = 0;
  const double top = dots.maxCoeff(&best);
  double second = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < dots.size(); ++j)
    if (j != best) second = std::max(second, dots[j]);
  if (top - second <= 1e-9 * std::max(1.0, std::abs(top)))
    fail(ErrorCode::SupportNotDifferentiable, "support has several maximizing vertices at " + format_vector(nu));
  return static_cast<int>(best);
}

inline const Vector& unique_closest(const DistanceResult& res) {
  if (res.closest.size() != 1)
    fail(ErrorCode::MultipleClosestPoints, std::to_string(res.closest.size()) + " closest points");
  return res.closest.front();
}

}  // namespace detail

/// X(nu) = D gamma°(nu) nu^T / gamma°(nu).
inline Matrix x_projector(const DualPolytope& P, const Vector& nu) {
  const int j = detail::unique_support_vertex(P, nu);
  const Vector& z = P.vertices()[static_cast<std::size_t>(j)];
  return z * nu.transpose() / z.dot(nu);
}

/// D rho(x) = nu(y) / gamma°(nu(y)) at the unique closest point y.
inline Vector grad_rho(const DualPolytope& P, const BoundaryShape& B, const Vector& x, const DistanceResult& res) {
  (void)x;
  const Vector nu = inward_normal(B, detail::unique_closest(res));
  detail::unique_support_vertex(P, nu);
  return nu / support_value(P, nu);
}

/// Gradient of the signed distance at x, given the closest point of |rho_s|.
/// B carries the orientation of U. No normal-cone interiority is required.
inline Vector grad_rho_signed(const DualPolytope& P, const BoundaryShape& B, const Vector& x,
                              const DistanceResult& res, SignConvention conv = SignConvention::reflected) {
  const Vector nu = inward_normal(B, detail::unique_closest(res));
  const bool outside = region_membership(B, x) == Membership::outside;
  const double h = (outside && conv == SignConvention::same_gauge) ? support_value(P, -nu) : support_value(P, nu);
  return nu / h;
}

/// Dy(x) = I - X(nu).
inline Matrix jacobian_closest(const DualPolytope& P, const BoundaryShape& B, const Vector& x,
                               const DistanceResult& res) {
  (void)x;
  const Vector nu = inward_normal(B, detail::unique_closest(res));
  const int n = P.dim();
  return Matrix::Identity(n, n) - x_projector(P, nu);
}

/// D^2 rho(x) = (I - X)^T D^2 d(y) (I - X) / gamma°(nu).
inline Matrix hessian_rho(const DualPolytope& P, const BoundaryShape& B, const Vector& x, const DistanceResult& res) {
  (void)x;
  const Vector& y = detail::unique_closest(res);
  const Vector nu = inward_normal(B, y);
  const int n = P.dim();
  const Matrix IX = Matrix::Identity(n, n) - x_projector(P, nu);
  Matrix D2d;
  try {
    D2d = euclid_dist_hessian(B, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CornerPoint) fail(ErrorCode::NotTwiceDifferentiableHere, e.what());
    throw;
  }
  return IX.transpose() * D2d * IX / support_value(P, nu);
}

inline DerivativeBundle derivative_bundle(const DualPolytope& P, const BoundaryShape& B, const Vector& x,
                                          const DistanceResult& res) {
  DerivativeBundle b;
  const Vector nu = inward_normal(B, detail::unique_closest(res));
  b.grad = grad_rho(P, B, x, res);
  b.projector = x_projector(P, nu);
  b.jacobian_y = Matrix::Identity(P.dim(), P.dim()) - b.projector;
  b.hessian = hessian_rho(P, B, x, res);
  return b;
}

/// rho inside U (and on its boundary), minus the distance to the boundary outside.
/// Evaluated with the oracle; both conventions are available.
inline double signed_distance(const DualPolytope& P, const BoundaryShape& B, const Vector& x,
                              SignConvention conv = SignConvention::reflected, int budget = 10000) {
  const auto m = region_membership(B, x);
  if (m == Membership::on_boundary) return 0.0;
  if (m == Membership::inside) return rho_oracle(P, B, x, budget).value;
  const DualPolytope& Q = conv == SignConvention::reflected ? reflected(P) : P;
  return -rho_oracle(Q, B, x, budget).value;
}

// ---- finite differences

inline Vector fd_gradient(const ScalarField& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline Matrix fd_hessian(const ScalarField& f, const Vector& x, double h = 1e-4) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    H(i, i) = (f(a) - 2 * f0 + f(b)) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Vector pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  }
  return H;
}

/// |gamma°(fd gradient) - 1|.
inline double hj_residual(const DualPolytope& P, const ScalarField& f, const Vector& x, double h = 1e-5) {
  return std::abs(support_value(P, fd_gradient(f, x, h)) - 1.0);
}

/// One-sided second-order first and second differences of f along e at x.
struct OneSided {
  double d1_minus = 0, d1_plus = 0;
  double d2_minus = 0, d2_plus = 0;
};

inline OneSided one_sided_differences(const ScalarField& f, const Vector& x, const Vector& e, double h) {
  const double f0 = f(x);
  const double p1 = f(x + h * e), p2 = f(x + 2 * h * e), p3 = f(x + 3 * h * e);
  const double m1 = f(x - h * e), m2 = f(x - 2 * h * e), m3 = f(x - 3 * h * e);
  OneSided o;
  o.d1_plus = (-3 * f0 + 4 * p1 - p2) / (2 * h);
  o.d1_minus = (3 * f0 - 4 * m1 + m2) / (2 * h);
  o.d2_plus = (2 * f0 - 5 * p1 + 4 * p2 - p3) / (h * h);
  o.d2_minus = (2 * f0 - 5 * m1 + 4 * m2 - m3) / (h * h);
  return o;
}

}  // namespace gaugedist
