#include "gaugedist/boundary.hpp"
#include "gaugedist/verify.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gaugedist;

namespace {

Vector v2(double a, double b) { return make_vector({a, b}); }

void expect_vec(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << format_vector(a) << " vs " << format_vector(b);
}

void expect_mat(const Matrix& a, const Matrix& b, double tol) {
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << a << "\nvs\n" << b;
}

const BoundaryShape circle_in = BoundaryShape::unit_sphere(2, Side::interior);
const BoundaryShape circle_out = BoundaryShape::unit_sphere(2, Side::exterior);

}  // namespace

TEST(SampleBoundary, CircleQuarterTurns) {
  const auto pts = sample_boundary(circle_in, 4);
  ASSERT_EQ(pts.size(), 4u);
  const std::vector<Vector> want = {v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)};
  for (std::size_t k = 0; k < 4; ++k) expect_vec(pts[k], want[k], 1e-15);
}

TEST(SampleBoundary, ParabolaParameters) {
  const Window w{v2(-2, -10), v2(2, 10)};
  const auto pts = sample_boundary(BoundaryShape::parabola(ParabolaSide::above), 5, w);
  ASSERT_EQ(pts.size(), 5u);
  for (int k = 0; k < 5; ++k) expect_vec(pts[static_cast<std::size_t>(k)], v2(k - 2.0, (k - 2.0) * (k - 2.0)), 1e-15);
}

TEST(SampleBoundary, TwoDisksPointsLieOnTheUnionBoundary) {
  const auto B = BoundaryShape::two_unit_disks();
  const auto pts = sample_boundary(B, 100);
  ASSERT_EQ(pts.size(), 100u);
  for (const auto& y : pts) {
    const double a = (y - v2(-1, 0)).norm(), b = (y - v2(1, 0)).norm();
    EXPECT_NEAR(std::min(a, b), 1.0, 1e-12);
    EXPECT_GE(std::max(a, b), 1.0 - 1e-12);
    EXPECT_EQ(region_membership(B, y), Membership::on_boundary);
  }
}

TEST(InwardNormal, Examples) {
  expect_vec(inward_normal(circle_out, v2(0.8, 0.6)), v2(0.8, 0.6), 1e-15);
  expect_vec(inward_normal(circle_in, v2(0.8, 0.6)), v2(-0.8, -0.6), 1e-15);
  expect_vec(inward_normal(BoundaryShape::parabola(ParabolaSide::above), v2(1, 1)), v2(-2, 1) / std::sqrt(5.0), 1e-15);
  expect_vec(inward_normal(BoundaryShape::parabola(ParabolaSide::below), v2(1, 1)), v2(2, -1) / std::sqrt(5.0), 1e-15);
  EXPECT_THROW(inward_normal(circle_in, v2(0.5, 0.5)), Error);
}

TEST(InwardNormal, PolygonCornerIsAnError) {
  const auto B = BoundaryShape::polygon({v2(-1, -1), v2(1, -1), v2(1, 1), v2(-1, 1)}, Side::interior);
  expect_vec(inward_normal(B, v2(1, 0.2)), v2(-1, 0), 1e-15);
  try {
    inward_normal(B, v2(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CornerPoint);
  }
}

TEST(EuclidDistHessian, CircleBothSides) {
  Matrix want(2, 2);
  want << -0.36, 0.48, 0.48, -0.64;
  expect_mat(euclid_dist_hessian(circle_in, v2(0.8, 0.6)), want, 1e-15);
  expect_mat(euclid_dist_hessian(circle_out, v2(0.8, 0.6)), -want, 1e-15);
  // from outside the curvature eigenvalue is +1
  Eigen::SelfAdjointEigenSolver<Matrix> es(euclid_dist_hessian(circle_out, v2(0.8, 0.6)));
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), 0.0, 1e-14);
}

TEST(EuclidDistHessian, PolygonEdgeIsZero) {
  const auto B = BoundaryShape::polygon({v2(-1, -1), v2(1, -1), v2(1, 1), v2(-1, 1)}, Side::interior);
  EXPECT_TRUE(euclid_dist_hessian(B, v2(0.3, 1)).isZero(0));
}

TEST(EuclidDistHessian, MatchesFiniteDifferencesOffsetInward) {
  // d measured into U, second differences at foot points moved 1e-3 inward
  const double h = 1e-4;
  for (const auto& B : {circle_in, circle_out, BoundaryShape::parabola(ParabolaSide::above),
                        BoundaryShape::parabola(ParabolaSide::below)}) {
    const auto pts = sample_boundary(B, 40, Window{v2(-2, -10), v2(2, 10)});
    for (const auto& y : pts) {
      const Vector nu = inward_normal(B, y);
      const Vector x = y + 1e-3 * nu;
      const ScalarField d = [&](const Vector& p) { return euclid_signed_distance(B, p); };
      const Matrix H = fd_hessian(d, x, h);
      // the Hessian of d at x differs from that at y by O(1e-3 * curvature^2)
      const Matrix Hy = euclid_dist_hessian(B, y);
      const double kappa = std::abs(Hy.trace());
      EXPECT_LE((H - Hy).cwiseAbs().maxCoeff(), 1e-4 + 2e-3 * kappa * kappa) << "y=" << format_vector(y);
    }
  }
}

TEST(RegionMembership, Examples) {
  EXPECT_EQ(region_membership(circle_in, v2(0, 0)), Membership::inside);
  EXPECT_EQ(region_membership(BoundaryShape::parabola(ParabolaSide::above), v2(0, -1)), Membership::outside);
  EXPECT_EQ(region_membership(BoundaryShape::two_unit_disks(), v2(0, 0)), Membership::on_boundary);
  EXPECT_EQ(region_membership(BoundaryShape::two_unit_disks(), v2(0.5, 0)), Membership::outside);
  EXPECT_EQ(region_membership(BoundaryShape::two_unit_disks(), v2(0, 0.5)), Membership::inside);
}

TEST(BoundaryShape, InvalidShapes) {
  EXPECT_THROW(BoundaryShape::sphere(v2(0, 0), -1, Side::interior), Error);
  EXPECT_THROW(BoundaryShape::polygon({v2(0, 0), v2(1, 0)}, Side::interior), Error);
  EXPECT_THROW(BoundaryShape::polygon({v2(-1, -1), v2(-1, 1), v2(1, 1), v2(1, -1)}, Side::interior), Error);  // clockwise
  EXPECT_THROW(BoundaryShape::polygon({v2(0, 0), v2(1, 1), v2(1, 0), v2(0, 1)}, Side::interior), Error);      // bow tie
}

TEST(BoundarySuite, AllShapesPass) {
  const Window w{v2(-2, -2.5), v2(2, 4)};
  for (const auto& B : {circle_in, circle_out, BoundaryShape::unit_sphere(3, Side::interior),
                        BoundaryShape::parabola(ParabolaSide::above), BoundaryShape::two_unit_disks(),
                        BoundaryShape::polygon({v2(-2, -1), v2(2, -1.5), v2(1, 1.5), v2(-1, 1)}, Side::interior)}) {
    const auto r = verify_boundary(B, 400, B.as<Parabola>() ? std::optional<Window>(w) : std::nullopt);
    EXPECT_TRUE(r.passed()) << r.to_text();
    EXPECT_GT(r.total_checks(), 400);
  }
}

TEST(Footpoint, EuclideanDistanceOnRandomPoints) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  const auto B = BoundaryShape::two_unit_disks();
  for (int k = 0; k < 500; ++k) {
    const Vector x = v2(U(rng), U(rng));
    const auto f = footpoint(B, x);
    const double want = std::min((x - v2(-1, 0)).norm(), (x - v2(1, 0)).norm());
    if (region_membership(B, x) == Membership::outside) continue;
    EXPECT_NEAR(f.euclid_dist, want - 1.0, 1e-12);
  }
}
