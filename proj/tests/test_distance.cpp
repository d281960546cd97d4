#include "gaugedist/closed_forms.hpp"
#include "gaugedist/oracle.hpp"
#include "gaugedist/setups.hpp"
#include "gaugedist/touching_ball.hpp"
#include "gaugedist/verify.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gaugedist;

namespace {

Vector v2(double a, double b) { return make_vector({a, b}); }

bool has_point(const std::vector<Vector>& list, const Vector& v, double tol) {
  for (const auto& w : list)
    if ((w - v).norm() <= tol) return true;
  return false;
}

// max-norm distance to the parabola x2 = x1^2
double ref_parabola(const Vector& x) {
  return testref::curve_min([&](double t) { return std::max(std::abs(x[0] - t), std::abs(x[1] - t * t)); }, -10, 10,
                            400000);
}

// max-norm distance to the boundary of the union of the unit disks at (+-1, 0)
double ref_two_disks(const Vector& x) {
  double best = 1e300;
  for (double c : {-1.0, 1.0}) {
    best = std::min(best, testref::curve_min(
                              [&](double t) {
                                const Vector y = v2(c + std::cos(t), std::sin(t));
                                if ((y - v2(-c, 0)).norm() < 1.0) return 1e300;  // inside the other disk
                                return testref::max_norm(x - y);
                              },
                              0.0, 2 * std::numbers::pi));
  }
  return best;
}

const DualPolytope& square_k() {
  static const DualPolytope P = cube(2);
  return P;
}

}  // namespace

// ---- parabola with the max norm

TEST(ParabolaMaxNorm, Examples) {
  auto a = rho_parabola_maxnorm(v2(0, 2));
  EXPECT_NEAR(a.value, 1.0, 1e-15);
  EXPECT_NEAR(a.value, std::sqrt(2.25) - 0.5, 1e-15);
  ASSERT_EQ(a.closest.size(), 2u);
  EXPECT_TRUE(has_point(a.closest, v2(-1, 1), 1e-15));
  EXPECT_TRUE(has_point(a.closest, v2(1, 1), 1e-15));

  auto b = rho_parabola_maxnorm(v2(0, -1));
  EXPECT_NEAR(b.value, 1.0, 1e-15);
  EXPECT_EQ(b.region.branch, "flat-cone");
  EXPECT_FALSE(b.region.boundary_of_regions);
  ASSERT_EQ(b.closest.size(), 1u);
  EXPECT_TRUE(has_point(b.closest, v2(0, 0), 1e-15));

  auto c = rho_parabola_maxnorm(v2(2, 0));
  EXPECT_NEAR(c.value, 1.0, 1e-15);
  ASSERT_EQ(c.closest.size(), 1u);
  EXPECT_TRUE(has_point(c.closest, v2(1, 1), 1e-15));
}

TEST(ParabolaMaxNorm, MatchesDenseReference) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> X(-2, 2), Y(-2.5, 4);
  for (int k = 0; k < 60; ++k) {
    const Vector x = v2(X(rng), Y(rng));
    EXPECT_NEAR(rho_parabola_maxnorm(x).value, ref_parabola(x), 1e-9) << format_vector(x);
  }
}

// ---- sphere and inscribed polytope

TEST(SpherePolytope, InsideExampleSolvesTheCornerQuadratic) {
  // corner (-1,-1) of x - rho K on the circle: (0.3 + r)^2 + (0.1 + r)^2 = 1
  const double r = (-0.8 + std::sqrt(0.64 - 8 * (0.1 - 1))) / 4;
  const auto res = rho_sphere_polytope(square_k(), v2(0.3, 0.1));
  EXPECT_NEAR(r, 0.5, 1e-15);
  EXPECT_NEAR(res.value, 0.5, 1e-12);
  ASSERT_EQ(res.closest.size(), 1u);
  EXPECT_TRUE(has_point(res.closest, v2(0.8, 0.6), 1e-12));
  EXPECT_NEAR(res.value, testref::maxnorm_to_circle(v2(0.3, 0.1)), 1e-10);
}

TEST(SpherePolytope, OriginAndTwoCornerPoint) {
  EXPECT_NEAR(rho_sphere_polytope(square_k(), v2(0, 0)).value, std::sqrt(2.0) / 2, 1e-12);
  // corners (-1, +-1) both active: 2 r^2 + r - 0.75 = 0
  const auto res = rho_sphere_polytope(square_k(), v2(0.5, 0));
  const double r = (-1 + std::sqrt(7.0)) / 4;
  EXPECT_NEAR(res.value, r, 1e-12);
  ASSERT_EQ(res.closest.size(), 2u);
  EXPECT_TRUE(has_point(res.closest, v2(0.5 + r, r), 1e-12));
  EXPECT_TRUE(has_point(res.closest, v2(0.5 + r, -r), 1e-12));
}

TEST(SpherePolytope, ExteriorBranches) {
  const auto s = rho_sphere_polytope(square_k(), v2(2, 0));
  EXPECT_EQ(s.region.branch, "singular-cone");
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  ASSERT_EQ(s.closest.size(), 1u);
  EXPECT_TRUE(has_point(s.closest, v2(1, 0), 1e-12));

  const auto v = rho_sphere_polytope(square_k(), v2(1, 1));
  EXPECT_EQ(v.region.branch, "vertex-branch");
  EXPECT_NEAR(v.value, 1 - std::sqrt(2.0) / 2, 1e-12);
  EXPECT_TRUE(has_point(v.closest, v2(std::sqrt(0.5), std::sqrt(0.5)), 1e-12));
}

TEST(SpherePolytope, MatchesDenseReference) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int k = 0; k < 60; ++k) {
    const Vector x = v2(U(rng), U(rng));
    EXPECT_NEAR(rho_sphere_polytope(square_k(), x).value, testref::maxnorm_to_circle(x), 1e-9) << format_vector(x);
  }
}

TEST(SpherePolytope, RejectsPolytopesWithoutCircumradius) {
  try {
    Setup::sphere_polytope(build_polytope({v2(1, 0), v2(0, 1), v2(-1, -1)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInscribed);
  }
}

// ---- unit ball with the max norm

TEST(BallMaxNorm, PlanarExamples) {
  const auto a = rho_ball_maxnorm(v2(2, 0.2), 2);
  EXPECT_NEAR(a.value, 1.0, 1e-15);
  ASSERT_TRUE(a.region.J.has_value());
  EXPECT_EQ(*a.region.J, std::vector<int>{2});

  const auto b = rho_ball_maxnorm(v2(1, 1), 2);
  EXPECT_NEAR(b.value, 1 - std::sqrt(2.0) / 2, 1e-15);
  EXPECT_EQ(b.region.branch, "vertex-branch");
  EXPECT_FALSE(b.region.J.has_value());
  EXPECT_NEAR(b.value, rho_sphere_polytope(square_k(), v2(1, 1)).value, 1e-15);
}

TEST(BallMaxNorm, ProjectionIdentityExampleAgainstOracle) {
  const Vector x = make_vector({0, 1.2, 1.3});
  const double want = 0.5 * (2.5 - std::sqrt(2 - 0.01));
  const auto r = rho_ball_maxnorm(x, 3);
  EXPECT_NEAR(want, 0.54466, 1e-5);
  EXPECT_NEAR(r.value, want, 1e-12);
  EXPECT_EQ(*r.region.J, std::vector<int>{1});
  EXPECT_NEAR(rho_ball_projected(x, {1}), want, 1e-12);
  const auto o = rho_oracle(cube(3), BoundaryShape::unit_sphere(3, Side::interior), x, 10000);
  EXPECT_NEAR(o.value, want, 1e-7);
}

TEST(BallMaxNorm, JScanFixedPointInequalities) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int n : {2, 3, 4}) {
    for (int k = 0; k < 500; ++k) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = U(rng);
      if (x.norm() <= 1) continue;
      const auto r = rho_ball_maxnorm(x, n);
      const auto J = r.region.J.value_or(std::vector<int>{});
      for (int i = 1; i <= n; ++i) {
        const bool inJ = std::find(J.begin(), J.end(), i) != J.end();
        if (inJ) EXPECT_LE(std::abs(x[i - 1]), r.value + 1e-12);
        else EXPECT_GE(std::abs(x[i - 1]), r.value - 1e-12);
      }
    }
  }
}

// ---- two disks

TEST(TwoDisks, Examples) {
  const auto a = rho_two_disks_maxnorm(v2(0, 2.5));
  EXPECT_NEAR(a.value, 1.5, 1e-15);
  ASSERT_EQ(a.closest.size(), 2u);
  EXPECT_TRUE(has_point(a.closest, v2(-1, 1), 1e-15));
  EXPECT_TRUE(has_point(a.closest, v2(1, 1), 1e-15));

  const auto b = rho_two_disks_maxnorm(v2(0, 2.0001));
  EXPECT_NEAR(b.value, 1.0001, 1e-12);
  EXPECT_EQ(b.closest.size(), 2u);

  const auto c = rho_two_disks_maxnorm(v2(3, 0));
  EXPECT_NEAR(c.value, 1.0, 1e-15);
  ASSERT_EQ(c.closest.size(), 1u);
  EXPECT_TRUE(has_point(c.closest, v2(2, 0), 1e-15));
  const auto o = rho_oracle(cube(2), BoundaryShape::two_unit_disks(), v2(3, 0), 10000);
  EXPECT_NEAR(o.value, 1.0, 1e-9);
  EXPECT_EQ(o.closest.size(), 1u);
}

TEST(TwoDisks, MatchesDenseReference) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-4.5, 4.5);
  const auto B = BoundaryShape::two_unit_disks();
  for (int k = 0; k < 40;) {
    const Vector x = v2(U(rng), U(rng));
    if (region_membership(B, x) == Membership::outside) continue;
    ++k;
    EXPECT_NEAR(rho_two_disks_maxnorm(x).value, ref_two_disks(x), 1e-9) << format_vector(x);
  }
}

// ---- oracle

TEST(Oracle, SphereInsideExample) {
  const auto r = rho_oracle(square_k(), BoundaryShape::unit_sphere(2, Side::interior), v2(0.3, 0.1), 10000);
  EXPECT_NEAR(r.value, 0.5, 1e-9);
  ASSERT_EQ(r.closest.size(), 1u);
  EXPECT_TRUE(has_point(r.closest, v2(0.8, 0.6), 1e-6));
}

TEST(Oracle, BoundaryPointIsItsOwnClosestPoint) {
  for (const auto& [B, y] : std::vector<std::pair<BoundaryShape, Vector>>{
           {BoundaryShape::unit_sphere(2, Side::interior), v2(0.6, 0.8)},
           {BoundaryShape::parabola(ParabolaSide::above), v2(1.5, 2.25)},
           {BoundaryShape::two_unit_disks(), v2(0, 0)}}) {
    const auto r = rho_oracle(square_k(), B, y, 1000);
    EXPECT_EQ(r.value, 0.0);
    ASSERT_EQ(r.closest.size(), 1u);
    EXPECT_TRUE(r.closest[0].isApprox(y));
  }
}

TEST(Oracle, TwoClosestPointsInsideTheCircle) {
  const auto r = rho_oracle(square_k(), BoundaryShape::unit_sphere(2, Side::interior), v2(0.5, 0), 10000);
  const double rho = (-1 + std::sqrt(7.0)) / 4;
  EXPECT_NEAR(r.value, rho, 1e-9);
  ASSERT_EQ(r.closest.size(), 2u);
  EXPECT_TRUE(has_point(r.closest, v2(0.5 + rho, rho), 1e-6));
  EXPECT_TRUE(has_point(r.closest, v2(0.5 + rho, -rho), 1e-6));
}

TEST(Oracle, BothParabolaCornersFound) {
  const auto r = rho_oracle(square_k(), BoundaryShape::parabola(ParabolaSide::above), v2(0, 2), 10000);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_EQ(r.closest.size(), 2u);
}

TEST(Oracle, BudgetAndDimensionErrors) {
  const auto B = BoundaryShape::unit_sphere(2, Side::interior);
  try {
    rho_oracle(square_k(), B, v2(0, 0), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetTooSmall);
  }
  EXPECT_THROW(rho_oracle(cube(3), B, make_vector({0, 0, 0}), 1000), Error);
}

TEST(Oracle, GeneralPolygonAgainstBruteForce) {
  // hexagon gauge, quadrilateral domain: compare with dense edge sampling
  const auto P = regular_polygon(6);
  const std::vector<Vector> loop = {v2(-2, -1), v2(2, -1.5), v2(1, 1.5), v2(-1, 1)};
  const auto B = BoundaryShape::polygon(loop, Side::interior);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 30;) {
    const Vector x = v2(U(rng), U(rng));
    if (region_membership(B, x) != Membership::inside) continue;
    ++k;
    double best = 1e300;
    for (std::size_t e = 0; e < loop.size(); ++e) {
      const Vector a = loop[e], b = loop[(e + 1) % loop.size()];
      // piecewise linear in t, so the dense reference is exact up to the kinks
      best = std::min(best, testref::curve_min(
                                [&](double t) {
                                  const Vector y = a + t * (b - a);
                                  return testref::gauge_bisect(P.vertices(), x - y);
                                },
                                0.0, 1.0, 2000));
    }
    EXPECT_NEAR(rho_oracle(P, B, x, 4000).value, best, 1e-9) << format_vector(x);
  }
}

// ---- region classification

TEST(ClassifyRegion, Examples) {
  const auto p = classify_region(Setup::parabola(), v2(0, -1));
  EXPECT_EQ(p.branch, "flat-cone");
  EXPECT_FALSE(p.boundary_of_regions);
  EXPECT_TRUE(classify_region(Setup::ball_maxnorm(2), v2(2, 1)).boundary_of_regions);
  EXPECT_EQ(classify_region(Setup::two_disks(), v2(0, 3)).branch, "two-closest");
  try {
    classify_region(Setup::two_disks(), v2(1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideDomain);
  }
}

// ---- touching ball

TEST(TouchingBall, ParabolaAndSphereExamplesHaveNoViolations) {
  const auto Bp = BoundaryShape::parabola(ParabolaSide::above);
  const auto rp = verify_touching_ball(square_k(), Bp, v2(0, 2), rho_parabola_maxnorm(v2(0, 2)), 1000);
  EXPECT_TRUE(rp.passed()) << rp.to_text();
  const auto Bs = BoundaryShape::unit_sphere(2, Side::interior);
  const auto rs = verify_touching_ball(square_k(), Bs, v2(0.3, 0.1), rho_sphere_polytope(square_k(), v2(0.3, 0.1)), 1000);
  EXPECT_TRUE(rs.passed()) << rs.to_text();
}

TEST(TouchingBall, InflatedValueEscapes) {
  const auto Bs = BoundaryShape::unit_sphere(2, Side::interior);
  auto res = rho_sphere_polytope(square_k(), v2(0.3, 0.1));
  res.value *= 1.1;
  auto r = verify_touching_ball(square_k(), Bs, v2(0.3, 0.1), res, 1000);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.find("interior-escape")->failures, 0);
}

// ---- the distance suites

class DistanceSuite : public ::testing::TestWithParam<int> {};

TEST_P(DistanceSuite, PassesAtReducedSize) {
  const std::vector<gaugedist::Setup> setups = {Setup::parabola(), Setup::sphere_square(), Setup::ball_maxnorm(2),
                                     Setup::ball_maxnorm(3), Setup::two_disks()};
  const gaugedist::Setup& s = setups[static_cast<std::size_t>(GetParam())];
  DistanceOptions opt;
  opt.grid_resolution = 21;
  opt.pair_count = 500;
  opt.touch_queries = 20;
  opt.probes = 300;
  const auto r = verify_distance(s, 11, opt);
  EXPECT_TRUE(r.passed()) << r.to_text();
}

INSTANTIATE_TEST_SUITE_P(Setups, DistanceSuite, ::testing::Range(0, 5));

TEST(Properties, LipschitzAndExteriorUniquenessOnRandomPairs) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-3, 3);
  const auto s = Setup::sphere_square();
  const auto o = s.make_oracle(10000);
  for (int k = 0; k < 300; ++k) {
    const Vector x = v2(U(rng), U(rng)), y = v2(U(rng), U(rng));
    const double d = s.closed_form(y).value - s.closed_form(x).value;
    EXPECT_LE(d, gauge_value(square_k(), y - x) + 1e-9);
    EXPECT_GE(d, -gauge_value(square_k(), x - y) - 1e-9);
    if (x.norm() > 1) {
      EXPECT_EQ(o.evaluate(x).closest.size(), 1u) << format_vector(x);
    }
  }
}
