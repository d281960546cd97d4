#include "gaugedist/duality.hpp"
#include "gaugedist/polytope.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gaugedist;

namespace {

Vector v2(double a, double b) { return make_vector({a, b}); }

bool has(const std::vector<Vector>& list, const Vector& v, double tol = 1e-12) {
  for (const auto& w : list)
    if ((w - v).cwiseAbs().maxCoeff() <= tol) return true;
  return false;
}

bool same_set(const std::vector<Vector>& a, const std::vector<Vector>& b, double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  for (const auto& v : a)
    if (!has(b, v, tol)) return false;
  return true;
}

std::vector<Vector> square() { return {v2(1, 1), v2(-1, 1), v2(-1, -1), v2(1, -1)}; }
std::vector<Vector> diamond() { return {v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)}; }
std::vector<Vector> triangle() { return {v2(1, 0), v2(0, 1), v2(-1, -1)}; }

int index_of(const DualPolytope& P, const Vector& v, bool polar_list) {
  const auto& L = polar_list ? P.polar_vertices() : P.vertices();
  for (std::size_t i = 0; i < L.size(); ++i)
    if ((L[i] - v).norm() < 1e-12) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST(BuildPolytope, SquareHasDiamondPolarAndCircumradius) {
  const auto P = build_polytope(square());
  EXPECT_TRUE(same_set(P.polar_vertices(), diamond()));
  ASSERT_TRUE(P.circumradius().has_value());
  EXPECT_NEAR(*P.circumradius(), std::sqrt(2.0), 1e-15);
}

TEST(BuildPolytope, DiamondHasSquarePolar) {
  const auto P = build_polytope(diamond());
  EXPECT_TRUE(same_set(P.polar_vertices(), square()));
}

TEST(BuildPolytope, TrianglePolarMatchesDenseSampling) {
  const auto P = build_polytope(triangle());
  ASSERT_EQ(P.polar_vertices().size(), 3u);
  // conv(vertices) must equal the intersection of the half-planes <x, v_i> <= 1
  const auto V = triangle();
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const Vector x = v2(-1.5 + 3.0 * i / 200, -1.5 + 3.0 * j / 200);
      double m = -1e300;
      for (const auto& v : P.polar_vertices()) m = std::max(m, v.dot(x));
      if (std::abs(m - 1.0) < 1e-9) continue;  // on the boundary either way
      EXPECT_EQ(m < 1.0, testref::in_convex_polygon(V, x)) << format_vector(x);
    }
}

TEST(BuildPolytope, InteriorPointsAndDuplicatesAreDropped) {
  auto pts = square();
  pts.push_back(v2(0.2, 0.1));
  pts.push_back(v2(1, 1));
  pts.push_back(v2(1, 0));  // on an edge
  const auto P = build_polytope(pts);
  EXPECT_TRUE(same_set(P.vertices(), square()));
}

TEST(BuildPolytope, Errors) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;  // sentinel: nothing thrown
  };
  EXPECT_EQ(code([] { build_polytope({v2(1, 0), v2(2, 1), v2(1, 1)}); }), ErrorCode::OriginNotInterior);
  EXPECT_EQ(code([] { build_polytope({v2(1, 0), v2(-1, 0), v2(2, 0)}); }), ErrorCode::DegenerateHull);
  EXPECT_EQ(code([] { build_polytope({make_vector({1, 0, 0, 0}), make_vector({-1, 0, 0, 0})}); }),
            ErrorCode::UnsupportedDimension);
}

TEST(BuildDualPair, CubeInThreeDimensionsAccepted) {
  std::vector<Vector> z, v;
  for (int m = 0; m < 8; ++m) z.push_back(make_vector({m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0}));
  for (int k = 0; k < 3; ++k)
    for (double s : {1.0, -1.0}) {
      Vector e = Vector::Zero(3);
      e[k] = s;
      v.push_back(e);
    }
  const auto P = build_dual_pair(z, v);
  EXPECT_EQ(P.dim(), 3);
  EXPECT_EQ(P.vertices().size(), 8u);
}

TEST(BuildDualPair, MissingPolarVertexRejected) {
  const std::vector<Vector> v = {v2(1, 0), v2(-1, 0), v2(0, -1)};
  try {
    build_dual_pair(square(), v);
    FAIL() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentPair);
  }
}

TEST(BuildDualPair, NonExtremePolarVertexRejected) {
  auto v = diamond();
  v.push_back(v2(0.5, 0.5));
  try {
    build_dual_pair(square(), v);
    FAIL() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentPair);
  }
}

TEST(Gauge, CubeMaxNorm) {
  const auto P = cube(2);
  const auto g = gauge(P, v2(3, -2));
  EXPECT_DOUBLE_EQ(g.value, 3.0);
  ASSERT_EQ(g.active.size(), 1u);
  EXPECT_EQ(g.active[0], index_of(P, v2(1, 0), true));
}

TEST(Gauge, ZeroHasEveryPolarVertexActive) {
  for (const auto& P : {cube(2), build_polytope(triangle()), cube(3)}) {
    const auto g = gauge(P, Vector::Zero(P.dim()));
    EXPECT_EQ(g.value, 0.0);
    EXPECT_EQ(g.active.size(), P.polar_vertices().size());
  }
}

TEST(Gauge, DiamondMatchesBisection) {
  const auto P = build_polytope(diamond());
  const auto g = gauge(P, v2(1, 1));
  EXPECT_NEAR(g.value, 2.0, 1e-15);
  EXPECT_NEAR(g.value, testref::gauge_bisect(diamond(), v2(1, 1)), 1e-12);
  ASSERT_EQ(g.active.size(), 1u);
  EXPECT_EQ(g.active[0], index_of(P, v2(1, 1), true));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  const auto T = build_polytope(triangle());
  for (int k = 0; k < 200; ++k) {
    const Vector x = v2(N(rng), N(rng));
    EXPECT_NEAR(gauge_value(T, x), testref::gauge_bisect(triangle(), x), 1e-10 * (1 + x.norm()));
  }
}

TEST(Support, CubeExamples) {
  const auto P = cube(2);
  const auto s = support(P, v2(3, -2));
  EXPECT_DOUBLE_EQ(s.value, 5.0);
  ASSERT_EQ(s.active.size(), 1u);
  EXPECT_EQ(s.active[0], index_of(P, v2(1, -1), false));
  EXPECT_EQ(support_value(P, Vector::Zero(2)), 0.0);

  const auto t = support(P, v2(0.6, 0.8));
  double direct = -1e300;
  for (const auto& z : square()) direct = std::max(direct, z.dot(v2(0.6, 0.8)));
  EXPECT_NEAR(t.value, 1.4, 1e-15);
  EXPECT_NEAR(t.value, direct, 1e-15);
  ASSERT_EQ(t.active.size(), 1u);
  EXPECT_EQ(t.active[0], index_of(P, v2(1, 1), false));
}

TEST(Polar, CubeCrossAndInvolution) {
  const auto C = polar(cube(2));
  EXPECT_TRUE(same_set(C.vertices(), diamond()));
  ASSERT_TRUE(polar(C).circumradius());
  EXPECT_NEAR(*polar(C).circumradius(), std::sqrt(2.0), 1e-15);

  const auto T = build_polytope(triangle());
  const auto TT = polar(polar(T));
  EXPECT_TRUE(same_set(TT.vertices(), T.vertices()));
  EXPECT_TRUE(same_set(TT.polar_vertices(), T.polar_vertices()));
  // the polar built from scratch agrees with the swapped lists
  const auto Tp = build_polytope(T.polar_vertices());
  EXPECT_TRUE(same_set(Tp.polar_vertices(), T.vertices(), 1e-12));
}

TEST(NormalCone, CubeVertexAndFacet) {
  const auto P = cube(2);
  const auto corner = normal_cone(P, v2(1, 1));
  EXPECT_EQ(corner.cone_dim, 2);
  EXPECT_TRUE(same_set(corner.generators, {v2(1, 0), v2(0, 1)}));
  const auto facet = normal_cone(P, v2(1, 0.3));
  EXPECT_EQ(facet.cone_dim, 1);
  EXPECT_TRUE(same_set(facet.generators, {v2(1, 0)}));
  EXPECT_THROW(normal_cone(P, v2(0.5, 0.3)), Error);
}

TEST(NormalCone, CrossPolytopeMembershipBySolvedCombination) {
  const auto C = cross_polytope(2);
  const auto nc = normal_cone(C, v2(1, 0));
  // 2 (1,1) + 1 (1,-1) = (3,1) with nonnegative weights
  EXPECT_TRUE(nc.contains(v2(3, 1)));
  EXPECT_FALSE(nc.contains(v2(1, 3)));
  EXPECT_FALSE(nc.contains(v2(-1, 0)));
}

TEST(Subdifferential, CubeExamples) {
  const auto P = cube(2);
  const auto a = gauge_subdifferential(P, v2(2, 1));
  ASSERT_TRUE(a.is_singleton);
  EXPECT_TRUE((*a.gradient - v2(1, 0)).isZero(0));
  EXPECT_DOUBLE_EQ(a.gradient->dot(v2(2, 1)), gauge_value(P, v2(2, 1)));

  const auto b = gauge_subdifferential(P, v2(1, 1));
  EXPECT_FALSE(b.is_singleton);
  EXPECT_TRUE(same_set(b.active_polar_vertices, {v2(1, 0), v2(0, 1)}));

  const auto c = gauge_subdifferential(P, v2(4, 2));
  EXPECT_EQ(a.active_indices, c.active_indices);
}

TEST(FaceOf, Classification) {
  const auto P = cube(2);
  EXPECT_EQ(face_of(P, v2(1, 1)).face_dim, 0);
  EXPECT_EQ(face_of(P, v2(1, 1)).classification, FaceKind::vertex);
  EXPECT_EQ(face_of(P, v2(1, 0.5)).face_dim, 1);
  EXPECT_EQ(face_of(P, v2(1, 0.5)).classification, FaceKind::smooth);
  const auto e = face_of(cube(3), make_vector({1, 1, 0}));
  EXPECT_EQ(e.face_dim, 1);
  EXPECT_EQ(e.classification, FaceKind::singular);
}

TEST(Duality, SuitesPassOnCubeTriangleAndThreeCube) {
  for (const auto& P : {cube(2), build_polytope(triangle()), cube(3), regular_polygon(7, 1.0, 0.3)}) {
    auto r = check_duality_identities(P, 10000, 42);
    EXPECT_TRUE(r.passed()) << r.to_text();
    EXPECT_GT(r.total_checks(), 100000);
    if (auto* cs = r.find("cauchy-schwarz")) {
      EXPECT_LE(cs->worst_residual, 1e-12);
    }
  }
}

TEST(Duality, ReciprocityAtNonDifferentiableSupportUsesConeMembership) {
  // D gamma(2,1) = (1,0) and the support at (1,0) is attained on a whole edge.
  const auto P = cube(2);
  const Vector g = *gauge_subdifferential(P, v2(2, 1)).gradient;
  EXPECT_EQ(support(P, g).active.size(), 2u);
  // (2,1)/gamma lies on the exposed edge, i.e. in the normal cone of K° at g
  EXPECT_TRUE(normal_cone(polar(P), g).contains(v2(2, 1)));
}

// ---- properties on random samples

class GaugeProperties : public ::testing::TestWithParam<int> {};

TEST_P(GaugeProperties, HomogeneitySubadditivityEuler) {
  const std::vector<DualPolytope> Ps = {cube(2), build_polytope(triangle()), cube(3), regular_polygon(5)};
  const auto& P = Ps[static_cast<std::size_t>(GetParam())];
  std::mt19937_64 rng(static_cast<unsigned>(GetParam()) + 100);
  std::normal_distribution<double> N;
  auto draw = [&] {
    Vector x(P.dim());
    for (int k = 0; k < P.dim(); ++k) x[k] = N(rng);
    return x;
  };
  for (int k = 0; k < 2000; ++k) {
    const Vector x = draw(), y = draw();
    const double gx = gauge_value(P, x);
    for (double t : {0.5, 2.0, 10.0}) EXPECT_LE(std::abs(gauge_value(P, t * x) - t * gx), 1e-12 * (1 + t * gx));
    EXPECT_LE(gauge_value(P, x + y), gx + gauge_value(P, y) + 1e-12 * (1 + gx + gauge_value(P, y)));
    EXPECT_LE(x.dot(y), gx * support_value(P, y) + 1e-12 * (1 + x.norm() * y.norm()));
    const auto sd = gauge_subdifferential(P, x);
    if (sd.is_singleton) {
      EXPECT_LE(std::abs(sd.gradient->dot(x) - gx), 1e-12 * (1 + gx));
      EXPECT_LE(std::abs(support_value(P, *sd.gradient) - 1.0), 1e-12);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Polytopes, GaugeProperties, ::testing::Values(0, 1, 2, 3));

TEST(NormalCones, SupportConstantOnNormalConeInterior) {
  const auto P = build_polytope(triangle());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.05, 1.0);
  for (std::size_t j = 0; j < P.vertices().size(); ++j) {
    const auto nc = normal_cone(P, P.vertices()[j]);
    ASSERT_EQ(nc.cone_dim, 2);
    for (int k = 0; k < 100; ++k) {
      Vector w = Vector::Zero(2);
      for (const auto& g : nc.generators) w += U(rng) * g;
      const auto s = support(P, w);
      ASSERT_EQ(s.active.size(), 1u);
      EXPECT_EQ(s.active[0], static_cast<int>(j));
    }
  }
}
