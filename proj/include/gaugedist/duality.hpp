#pragma once

#include "gaugedist/polytope.hpp"
#include "gaugedist/report.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace gaugedist {

namespace detail {

struct Sampler {
  explicit Sampler(std::uint64_t seed, int dim) : rng(seed), n(dim) {}

  // Gaussian direction with a log-uniform magnitude in [1e-2, 1e2].
  Vector point() {
    Vector x(n);
    for (int k = 0; k < n; ++k) x[k] = normal(rng);
    return x * std::exp(magnitude(rng));
  }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  std::size_t index(std::size_t count) { return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng); }

  std::mt19937_64 rng;
  int n;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> magnitude{-4.6, 4.6};
};

inline Vector convex_mix(const std::vector<Vector>& pts, Sampler& s) {
  Vector out = Vector::Zero(pts.front().size());
  double total = 0.0;
  for (const auto& p : pts) {
    const double w = s.uniform(0.05, 1.0);
    out += w * p;
    total += w;
  }
  return out / total;
}

}  // namespace detail

/// Randomized check of the gauge/support duality identities on P.
/// Deterministic for a given seed.
inline Report check_duality_identities(const DualPolytope& P, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) sample_count = 1;
  Report rep;
  rep.title = "duality";
  auto& homog = rep.add("homogeneity", 1e-12);
  auto& subadd = rep.add("subadditivity", 1e-12);
  auto& cs = rep.add("cauchy-schwarz", 1e-12);
  auto& cs2_exact = rep.add("polar-gauge attained at vertex", 1e-12);
  auto& euler = rep.add("euler identity", 1e-12);
  auto& unit = rep.add("polar-gauge of gradient is 1", 1e-12);
  auto& active = rep.add("active-set duality", tol::active_rel);
  auto& inverse = rep.add("polar gradient inverts gradient", tol::cone_residual);
  auto& recip_pos = rep.add("normal-cone reciprocity (paired)", 0.0);
  auto& recip_rand = rep.add("normal-cone reciprocity (random)", 0.0);
  auto& bip_struct = rep.add("bipolar round-trip (structure)", 1e-12);
  auto& bip = rep.add("bipolar round-trip (values)", 0.0);
  auto& nvert = rep.add("support unique on normal-cone interior", 0.0);

  const int n = P.dim();
  detail::Sampler s(seed, n);
  const auto& V = P.polar_vertices();
  const auto& Z = P.vertices();

  const DualPolytope Pd = polar(P);
  const DualPolytope PP = polar(Pd);
  {
    // every vertex of P reappears in polar(polar(P)) and vice versa
    auto match = [](const std::vector<Vector>& a, const std::vector<Vector>& b) {
      double worst = 0.0;
      for (const auto& p : a) {
        double best = 1e300;
        for (const auto& q : b) best = std::min(best, (p - q).cwiseAbs().maxCoeff());
        worst = std::max(worst, best);
      }
      return worst;
    };
    const bool same_size = PP.vertices().size() == Z.size() && PP.polar_vertices().size() == V.size();
    bip_struct.record(same_size ? std::max({match(Z, PP.vertices()), match(PP.vertices(), Z),
                                            match(V, PP.polar_vertices())})
                                : 1.0,
                      [] { return std::string("vertex lists differ"); });
  }

  for (int k = 0; k < sample_count; ++k) {
    const Vector x = s.point();
    const Vector y = s.point();
    const auto gx = gauge(P, x);
    const double gy = gauge_value(P, y);
    const auto hy = support(P, y);

    for (double t : {0.5, 2.0, 10.0}) {
      const double gt = gauge_value(P, Vector(t * x));
      homog.record(std::abs(gt - t * gx.value) / (1.0 + gt), [&] { return "x=" + format_vector(x); });
    }
    const double gsum = gauge_value(P, Vector(x + y));
    subadd.record(std::max(0.0, gsum - gx.value - gy) / (1.0 + gx.value + gy), [&] { return "x=" + format_vector(x); });

    const double bound = gx.value * hy.value;
    cs.record(std::max(0.0, x.dot(y) - bound) / (1.0 + std::abs(bound)), [&] { return "x=" + format_vector(x); });

    // gamma°(y) = max_{x != 0} <x,y>/gamma(x), attained at a maximizing vertex
    {
      const Vector& zs = Z[static_cast<std::size_t>(hy.active.front())];
      const double q = zs.dot(y) / gauge_value(P, zs);
      cs2_exact.record(std::abs(q - hy.value) / (1.0 + hy.value), [&] { return "y=" + format_vector(y); });
    }

    // active set at x
    for (int i : gx.active) {
      const Vector& v = V[static_cast<std::size_t>(i)];
      active.record(std::max(std::abs(x.dot(v) / gx.value - 1.0), std::abs(support_value(P, v) - 1.0)),
                    [&] { return "x=" + format_vector(x); });
    }

    if (gx.active.size() == 1) {
      const Vector& g = V[static_cast<std::size_t>(gx.active.front())];
      euler.record(std::abs(g.dot(x) - gx.value) / (1.0 + gx.value), [&] { return "x=" + format_vector(x); });
      const auto hg = support(P, g);
      unit.record(std::abs(hg.value - 1.0), [&] { return "x=" + format_vector(x); });
      // x/gamma(x) belongs to the subdifferential of gamma° at Dgamma(x)
      const Vector xb = x / gx.value;
      const auto faces = detail::pick(Z, hg.active);
      if (faces.size() == 1)
        inverse.record((faces.front() - xb).norm(), [&] { return "x=" + format_vector(x); });
      else
        inverse.record_bool(detail::in_convex_hull(faces, xb), [&] { return "x=" + format_vector(x); });
    }

    // reciprocity v in N(K,x) <=> x in N(K°,v) on boundary points
    {
      const Vector xb = x / gx.value;
      const auto nc = normal_cone(P, xb);
      const Vector v = detail::convex_mix(nc.generators, s);
      const auto polar_cone = normal_cone(Pd, v);
      const bool a = nc.contains(v), b = polar_cone.contains(xb);
      recip_pos.record_bool(a && b, [&] { return "x=" + format_vector(xb) + " v=" + format_vector(v); });

      const Vector vr = y / hy.value;
      const bool c = nc.contains(vr);
      const bool d = normal_cone(Pd, vr).contains(xb);
      recip_rand.record_bool(c == d, [&] { return "x=" + format_vector(xb) + " v=" + format_vector(vr); });
    }

    bip.record(std::abs(gauge_value(PP, x) - gx.value) + std::abs(support_value(PP, y) - hy.value));

    // strictly positive combination of a vertex's normal-cone generators
    {
      const std::size_t j = s.index(Z.size());
      const auto nc = normal_cone(P, Z[j]);
      const Vector v = detail::convex_mix(nc.generators, s);
      const auto hv = support(P, v);
      nvert.record_bool(hv.active.size() == 1 && static_cast<std::size_t>(hv.active.front()) == j,
                        [&] { return "vertex " + format_vector(Z[j]); });
    }
  }
  return rep;
}

}  // namespace gaugedist
