#pragma once

#include "gaugedist/boundary.hpp"
#include "gaugedist/distance_result.hpp"
#include "gaugedist/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

namespace gaugedist {

namespace detail {

inline constexpr double inv_phi = 0.6180339887498949;

// Golden-section minimum of f on [lo, hi]; stops when the bracket is below step.
template <class F>
double golden_min(F&& f, double lo, double hi, double step) {
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > step) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // the endpoints are candidates too: f may be monotone on the bracket
  double best = 0.5 * (a + b), fbest = f(best);
  if (const double fl = f(lo); fl < fbest) { best = lo; fbest = fl; }
  if (const double fh = f(hi); fh < fbest) { best = hi; }
  return best;
}

struct Candidate {
  Vector y;
  double value;
};

}  // namespace detail

/// Brute-force rho(x) = min over the boundary of gamma(x - y): a coarse pass over
/// `budget` samples followed by golden-section refinement of every near-optimal
/// local minimum. Sample data for bounded boundaries is cached, so one Oracle
/// should be reused across queries.
class Oracle {
 public:
  Oracle(const DualPolytope& P, const BoundaryShape& B, int budget) : P_(P), B_(B), budget_(budget) {
    if (budget < 100) fail(ErrorCode::BudgetTooSmall, "budget " + std::to_string(budget) + " < 100");
    if (P.dim() != B.dim()) fail(ErrorCode::DimensionMismatch, "polytope and boundary dimensions differ");
    n_ = P.dim();
    m_ = static_cast<int>(P.polar_vertices().size());
    for (const auto& v : P.polar_vertices())
      for (int k = 0; k < n_; ++k) polar_flat_.push_back(v[k]);
    vmax_ = 0.0;
    for (const auto& v : P.polar_vertices()) vmax_ = std::max(vmax_, v.norm());
    rk_ = 0.0;
    for (const auto& z : P.vertices()) rk_ = std::max(rk_, z.norm());

    if (auto* s = B.as<Sphere>()) {
      if (n_ == 3) {
        sphere3_ = true;
        center3_ = s->center.head<3>();
        radius3_ = s->radius;
        sphere_pts_ = sample_boundary(B, budget);
        spacing3_ = 2.0 * std::sqrt(4.0 * std::numbers::pi / budget);
        for (const auto& y : sphere_pts_) push_dots(dots3_, y.data());
        build_neighbours3();
        return;
      }
      if (n_ != 2) fail(ErrorCode::UnsupportedDimension, "the oracle handles spheres in dimension 2 or 3");
    } else if (n_ != 2) {
      fail(ErrorCode::UnsupportedDimension, "curve boundaries are planar");
    }
    if (B.as<Parabola>()) return;  // sampled per query
    fixed_ = build_samples(boundary_pieces(B), budget);
  }

  const DualPolytope& polytope() const { return P_; }
  const BoundaryShape& boundary() const { return B_; }

  DistanceResult evaluate(const Vector& x) const {
    if (x.size() != n_) fail(ErrorCode::DimensionMismatch, "query dimension");
    DistanceResult res;
    res.method = Method::oracle;
    res.region.branch = "oracle";
    if (region_membership(B_, x) == Membership::on_boundary) {
      res.value = 0.0;
      res.closest = {x};
      res.region.active_face_dim = -1;
      return res;
    }
    std::vector<detail::Candidate> found = sphere3_ ? minimize_sphere3(x) : minimize_curves(x);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : found) best = std::min(best, c.value);
    const double keep = 1e-9 + 1e-9 * best;
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    std::vector<double> ax(static_cast<std::size_t>(m_));
    polar_dots(x, ax.data());
    for (const auto& c : found) {
      if (c.value > best + keep) continue;
      bool dup = false;
      for (const auto& y : res.closest)
        if ((y - c.y).norm() < 1e-6 || (sphere3_ && same_valley(ax.data(), y, c.y, best + keep))) {
          dup = true;
          break;
        }
      if (!dup) res.closest.push_back(c.y);
    }
    res.value = best;
    const auto g = gauge(P_, Vector(x - res.closest.front()));
    res.region.active_face_dim = detail::rank_of(detail::pick(P_.polar_vertices(), g.active)) - 1;
    return res;
  }

  /// gamma(x - y) using the cached polar data.
  double objective(const double* ax, const double* y) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      double s = ax[i];
      for (int k = 0; k < n_; ++k) s -= polar_flat_[static_cast<std::size_t>(i * n_ + k)] * y[k];
      best = std::max(best, s);
    }
    return best;
  }

 private:
  struct PieceSamples {
    int piece;
    double h;          // parameter spacing
    int first, count;  // rows in SampleSet::dots
  };

  struct SampleSet {
    std::vector<CurvePiece> pieces;
    std::vector<double> params, dots;
    std::vector<PieceSamples> groups;
  };

  void push_dots(std::vector<double>& dots, const double* y) const {
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int k = 0; k < n_; ++k) s += polar_flat_[static_cast<std::size_t>(i * n_ + k)] * y[k];
      dots.push_back(s);
    }
  }

  SampleSet build_samples(std::vector<CurvePiece> pieces, int budget) const {
    SampleSet out;
    double total = 0.0;
    for (const auto& c : pieces) total += c.length();
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const auto& c = pieces[p];
      const int cnt = std::max(5, static_cast<int>(std::lround(budget * c.length() / total)));
      PieceSamples g{static_cast<int>(p), 0.0, static_cast<int>(out.params.size()), cnt};
      g.h = c.periodic ? (c.t1 - c.t0) / cnt : (c.t1 - c.t0) / (cnt - 1);
      for (int k = 0; k < cnt; ++k) {
        const double t = c.t0 + g.h * k;
        out.params.push_back(t);
        const Eigen::Vector2d y = c.point(t);
        push_dots(out.dots, y.data());
      }
      out.groups.push_back(g);
    }
    out.pieces = std::move(pieces);
    return out;
  }

  void polar_dots(const Vector& x, double* ax) const {
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int k = 0; k < n_; ++k) s += polar_flat_[static_cast<std::size_t>(i * n_ + k)] * x[k];
      ax[i] = s;
    }
  }

  double coarse_value(const double* ax, int row) const {
    const double* d = &dots3_[static_cast<std::size_t>(row) * static_cast<std::size_t>(m_)];
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) best = std::max(best, ax[i] - d[i]);
    return best;
  }

  std::vector<detail::Candidate> minimize_curves(const Vector& x) const {
    SampleSet local;
    const SampleSet* set = &fixed_;
    if (B_.as<Parabola>()) {
      // Any curve point y0 bounds rho by gamma(x - y0); every closest point then
      // satisfies |y - x| <= rho * max|z_j|, which bounds its abscissa.
      double bound = std::numeric_limits<double>::infinity();
      std::vector<double> probes{x[0]};
      if (x[1] > 0) {
        probes.push_back(std::sqrt(x[1]));
        probes.push_back(-std::sqrt(x[1]));
      }
      for (double t : detail::parabola_stationary(x[0], x[1])) probes.push_back(t);
      for (double t : probes) bound = std::min(bound, gauge_value(P_, Vector(x - make_vector({t, t * t}))));
      const double half = bound * rk_ * (1.0 + 1e-9) + 1e-12;
      CurvePiece c;
      c.kind = CurvePiece::Kind::parabola;
      c.t0 = x[0] - half;
      c.t1 = x[0] + half;
      local = build_samples({c}, budget_);
      set = &local;
    }
    const auto* pieces = &set->pieces;
    const auto* params = &set->params;
    const auto* dots = &set->dots;
    const auto* groups = &set->groups;

    std::vector<double> ax(static_cast<std::size_t>(m_));
    polar_dots(x, ax.data());
    const std::size_t rows = params->size();
    std::vector<double> f(rows);
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* d = &(*dots)[r * static_cast<std::size_t>(m_)];
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) best = std::max(best, ax[static_cast<std::size_t>(i)] - d[i]);
      f[r] = best;
      fmin = std::min(fmin, best);
    }

    std::vector<detail::Candidate> out;
    for (const auto& g : *groups) {
      const auto& c = (*pieces)[static_cast<std::size_t>(g.piece)];
      double speed = 1.0;
      switch (c.kind) {
        case CurvePiece::Kind::arc: speed = c.radius; break;
        case CurvePiece::Kind::segment: speed = (c.b - c.a).norm(); break;
        case CurvePiece::Kind::parabola:
          speed = std::sqrt(1 + 4 * std::max(c.t0 * c.t0, c.t1 * c.t1));
          break;
      }
      // A sample next to the true minimizer is within the Lipschitz bound of it.
      const double threshold = fmin * (1.0 + 1e-3) + vmax_ * speed * g.h + 1e-12;
      auto obj = [&](double t) {
        const Eigen::Vector2d y = c.point(t);
        return objective(ax.data(), y.data());
      };
      for (int k = 0; k < g.count; ++k) {
        const double fk = f[static_cast<std::size_t>(g.first + k)];
        if (fk > threshold) continue;
        auto at = [&](int j) -> double {
          if (c.periodic) j = (j % g.count + g.count) % g.count;
          if (j < 0 || j >= g.count) return std::numeric_limits<double>::infinity();
          return f[static_cast<std::size_t>(g.first + j)];
        };
        if (fk > at(k - 1) || fk > at(k + 1)) continue;
        const double t = refine_1d(c, obj, (*params)[static_cast<std::size_t>(g.first + k)], g.h);
        const Eigen::Vector2d y = c.point(t);
        out.push_back({make_vector({y[0], y[1]}), obj(t)});
      }
    }
    return out;
  }

  template <class F>
  static double refine_1d(const CurvePiece& c, F& obj, double t, double h) {
    for (int walk = 0; walk < 40; ++walk) {
      double lo = t - 2 * h, hi = t + 2 * h;
      if (!c.periodic) {
        lo = std::max(lo, c.t0);
        hi = std::min(hi, c.t1);
      }
      const double step = 1e-12 * std::max(1.0, std::abs(t));
      const double tn = detail::golden_min(obj, lo, hi, step);
      const double edge = 1e-3 * (hi - lo);
      const bool at_lo = tn - lo < edge && (c.periodic || lo > c.t0);
      const bool at_hi = hi - tn < edge && (c.periodic || hi < c.t1);
      t = tn;
      if (!at_lo && !at_hi) break;
    }
    return t;
  }

  // ---- sphere in R^3

  Eigen::Vector3d sphere_point(const Eigen::Vector3d& dir, const Eigen::Vector3d& e1, const Eigen::Vector3d& e2,
                               double a, double b) const {
    const Eigen::Vector3d d = dir + a * e1 + b * e2;
    return center3_ + radius3_ * d / d.norm();
  }

  std::vector<detail::Candidate> minimize_sphere3(const Vector& x) const {
    const auto& s = *B_.as<Sphere>();
    std::vector<double> ax(static_cast<std::size_t>(m_));
    polar_dots(x, ax.data());
    const std::size_t rows = sphere_pts_.size();
    std::vector<double> f(rows);
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      f[r] = coarse_value(ax.data(), static_cast<int>(r));
      fmin = std::min(fmin, f[r]);
    }
    const double h = spacing3_ * s.radius;
    const double threshold = fmin * (1.0 + 1e-3) + vmax_ * h + 1e-12;
    std::vector<std::size_t> cand;
    for (std::size_t r = 0; r < rows; ++r)
      if (f[r] <= threshold) cand.push_back(r);
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<std::size_t> seeds;
    for (std::size_t r : cand) {
      bool local_min = true;
      for (int q : nbr3_[r])
        if (f[static_cast<std::size_t>(q)] < f[r]) { local_min = false; break; }
      if (!local_min) continue;
      // neighbouring local minima are ties on one plateau; distinct minima
      // can sit closer than the sample spacing, so nothing wider is merged
      bool tied = false;
      for (std::size_t q : seeds)
        if (std::find(nbr3_[r].begin(), nbr3_[r].end(), static_cast<int>(q)) != nbr3_[r].end()) { tied = true; break; }
      if (!tied) seeds.push_back(r);
    }

    // Coarse pass on every seed, then finer passes on the ones that can still win.
    // Flat valleys leave the coarse minimizer up to a few 1e-3 off, beyond the
    // reach of the fine window, hence the middle stage.
    std::vector<std::pair<Eigen::Vector3d, double>> coarse;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r : seeds) {
      const Eigen::Vector3d dir = ((sphere_pts_[r] - s.center) / s.radius).head<3>();
      const Eigen::Vector3d d = refine_sphere3(ax.data(), dir, 1.5 * spacing3_, 1e-5);
      const Eigen::Vector3d y = center3_ + radius3_ * d;
      const double v = objective(ax.data(), y.data());
      best = std::min(best, v);
      coarse.emplace_back(d, v);
    }
    std::vector<detail::Candidate> out = stationary_sphere3(ax.data(), threshold);
    for (const auto& [d0, v0] : coarse) {
      if (v0 > best + 1e-3 * (1.0 + best)) continue;
      const Eigen::Vector3d dm = refine_sphere3(ax.data(), d0, 2e-3, 1e-8);
      const Eigen::Vector3d d = refine_sphere3(ax.data(), dm, 1e-4, 1e-13);
      const Eigen::Vector3d y = center3_ + radius3_ * d;
      out.push_back({Vector(y), objective(ax.data(), y.data())});
    }
    return out;
  }

  // Points of the sphere where one, two or three of the linear pieces of
  // gamma(x - y) are active and the active piece is stationary along the
  // matching circle or point set. Inside the ball the pieces curve the wrong
  // way and neighbouring minima can be closer than the sample spacing, so these
  // join the sampled seeds. Only those below `level` are kept.
  std::vector<detail::Candidate> stationary_sphere3(const double* ax, double level) const {
    std::vector<detail::Candidate> out;
    std::vector<Eigen::Vector3d> v(static_cast<std::size_t>(m_));
    std::vector<double> b(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      v[i] = Eigen::Vector3d(&polar_flat_[static_cast<std::size_t>(3 * i)]);
      b[i] = ax[i] - v[i].dot(center3_);  // f_i(u) = b_i - R <v_i, u> on y = c + R u
    }
    auto push = [&](const Eigen::Vector3d& u) {
      if (!u.allFinite()) return;
      const Eigen::Vector3d y = center3_ + radius3_ * u.normalized();
      const double f = objective(ax, y.data());
      if (f <= level) out.push_back({Vector(y), f});
    };
    for (int i = 0; i < m_; ++i) push(v[i].normalized());
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j) {
        // circle <w, u> = t; the largest <v_i, u> on it
        const Eigen::Vector3d w = v[i] - v[j];
        const double ww = w.squaredNorm();
        if (ww == 0) continue;
        const double t = (b[i] - b[j]) / radius3_;
        const double r2 = 1.0 - t * t / ww;
        if (r2 < 0) continue;
        const Eigen::Vector3d q = v[i] - v[i].dot(w) / ww * w;
        if (q.norm() < 1e-14) continue;
        const Eigen::Vector3d u0 = t / ww * w;
        push(u0 + std::sqrt(r2) * q.normalized());
        push(u0 - std::sqrt(r2) * q.normalized());
      }
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j)
        for (int k = j + 1; k < m_; ++k) {
          const Eigen::Vector3d w1 = v[i] - v[j], w2 = v[i] - v[k];
          const Eigen::Vector3d d = w1.cross(w2);
          if (d.squaredNorm() < 1e-24) continue;
          Eigen::Matrix2d G;
          G << w1.dot(w1), w1.dot(w2), w1.dot(w2), w2.dot(w2);
          const Eigen::Vector2d rhs((b[i] - b[j]) / radius3_, (b[i] - b[k]) / radius3_);
          const Eigen::Vector2d c = G.inverse() * rhs;
          const Eigen::Vector3d u0 = c[0] * w1 + c[1] * w2;
          const double s2 = (1.0 - u0.squaredNorm()) / d.squaredNorm();
          if (s2 < 0) continue;
          push(u0 + std::sqrt(s2) * d);
          push(u0 - std::sqrt(s2) * d);
        }
    return out;
  }

  // Sample neighbours within 1.5 times the mean spacing, bucketed on a cubic grid.
  void build_neighbours3() {
    const double c = 1.5 * std::sqrt(4.0 * std::numbers::pi / budget_);
    const int cells = std::max(1, static_cast<int>(std::ceil(2.0 / c)));
    auto cell_of = [&](double t) { return std::clamp(static_cast<int>((t + 1.0) / c), 0, cells - 1); };
    std::unordered_map<long, std::vector<int>> grid;
    auto key = [&](int i, int j, int k) { return (static_cast<long>(i) * cells + j) * cells + k; };
    std::vector<Eigen::Vector3d> u(sphere_pts_.size());
    for (std::size_t r = 0; r < u.size(); ++r) {
      u[r] = (sphere_pts_[r].head<3>() - center3_) / radius3_;
      grid[key(cell_of(u[r][0]), cell_of(u[r][1]), cell_of(u[r][2]))].push_back(static_cast<int>(r));
    }
    nbr3_.assign(u.size(), {});
    for (std::size_t r = 0; r < u.size(); ++r) {
      const int ci = cell_of(u[r][0]), cj = cell_of(u[r][1]), ck = cell_of(u[r][2]);
      for (int i = ci - 1; i <= ci + 1; ++i)
        for (int j = cj - 1; j <= cj + 1; ++j)
          for (int k = ck - 1; k <= ck + 1; ++k) {
            auto it = grid.find(key(i, j, k));
            if (i < 0 || j < 0 || k < 0 || it == grid.end()) continue;
            for (int q : it->second)
              if (static_cast<std::size_t>(q) != r && (u[static_cast<std::size_t>(q)] - u[r]).norm() < c)
                nbr3_[r].push_back(q);
          }
    }
  }

  // On a sphere a flat valley pins the minimizer down only to about the square
  // root of the rounding level, so two refinements of one minimum can land
  // apart. They are the same minimum when the arc between them stays low.
  bool same_valley(const double* ax, const Vector& a, const Vector& b, double level) const {
    if ((a - b).norm() > spacing3_ * radius3_) return false;
    for (double t : {0.25, 0.5, 0.75}) {
      const Eigen::Vector3d m = ((1 - t) * a + t * b).head<3>() - center3_;
      const Eigen::Vector3d y = center3_ + radius3_ * m / m.norm();
      if (objective(ax, y.data()) > level) return false;
    }
    return true;
  }

  // Nested golden-section in a tangent chart around dir; the chart is re-centred
  // whenever the minimizer lands near the edge of the box.
  Eigen::Vector3d refine_sphere3(const double* ax, Eigen::Vector3d dir, double w, double tol) const {
    for (int walk = 0; walk < 24; ++walk) {
      const Eigen::Vector3d e1 = dir.unitOrthogonal();
      const Eigen::Vector3d e2 = dir.cross(e1);
      auto fb_at = [&](double a, double b) {
        const Eigen::Vector3d y = sphere_point(dir, e1, e2, a, b);
        return objective(ax, y.data());
      };
      auto inner = [&](double a) {
        auto fb = [&](double b) { return fb_at(a, b); };
        return detail::golden_min(fb, -w, w, tol);
      };
      auto outer = [&](double a) { return fb_at(a, inner(a)); };
      const double a = detail::golden_min(outer, -w, w, tol);
      const double b = inner(a);
      const Eigen::Vector3d y = sphere_point(dir, e1, e2, a, b);
      dir = (y - center3_) / radius3_;
      if (std::abs(a) < 0.9 * w && std::abs(b) < 0.9 * w) break;
    }
    return dir;
  }

  DualPolytope P_;
  BoundaryShape B_;
  int budget_;
  int n_ = 0, m_ = 0;
  double vmax_ = 0.0, rk_ = 0.0;
  std::vector<double> polar_flat_;

  SampleSet fixed_;

  bool sphere3_ = false;
  std::vector<Vector> sphere_pts_;
  std::vector<double> dots3_;
  std::vector<std::vector<int>> nbr3_;
  double spacing3_ = 0.0;
  Eigen::Vector3d center3_{0, 0, 0};
  double radius3_ = 1.0;
};

/// One-shot oracle query.
inline DistanceResult rho_oracle(const DualPolytope& P, const BoundaryShape& B, const Vector& x, int budget) {
  return Oracle(P, B, budget).evaluate(x);
}

}  // namespace gaugedist
