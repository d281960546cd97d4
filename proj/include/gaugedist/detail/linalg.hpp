#pragma once

#include "gaugedist/types.hpp"

#include <algorithm>
#include <vector>

namespace gaugedist::detail {

/// Numerical rank of the column set, relative to the largest singular value.
inline int rank_of(const std::vector<Vector>& columns, double rel = 1e-9) {
  if (columns.empty()) return 0;
  const auto n = columns.front().size();
  Matrix m(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = columns[j];
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel * s[0]) ++r;
  return r;
}

struct NnlsResult {
  Vector coefficients;
  double residual = 0.0;  // ||A x - b||
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
inline NnlsResult nnls(const Matrix& a, const Vector& b) {
  const Eigen::Index k = a.cols();
  Vector x = Vector::Zero(k);
  std::vector<bool> passive(static_cast<std::size_t>(k), false);
  const double tiny = 1e-14 * (1.0 + a.norm());

  auto solve_passive = [&](Vector& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < k; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    z = Vector::Zero(k);
    if (idx.empty()) return;
    Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    Vector zs = sub.completeOrthogonalDecomposition().solve(b);
    for (std::size_t c = 0; c < idx.size(); ++c) z[idx[c]] = zs[static_cast<Eigen::Index>(c)];
  };

  for (int outer = 0; outer < 3 * static_cast<int>(k) + 10; ++outer) {
    Vector w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tiny;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Vector z;
    for (int inner = 0; inner < 3 * static_cast<int>(k) + 10; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
      if (feasible) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          const double denom = x[j] - z[j];
          if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tiny) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
    x = z.cwiseMax(0.0);
  }
  return {x, (a * x - b).norm()};
}

/// True when w is a nonnegative combination of the generators.
inline bool in_cone(const std::vector<Vector>& generators, const Vector& w,
                    double residual_tol = tol::cone_residual) {
  if (w.isZero(0.0)) return true;
  if (generators.empty()) return false;
  Matrix a(w.size(), static_cast<Eigen::Index>(generators.size()));
  for (std::size_t j = 0; j < generators.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = generators[j];
  if (w.size() == 2 && generators.size() == 2) {
    // Exact 2x2 solve when the two generators span the plane.
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(det) > 1e-12 * a.squaredNorm()) {
      const double l0 = (w[0] * a(1, 1) - w[1] * a(0, 1)) / det;
      const double l1 = (a(0, 0) * w[1] - a(1, 0) * w[0]) / det;
      const double slack = residual_tol * (1.0 + w.norm());
      return l0 >= -slack && l1 >= -slack;
    }
  }
  return nnls(a, w).residual <= residual_tol * (1.0 + w.norm());
}

/// True when p is a convex combination of the given points.
inline bool in_convex_hull(const std::vector<Vector>& points, const Vector& p,
                           double residual_tol = tol::cone_residual) {
  if (points.empty()) return false;
  const Eigen::Index n = p.size();
  double scale = 1.0;
  for (const auto& q : points) scale = std::max(scale, q.cwiseAbs().maxCoeff());
  Matrix a(n + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)).head(n) = points[j];
    a(n, static_cast<Eigen::Index>(j)) = scale;
  }
  Vector b(n + 1);
  b.head(n) = p;
  b[n] = scale;
  return nnls(a, b).residual <= residual_tol * (1.0 + b.norm());
}

}  // namespace gaugedist::detail
