#pragma once

#include "gaugedist/boundary.hpp"
#include "gaugedist/distance_result.hpp"
#include "gaugedist/types.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace gaugedist {

using DistanceFn = std::function<DistanceResult(const Vector&)>;
using DomainFn = std::function<bool(const Vector&)>;

/// Node-centred evaluation grid over a 2-D window. Higher-dimensional setups
/// are sliced: `slice` holds the fixed trailing coordinates.
struct FieldGrid {
  Window window;
  int nx = 0, ny = 0;
  Vector slice;

  std::vector<double> value;
  std::vector<int> label;  // index into labels; -1 outside the domain
  std::vector<int> n_closest;
  std::vector<std::uint8_t> boundary_of_regions;
  std::vector<std::string> labels;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + i; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  double coord(int axis, int k) const {
    const int count = axis == 0 ? nx : ny;
    const double t = static_cast<double>(k) / (count - 1);
    return window.lo[axis] + (window.hi[axis] - window.lo[axis]) * t;
  }
  Vector point(int i, int j) const {
    Vector x(2 + slice.size());
    x[0] = coord(0, i);
    x[1] = coord(1, j);
    for (Eigen::Index k = 0; k < slice.size(); ++k) x[2 + k] = slice[k];
    return x;
  }
  double cell_width(int axis) const {
    return (window.hi[axis] - window.lo[axis]) / ((axis == 0 ? nx : ny) - 1);
  }

  int label_id(const std::string& name) {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == name) return static_cast<int>(k);
    labels.push_back(name);
    return static_cast<int>(labels.size()) - 1;
  }
};

inline void check_grid_shape(const Window& w, int nx, int ny) {
  if (w.lo.size() != 2 || w.hi.size() != 2) fail(ErrorCode::ConfigError, "window must be 2-D");
  if (!(w.lo.array() < w.hi.array()).all()) fail(ErrorCode::ConfigError, "window is degenerate");
  if (nx < 2 || ny < 2) fail(ErrorCode::ConfigError, "resolution must be at least 2 per axis");
}

/// Evaluates rho on every node, rows split over `threads` workers (0: one per
/// core). rho must be safe to call concurrently. Labels are numbered in grid
/// order afterwards, so the result does not depend on the thread count.
/// Nodes outside the domain keep value 0 and label -1.
inline FieldGrid evaluate_grid(const DistanceFn& rho, const Window& w, int nx, int ny, const Vector& slice = {},
                               const DomainFn& in_domain = {}, unsigned threads = 0) {
  check_grid_shape(w, nx, ny);
  FieldGrid g;
  g.window = w;
  g.nx = nx;
  g.ny = ny;
  g.slice = slice;
  g.value.assign(g.size(), 0.0);
  g.label.assign(g.size(), -1);
  g.n_closest.assign(g.size(), 0);
  g.boundary_of_regions.assign(g.size(), 0);

  std::vector<std::optional<DistanceResult>> res(g.size());
  std::atomic<int> next_row{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int j; (j = next_row++) < ny;) {
      try {
        for (int i = 0; i < nx; ++i) {
          const Vector x = g.point(i, j);
          if (in_domain && !in_domain(x)) continue;
          res[g.index(i, j)] = rho(x);
        }
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(ny));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!res[k]) continue;
    g.value[k] = res[k]->value;
    g.label[k] = g.label_id(res[k]->region.label());
    g.n_closest[k] = static_cast<int>(res[k]->closest.size());
    g.boundary_of_regions[k] = res[k]->region.boundary_of_regions;
  }
  return g;
}

}  // namespace gaugedist
