#pragma once

#include "gaugedist/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gaugedist {

enum class Method { oracle, closed_form };

constexpr std::string_view to_string(Method m) noexcept { return m == Method::oracle ? "oracle" : "closed_form"; }

/// Which formula branch produced a value. `active_face_dim` is the dimension of
/// the face of K° carrying the closest-point relation (-1 when x is on the boundary).
struct RegionTag {
  std::string branch;
  int active_face_dim = -1;
  std::optional<std::vector<int>> J;  // 1-based coordinate indices
  bool boundary_of_regions = false;

  std::string label() const {
    if (!J) return branch;
    std::string s = branch + "(J={";
    for (std::size_t i = 0; i < J->size(); ++i) s += (i ? "," : "") + std::to_string((*J)[i]);
    return s + "})";
  }
};

/// Sign conventions for the distance outside U.
///   reflected:  rho_s = -d_{-K}(x), i.e. min over the boundary of gamma(y - x)
///   same_gauge: rho_s = -d_K(x),    i.e. min over the boundary of gamma(x - y)
enum class SignConvention { reflected, same_gauge };

struct DistanceResult {
  double value = 0.0;
  std::vector<Vector> closest;
  RegionTag region;
  Method method = Method::oracle;
};

}  // namespace gaugedist
