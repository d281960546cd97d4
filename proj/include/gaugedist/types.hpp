#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gaugedist {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  OriginNotInterior,
  DegenerateHull,
  UnsupportedDimension,
  InconsistentPair,
  DimensionMismatch,
  NotOnBoundary,
  CornerPoint,
  NotTwiceDifferentiableHere,
  WindowRequired,
  BudgetTooSmall,
  NotInscribed,
  EmptyComplement,
  OutsideDomain,
  SupportNotDifferentiable,
  MultipleClosestPoints,
  InvalidShape,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::InconsistentPair: return "InconsistentPair";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::CornerPoint: return "CornerPoint";
    case ErrorCode::NotTwiceDifferentiableHere: return "NotTwiceDifferentiableHere";
    case ErrorCode::WindowRequired: return "WindowRequired";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::NotInscribed: return "NotInscribed";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::SupportNotDifferentiable: return "SupportNotDifferentiable";
    case ErrorCode::MultipleClosestPoints: return "MultipleClosestPoints";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Library error. Every failure mode named by an operation contract maps to
/// one ErrorCode; the message carries the offending data.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

namespace tol {
/// Relative slack for calling a dot product "active" (attaining the max).
inline constexpr double active_rel = 1e-9;
/// Absolute slack for "x lies on the boundary".
inline constexpr double on_boundary = 1e-10;
/// Residual slack for nonnegative-combination feasibility.
inline constexpr double cone_residual = 1e-9;
/// Duplicate vertices: Euclidean distance relative to the bounding-box diameter.
inline constexpr double dedup_rel = 1e-12;
/// max/min vertex norm ratio below which a circumradius is recorded.
inline constexpr double circumradius_ratio = 1e-9;
/// Slack for <z, v> = 1 incidence between vertices and facet normals.
inline constexpr double incidence = 1e-9;
/// gamma(z) = 1 slack for boundary points of K.
inline constexpr double unit_level = 1e-9;
}  // namespace tol

inline Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double c : values) v[i++] = c;
  return v;
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline std::string format_vector(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

/// Tolerance-aware comparison used by the active-set logic.
inline bool within_active(double value, double max_value) {
  return value >= max_value - tol::active_rel * (1.0 + std::abs(max_value));
}

}  // namespace gaugedist
