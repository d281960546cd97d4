#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <utility>
#include <cstdio>
#include <string>
#include <vector>

namespace gaugedist {

/// Running count for one named check: how often it ran, how often it failed,
/// and the largest residual seen. Soft tallies are reported but never fail a run.
struct CheckTally {
  std::string name;
  long checks = 0;
  long failures = 0;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  bool hard = true;
  std::string first_failure;

  // `context` is only invoked for the first failure, so it may be expensive.
  template <class Context>
  void record(double residual, Context&& context) {
    ++checks;
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    worst_residual = std::max(worst_residual, residual);
    if (!(residual <= tolerance)) {
      if (failures == 0) first_failure = context();
      ++failures;
    }
  }
  void record(double residual) {
    record(residual, [] { return std::string(); });
  }
  // Boolean checks record a residual of 0 (pass) or 1 (fail).
  template <class Context>
  void record_bool(bool ok, Context&& context) {
    record(ok ? 0.0 : 1.0, std::forward<Context>(context));
  }
  void record_bool(bool ok) { record(ok ? 0.0 : 1.0); }
  bool passed() const { return !hard || failures == 0; }
};

struct Report {
  std::string title;
  std::deque<CheckTally> tallies;  // stable references for add()

  CheckTally& add(std::string name, double tolerance, bool hard = true) {
    tallies.push_back(CheckTally{std::move(name), 0, 0, 0.0, tolerance, hard, {}});
    return tallies.back();
  }
  CheckTally* find(const std::string& name) {
    for (auto& t : tallies)
      if (t.name == name) return &t;
    return nullptr;
  }
  long total_checks() const {
    long n = 0;
    for (const auto& t : tallies) n += t.checks;
    return n;
  }
  long hard_failures() const {
    long n = 0;
    for (const auto& t : tallies)
      if (t.hard) n += t.failures;
    return n;
  }
  bool passed() const { return hard_failures() == 0; }

  void merge(const Report& other) {
    for (const auto& t : other.tallies) {
      if (auto* mine = find(t.name)) {
        mine->checks += t.checks;
        if (mine->failures == 0 && t.failures > 0) mine->first_failure = t.first_failure;
        mine->failures += t.failures;
        mine->worst_residual = std::max(mine->worst_residual, t.worst_residual);
      } else {
        tallies.push_back(t);
      }
    }
  }

  std::string to_text() const {
    std::string out;
    char buf[512];
    for (const auto& t : tallies) {
      std::snprintf(buf, sizeof buf, "%-4s %-44s checks=%-8ld failures=%-5ld worst=%.3e tol=%.1e%s\n",
                    t.passed() ? (t.failures ? "soft" : "ok") : "FAIL", t.name.c_str(), t.checks, t.failures,
                    t.worst_residual, t.tolerance, t.hard ? "" : " (soft)");
      out += buf;
      if (t.failures && !t.first_failure.empty()) out += "     first failure: " + t.first_failure + "\n";
    }
    return out;
  }
};

}  // namespace gaugedist
