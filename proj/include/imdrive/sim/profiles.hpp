#pragma once

#include <span>
#include <utility>

#include "imdrive/errors.hpp"

namespace imdrive {

using ProfilePoint = std::pair<double, double>;

// Breakpoint lists are time-sorted and start at t = 0; both evaluators
// hold the last value beyond the final breakpoint.
inline void validate_profile(std::span<const ProfilePoint> pts, const char* name) {
  if (pts.empty()) {
    throw ConfigError(std::string(name) + ": profile needs at least one point");
  }
  if (pts.front().first != 0.0) {
    throw ConfigError(std::string(name) + ": profile must start at t = 0");
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].first > pts[i - 1].first)) {
      throw ConfigError(std::string(name) + ": profile times must strictly increase");
    }
  }
}

// Linear interpolation between breakpoints.
inline double piecewise_linear(std::span<const ProfilePoint> pts, double t) {
  if (t <= pts.front().first) return pts.front().second;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (t <= pts[i].first) {
      const auto& [t0, v0] = pts[i - 1];
      const auto& [t1, v1] = pts[i];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return pts.back().second;
}

// Sample-and-hold between breakpoints.
inline double piecewise_constant(std::span<const ProfilePoint> pts, double t) {
  double v = pts.front().second;
  for (const auto& [ti, vi] : pts) {
    if (ti <= t) v = vi;
    else break;
  }
  return v;
}

}  // namespace imdrive
