#pragma once

// Reference-frame transforms between three-phase (a,b,c), stationary
// two-phase (alpha,beta) and rotating (d,q) quantities.
//
// Scaling is amplitude-invariant: a balanced three-phase set with peak
// amplitude A maps to an alpha-beta vector of magnitude A.  The rotating
// frame uses the q-lagging convention
//     d =  alpha*cos(theta) + beta*sin(theta)
//     q = -alpha*sin(theta) + beta*cos(theta)
// so a vector aligned with the frame angle lands entirely on d.

#include <cmath>
#include <numbers>

#include "imdrive/errors.hpp"

namespace imdrive {

struct AbcTriple {
  double a{};
  double b{};
  double c{};
};

struct AlphaBetaPair {
  double alpha{};
  double beta{};
};

struct DqPair {
  double d{};
  double q{};
};

namespace detail {

inline void require_finite2(double x, double y, const char* where) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidInput(std::string(where) + ": non-finite input");
  }
}

inline void require_finite3(double x, double y, double z, const char* where) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw InvalidInput(std::string(where) + ": non-finite input");
  }
}

}  // namespace detail

inline AlphaBetaPair clarke(const AbcTriple& abc) {
  detail::require_finite3(abc.a, abc.b, abc.c, "clarke");
  constexpr double k = 2.0 / 3.0;
  return {k * (abc.a - 0.5 * abc.b - 0.5 * abc.c),
          k * (std::numbers::sqrt3 / 2.0) * (abc.b - abc.c)};
}

inline AbcTriple inverse_clarke(const AlphaBetaPair& ab) {
  detail::require_finite2(ab.alpha, ab.beta, "inverse_clarke");
  const double s = (std::numbers::sqrt3 / 2.0) * ab.beta;
  return {ab.alpha, -0.5 * ab.alpha + s, -0.5 * ab.alpha - s};
}

inline DqPair park(const AlphaBetaPair& ab, double theta) {
  detail::require_finite3(ab.alpha, ab.beta, theta, "park");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {ab.alpha * c + ab.beta * s, -ab.alpha * s + ab.beta * c};
}

inline AlphaBetaPair inverse_park(const DqPair& dq, double theta) {
  detail::require_finite3(dq.d, dq.q, theta, "inverse_park");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {dq.d * c - dq.q * s, dq.d * s + dq.q * c};
}

}  // namespace imdrive
