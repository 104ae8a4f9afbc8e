#pragma once

#include <cmath>
#include <numbers>

namespace franson {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into the half-open interval [-pi, pi).
inline double wrap_phase(double x) {
  double w = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  // Rounding in the floor argument can leave w a hair outside the interval.
  if (w >= kPi) w -= kTwoPi;
  if (w < -kPi) w += kTwoPi;
  return w;
}

/// Absolute distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
  return std::abs(wrap_phase(a - b));
}

}  // namespace franson
