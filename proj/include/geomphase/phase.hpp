#pragma once

#include <cmath>
#include <numbers>

namespace geomphase {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce to the principal branch (-pi, pi].
inline double wrap_phase(double x) {
  double r = std::remainder(x, two_pi);  // [-pi, pi]
  if (r <= -pi) r += two_pi;
  return r;
}

/// Reduce to [0, 2pi); used for exported values.
inline double wrap_phase_positive(double x) {
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi || r == 0.0) r = 0.0;  // also folds -0
  return r;
}

/// Distance on the circle, in [0, pi].
inline double phase_distance(double a, double b) {
  const double d = std::fabs(wrap_phase(a - b));
  return std::fmin(d, two_pi - d);
}

}  // namespace geomphase
