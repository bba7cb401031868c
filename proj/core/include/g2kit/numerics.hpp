#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <vector>

namespace g2kit {

/// Reduces an angle in radians to (-pi, pi].
inline double wrap_angle(double angle) {
  if (!std::isfinite(angle)) return angle;
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

struct GoldenSectionResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi].
/// Stops when the bracket width drops below `tol`; `converged` is false if
/// `max_iterations` was reached first.
template <std::invocable<double> F>
GoldenSectionResult golden_section(F&& f, double lo, double hi, double tol,
                                   int max_iterations = 200) {
  constexpr double kInvPhi = 0.6180339887498948482;  // 1/phi
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  GoldenSectionResult result;
  while (b - a > tol) {
    if (result.iterations >= max_iterations) {
      break;
    }
    ++result.iterations;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  result.converged = (b - a) <= tol;
  result.x = 0.5 * (a + b);
  result.fx = f(result.x);
  if (fc < result.fx) {
    result.x = c;
    result.fx = fc;
  }
  if (fd < result.fx) {
    result.x = d;
    result.fx = fd;
  }
  return result;
}

/// Global minimum of f on [0, hi]: evaluates f at 0 and on `points` log-spaced
/// nodes from `first` to `hi`, then refines the best node's neighborhood by
/// golden section. For functions that are not unimodal on the full range.
template <std::invocable<double> F>
GoldenSectionResult scan_then_golden(F&& f, double first, double hi, double tol,
                                     int max_iterations = 200, int points = 400) {
  const double ratio = std::pow(hi / first, 1.0 / (points - 1));
  std::vector<double> grid{0.0};
  for (int i = 0; i < points; ++i) grid.push_back(first * std::pow(ratio, i));
  grid.back() = hi;
  std::size_t best = 0;
  double best_f = f(0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double up = grid[best + 1 < grid.size() ? best + 1 : best];
  return golden_section(f, lo, up, tol, max_iterations);
}

}  // namespace g2kit
