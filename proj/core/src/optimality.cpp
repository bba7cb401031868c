#include "g2kit/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "g2kit/errors.hpp"
#include "g2kit/gaussian_core.hpp"
#include "g2kit/numerics.hpp"

namespace g2kit::opt {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kClassicalPossible: return "CLASSICAL_POSSIBLE";
    case Verdict::kNonclassicalGaussianPossible: return "NONCLASSICAL_GAUSSIAN_POSSIBLE";
    case Verdict::kNonGaussianCertified: return "NON_GAUSSIAN_CERTIFIED";
  }
  return "UNKNOWN";
}

double g2_amplitude_squeezed(double alpha_mag, double r, double n_eff) {
  return g2_zero(GaussianStateParams::amplitude_squeezed(alpha_mag, r, n_eff));
}

OptimumResult r_opt(double alpha_mag, double n_eff) {
  if (!(alpha_mag > 0.0) || !std::isfinite(alpha_mag)) {
    throw Error(Errc::kInvalidArgument, "r_opt requires alpha_mag > 0");
  }
  if (!(n_eff >= 0.0) || !std::isfinite(n_eff)) {
    throw Error(Errc::kInvalidArgument, "r_opt requires n_eff >= 0");
  }
  // g2(r) is not unimodal on [0, 5] for small alpha (it overshoots 3 before
  // settling), so a log-spaced scan brackets the global minimum first.
  const double seed = alpha_mag * alpha_mag;
  const double tol = std::min(kSqueezeTolerance, 1e-6 * seed);
  auto f = [&](double r) { return g2_amplitude_squeezed(alpha_mag, r, n_eff); };
  const GoldenSectionResult gs =
      scan_then_golden(f, std::min(1e-3 * seed, 1e-6), kSqueezeBracket, tol, kMaxIterations);
  if (!gs.converged) {
    throw Error(Errc::kNoConvergence,
                "golden section hit " + std::to_string(kMaxIterations) + " iterations");
  }

  OptimumResult out;
  out.r_opt = gs.x;
  out.g2_min = gs.fx;
  out.converged = true;

  const double h = 1e-3 * std::max(gs.x, seed) + 1e-12;
  if (gs.x > h) {
    const double curvature = (f(gs.x + h) - 2.0 * gs.fx + f(gs.x - h)) / (h * h);
    if (curvature < 1e-12) out.converged = false;
  }
  return out;
}

OptimumResult r_opt_pure(double alpha_mag) { return r_opt(alpha_mag, 0.0); }

double alpha_opt_for(double r, double n_eff) {
  if (!(r >= 0.0) || !(n_eff >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "alpha_opt_for requires r >= 0 and n_eff >= 0");
  }
  const double thermal = 2.0 * n_eff + 1.0;
  const double gap = std::exp(2.0 * r) - thermal;
  if (!(gap > 0.0)) {
    throw Error(Errc::kBelowMinimalSqueezing,
                "r = " + std::to_string(r) + " <= ln sqrt(2 n_eff + 1); g2(0) > 1 for every alpha");
  }
  const double numerator =
      thermal * (std::exp(r) * n_eff + std::sinh(r)) * std::sinh(2.0 * r);
  return std::sqrt(numerator / (std::exp(-3.0 * r) * gap));
}

OptimumResult g2_min_at_fixed_neff(double n_eff) {
  if (!(n_eff >= 0.0) || !std::isfinite(n_eff)) {
    throw Error(Errc::kInvalidArgument, "n_eff must be finite and >= 0");
  }
  OptimumResult out;
  out.converged = true;
  if (n_eff == 0.0) {
    // Pure states: unbounded suppression as alpha -> 0.
    out.r_opt = 0.0;
    out.alpha_opt = 0.0;
    out.g2_min = 0.0;
    return out;
  }
  out.r_opt = std::asinh(std::sqrt(n_eff));
  out.alpha_opt = alpha_opt_for(out.r_opt, n_eff);
  const double n = n_eff;
  const double root = std::sqrt(n * (n + 1.0));
  const double denom = 1.0 + 24.0 * n + 8.0 * n * n * (11.0 + 8.0 * n * (2.0 + n)) +
                       8.0 * (1.0 + 6.0 * n + 12.0 * n * n + 8.0 * n * n * n) * root;
  out.g2_min = 1.0 - 1.0 / denom;
  return out;
}

std::vector<std::pair<double, double>> gaussian_bound_curve(std::span<const double> alpha_grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    curve.emplace_back(alpha, r_opt_pure(alpha).g2_min);
  }
  return curve;
}

WitnessVerdict witness(double alpha_mag, double g2_measured, double tolerance, double n_eff) {
  if (!(g2_measured >= 0.0) || !std::isfinite(g2_measured)) {
    throw Error(Errc::kInvalidArgument, "measured g2 must be finite and >= 0");
  }
  if (!(tolerance >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "witness tolerance must be >= 0");
  }
  WitnessVerdict v;
  v.gaussian_bound = r_opt(alpha_mag, n_eff).g2_min;
  if (g2_measured >= 1.0) {
    v.classification = Verdict::kClassicalPossible;
  } else if (g2_measured < v.gaussian_bound - tolerance) {
    v.classification = Verdict::kNonGaussianCertified;
  } else {
    v.classification = Verdict::kNonclassicalGaussianPossible;
  }
  return v;
}

}  // namespace g2kit::opt
