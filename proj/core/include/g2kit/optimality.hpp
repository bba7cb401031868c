#pragma once

// Minimization of the equal-time g2 of amplitude-squeezed Gaussian states and
// the resulting non-Gaussianity witness.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace g2kit::opt {

struct OptimumResult {
  double r_opt = 0.0;
  std::optional<double> alpha_opt;  ///< set when the displacement was optimized too
  double g2_min = 0.0;
  bool converged = false;
};

enum class Verdict {
  kClassicalPossible,
  kNonclassicalGaussianPossible,
  kNonGaussianCertified,
};

std::string_view to_string(Verdict v) noexcept;

struct WitnessVerdict {
  Verdict classification = Verdict::kClassicalPossible;
  double gaussian_bound = 0.0;  ///< minimal Gaussian g2(0) at the given displacement
};

inline constexpr double kSqueezeBracket = 5.0;
inline constexpr double kSqueezeTolerance = 1e-10;
inline constexpr int kMaxIterations = 200;
inline constexpr double kDefaultWitnessTolerance = 1e-3;

/// g2(0) of the amplitude-squeezed state (theta = 2 phi) with the given
/// displacement, squeeze parameter and thermal occupation.
double g2_amplitude_squeezed(double alpha_mag, double r, double n_eff);

/// Minimizes g2 over r at fixed displacement and n_eff by golden section on
/// [0, 5]. `converged` is false if the bracket tolerance was not met or the
/// curvature at the optimum is below 1e-12.
/// Throws Error(kInvalidArgument) for alpha_mag <= 0 and Error(kNoConvergence)
/// when the iteration cap is hit.
OptimumResult r_opt(double alpha_mag, double n_eff);

/// Pure-state special case r_opt(alpha_mag, 0).
OptimumResult r_opt_pure(double alpha_mag);

/// Optimal displacement at fixed (r, n_eff). Throws
/// Error(kBelowMinimalSqueezing) for r <= ln sqrt(2 n_eff + 1).
double alpha_opt_for(double r, double n_eff);

/// Joint optimum over (r, alpha) at fixed n_eff: sinh^2 r_opt = n_eff.
OptimumResult g2_min_at_fixed_neff(double n_eff);

/// Minimal Gaussian g2(0) at each displacement (n_eff = 0). Pairs are
/// (alpha, bound).
std::vector<std::pair<double, double>> gaussian_bound_curve(std::span<const double> alpha_grid);

/// Classifies a measured g2(0) at displacement alpha_mag. `n_eff` > 0 raises
/// the bound to the minimum over r at that fixed impurity.
WitnessVerdict witness(double alpha_mag, double g2_measured,
                       double tolerance = kDefaultWitnessTolerance, double n_eff = 0.0);

}  // namespace g2kit::opt
