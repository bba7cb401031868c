#pragma once

// Closed-form moments and intensity correlations of single-mode displaced
// squeezed thermal states. All quantities are dimensionless (hbar = 1).

#include <complex>
#include <span>
#include <vector>

namespace g2kit {

/// Displaced squeezed thermal state D(alpha) S(xi) rho_th S(xi)^dag D(alpha)^dag
/// with alpha = alpha_mag e^{i alpha_phase}, xi = squeeze_mag e^{i squeeze_phase}.
/// Phases are stored reduced to (-pi, pi].
class GaussianStateParams {
 public:
  GaussianStateParams() = default;
  /// Throws Error(kInvalidArgument) on negative magnitudes or occupation,
  /// or non-finite input.
  GaussianStateParams(double alpha_mag, double alpha_phase, double squeeze_mag,
                      double squeeze_phase, double n_eff);

  /// Amplitude-squeezed state (squeeze_phase = 2 alpha_phase).
  static GaussianStateParams amplitude_squeezed(double alpha_mag, double squeeze_mag,
                                                double n_eff, double alpha_phase = 0.0);

  double alpha_mag() const noexcept { return alpha_mag_; }
  double alpha_phase() const noexcept { return alpha_phase_; }
  double squeeze_mag() const noexcept { return squeeze_mag_; }
  double squeeze_phase() const noexcept { return squeeze_phase_; }
  double n_eff() const noexcept { return n_eff_; }
  std::complex<double> alpha() const { return std::polar(alpha_mag_, alpha_phase_); }
  /// theta - 2 phi reduced to (-pi, pi].
  double relative_angle() const;

  bool operator==(const GaussianStateParams&) const = default;

 private:
  double alpha_mag_ = 0.0;
  double alpha_phase_ = 0.0;
  double squeeze_mag_ = 0.0;
  double squeeze_phase_ = 0.0;
  double n_eff_ = 0.0;
};

/// Second moments of the fluctuation d = a - <a>: n = <d^dag d>, s = |<d d>|,
/// and rel_angle = theta - 2 phi. Construction enforces s^2 <= n(n+1).
class MomentPair {
 public:
  static constexpr double kHeisenbergTolerance = 1e-9;

  MomentPair() = default;
  MomentPair(double n, double s, double rel_angle = 0.0);

  double n() const noexcept { return n_; }
  double s() const noexcept { return s_; }
  double rel_angle() const noexcept { return rel_angle_; }

 private:
  double n_ = 0.0;
  double s_ = 0.0;
  double rel_angle_ = 0.0;
};

/// g2(tau) sampled on a strictly increasing grid of delays (units 1/kappa).
struct CorrelationSeries {
  std::vector<double> taus;
  std::vector<double> values;

  CorrelationSeries() = default;
  /// Throws Error(kInvalidArgument) if sizes differ, taus are not strictly
  /// increasing and non-negative, or any value is negative or non-finite.
  CorrelationSeries(std::vector<double> taus, std::vector<double> values);
};

MomentPair moments_from_state(const GaussianStateParams& p);

/// P = Tr rho^2 = 1 / (1 + 2 n_eff).
double purity(const GaussianStateParams& p);

/// <a^dag a> = alpha^2 + n.
double n_total(const GaussianStateParams& p);

/// Equal-time g2 for arbitrary squeeze angle. Throws Error(kVacuumState) for the
/// exact vacuum.
double g2_zero(const GaussianStateParams& p);

/// Two-time g2 from the fluctuation correlators n(tau) = <d^dag(tau) d(0)> and
/// s(tau) = |<d(tau) d(0)>|.
double g2_tau_from_correlators(double alpha_mag, double n_tau, double s_tau, double n_zero,
                               double rel_angle);

/// Inverts the fluctuation moments n = <d^dag d>, m = <d d> of a Gaussian
/// state with mean field `alpha`. Uses tanh 2r = 2|m|/(2n+1), theta = arg m + pi
/// and n_eff = sqrt((n+1/2)^2 - |m|^2) - 1/2 in cancellation-free form. Tiny
/// negative n_eff (> -1e-14) is clamped to 0; anything below, or |m| > n + 1/2,
/// throws Error(kUnphysicalMoments).
GaussianStateParams state_from_moments(std::complex<double> alpha, double n,
                                       std::complex<double> m);

}  // namespace g2kit
