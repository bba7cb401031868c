#pragma once

// Driven degenerate parametric amplifier: closed-form steady state and
// two-time intensity correlations. Rates are in units of kappa.

#include <complex>
#include <string_view>

#include "g2kit/gaussian_core.hpp"

namespace g2kit::dpa {

/// lambda >= 0.499999 kappa is treated as unstable.
inline constexpr double kStabilityMargin = 0.499999;

class DpaParams {
 public:
  DpaParams() = default;
  /// Phase-locked state: theta = 2 phi.
  DpaParams(double lambda, double kappa, double alpha_mag, double phi = 0.0);
  DpaParams(double lambda, double kappa, double alpha_mag, double theta, double phi);

  double lambda() const noexcept { return lambda_; }
  double kappa() const noexcept { return kappa_; }
  double alpha_mag() const noexcept { return alpha_mag_; }
  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }
  std::complex<double> alpha() const { return std::polar(alpha_mag_, phi_); }

  DpaParams with_alpha(std::complex<double> alpha) const;
  DpaParams with_alpha_mag(double alpha_mag) const;
  bool is_stable() const noexcept { return lambda_ < kStabilityMargin * kappa_; }

 private:
  double lambda_ = 0.0;
  double kappa_ = 1.0;
  double alpha_mag_ = 0.0;
  double theta_ = 0.0;
  double phi_ = 0.0;
};

struct Correlators {
  double n = 0.0;  ///< <d^dag(tau) d(0)>
  double s = 0.0;  ///< |<d(tau) d(0)>|
};

enum class AntibunchingKind { kAntibunched, kNonmonotonicNonclassical, kMonotonicDecay };

std::string_view to_string(AntibunchingKind k) noexcept;

struct AntibunchingClass {
  AntibunchingKind kind = AntibunchingKind::kMonotonicDecay;
  double alpha_plus = 0.0;
  /// Smallest displacement with g2(0) < 1; +inf when lambda = 0.
  double alpha_min = 0.0;
};

/// Thermal-squeezed parametrization: tanh 2r = 2 lambda / kappa,
/// n_eff = sinh^2 r. All operations below throw Error(kUnstable) when
/// !p.is_stable().
GaussianStateParams steady_state(const DpaParams& p);

/// sqrt(kappa lambda) / (kappa - 2 lambda).
double optimal_alpha(const DpaParams& p);

/// alpha_+ = sqrt(kappa lambda / (kappa^2 - 4 lambda^2)); equals sqrt(s(0)).
double alpha_plus(const DpaParams& p);

Correlators correlators(const DpaParams& p, double tau);

double g2_tau(const DpaParams& p, double tau);

/// dg2/dtau at tau = 0: lambda (alpha^2 cos(theta - 2 phi) - s(0)) / (alpha^2 + n(0))^2.
double initial_slope(const DpaParams& p);

/// Smallest alpha with g2(0) < 1, by bisection to 1e-8.
double alpha_min(const DpaParams& p);

AntibunchingClass classify(const DpaParams& p);

/// Correlators of the output field a_out = a_in + sqrt(kappa) a: the
/// fluctuations pass through scaled by kappa.
Correlators output_correlators(const DpaParams& p, double tau);

/// g2(tau) of the output field for a coherent input amplitude alpha_in
/// (photon flux units). The effective displacement is alpha + alpha_in/sqrt(kappa).
double output_g2(const DpaParams& p, std::complex<double> alpha_in, double tau);

/// Linear mean-field relation for H_drive = eps a^dag + eps^* a:
/// (kappa/2) alpha + lambda e^{i theta} alpha^* = -i eps.
std::complex<double> drive_for_alpha(double lambda, double kappa, double theta,
                                     std::complex<double> alpha);
std::complex<double> alpha_for_drive(double lambda, double kappa, double theta,
                                     std::complex<double> eps);

}  // namespace g2kit::dpa
