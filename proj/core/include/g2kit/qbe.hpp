#pragma once

// Dissipative squeezing: a cavity damped at rate gamma_qbe through the
// Bogoliubov mode b = cosh r a + e^{i theta} sinh r a^dag and at kappa_ext
// through a driven vacuum port.

#include <complex>
#include <utility>

#include "g2kit/dpa.hpp"
#include "g2kit/gaussian_core.hpp"
#include "g2kit/optimality.hpp"

namespace g2kit::qbe {

class QbeParams {
 public:
  QbeParams() = default;
  /// Phase-locked (theta = 2 phi). kappa_ext must be > 0, so eta < 1.
  QbeParams(double r_qbe, double gamma_qbe, double kappa_ext, double alpha_mag = 0.0,
            double phi = 0.0);
  QbeParams(double r_qbe, double gamma_qbe, double kappa_ext, double alpha_mag, double theta,
            double phi);

  double r_qbe() const noexcept { return r_qbe_; }
  double gamma_qbe() const noexcept { return gamma_qbe_; }
  double kappa_ext() const noexcept { return kappa_ext_; }
  double kappa_qbe() const noexcept { return gamma_qbe_ + kappa_ext_; }
  double eta() const noexcept { return gamma_qbe_ / kappa_qbe(); }
  double alpha_mag() const noexcept { return alpha_mag_; }
  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }
  std::complex<double> alpha() const { return std::polar(alpha_mag_, phi_); }

  QbeParams with_alpha_mag(double alpha_mag) const;
  QbeParams with_alpha(std::complex<double> alpha) const;

 private:
  double r_qbe_ = 0.0;
  double gamma_qbe_ = 0.0;
  double kappa_ext_ = 1.0;
  double alpha_mag_ = 0.0;
  double theta_ = 0.0;
  double phi_ = 0.0;
};

/// Single-pole decay n(tau) = eta sinh^2 r e^{-kappa_qbe tau/2},
/// s(tau) = (eta/2) sinh 2r e^{-kappa_qbe tau/2}.
dpa::Correlators correlators(const QbeParams& p, double tau);

/// Intracavity Gaussian state (tau = 0 moments inverted).
GaussianStateParams steady_state(const QbeParams& p);

/// Closed-form g2(tau). Throws Error(kVacuumState) when alpha = 0 and
/// either r_qbe = 0 or eta = 0.
double g2_tau(const QbeParams& p, double tau);

/// Reservoir squeezing that reproduces the intracavity squeeze parameter of a
/// DPA with the same total damping kappa. Throws Error(kUnstable) for
/// lambda >= 0.499999 kappa and Error(kBadEta) unless 0 < eta < 1.
QbeParams match_dpa(double lambda, double kappa, double eta, double alpha_mag = 0.0);

/// (P_DPA, P_QBE) at matched squeezing.
std::pair<double, double> purity_pair(double lambda, double kappa, double eta);

/// g2_opt = 1 - 2/(e^{4r} + 2e^{2r} - 1) at alpha_opt^2 = eta (e^{4r} - 1)/4.
/// `r_opt` carries r_qbe.
opt::OptimumResult optimal_point(const QbeParams& p);

/// Coherent drive amplitude eps (H_drive = eps a^dag + h.c.) holding the
/// intracavity mean field at alpha: eps = i kappa_qbe alpha / 2.
std::complex<double> drive_for_alpha(const QbeParams& p);

/// Input amplitude on the kappa_ext port for intracavity alpha:
/// alpha_in = -kappa_qbe alpha / (2 sqrt(kappa_ext)).
std::complex<double> input_amplitude(const QbeParams& p);

/// g2(tau) of the field leaving the kappa_ext port, alpha_out = sqrt(kappa_ext) alpha + alpha_in.
double output_g2(const QbeParams& p, std::complex<double> alpha_in, double tau);

}  // namespace g2kit::qbe
