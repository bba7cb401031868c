#include "g2kit/qbe.hpp"

#include <cmath>
#include <string>

#include "g2kit/errors.hpp"
#include "g2kit/numerics.hpp"

namespace g2kit::qbe {

QbeParams::QbeParams(double r_qbe, double gamma_qbe, double kappa_ext, double alpha_mag,
                     double phi)
    : QbeParams(r_qbe, gamma_qbe, kappa_ext, alpha_mag, 2.0 * phi, phi) {}

QbeParams::QbeParams(double r_qbe, double gamma_qbe, double kappa_ext, double alpha_mag,
                     double theta, double phi)
    : r_qbe_(r_qbe),
      gamma_qbe_(gamma_qbe),
      kappa_ext_(kappa_ext),
      alpha_mag_(alpha_mag),
      theta_(wrap_angle(theta)),
      phi_(wrap_angle(phi)) {
  if (!(std::isfinite(r_qbe) && r_qbe >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "r_qbe must be finite and >= 0");
  }
  if (!(std::isfinite(gamma_qbe) && gamma_qbe >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "gamma_qbe must be finite and >= 0");
  }
  if (!(std::isfinite(kappa_ext) && kappa_ext > 0.0)) {
    throw Error(Errc::kBadEta, "kappa_ext must be > 0 (eta < 1)");
  }
  if (!(std::isfinite(alpha_mag) && alpha_mag >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "alpha_mag must be finite and >= 0");
  }
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw Error(Errc::kInvalidArgument, "phases must be finite");
  }
}

QbeParams QbeParams::with_alpha_mag(double alpha_mag) const {
  return {r_qbe_, gamma_qbe_, kappa_ext_, alpha_mag, theta_, phi_};
}

QbeParams QbeParams::with_alpha(std::complex<double> alpha) const {
  const double mag = std::abs(alpha);
  return {r_qbe_, gamma_qbe_, kappa_ext_, mag, theta_, mag > 0.0 ? std::arg(alpha) : phi_};
}

dpa::Correlators correlators(const QbeParams& p, double tau) {
  if (!(tau >= 0.0)) throw Error(Errc::kInvalidArgument, "tau must be >= 0");
  const double decay = std::exp(-0.5 * p.kappa_qbe() * tau);
  const double sh = std::sinh(p.r_qbe());
  return {p.eta() * sh * sh * decay, 0.5 * p.eta() * std::sinh(2.0 * p.r_qbe()) * decay};
}

GaussianStateParams steady_state(const QbeParams& p) {
  const dpa::Correlators c = correlators(p, 0.0);
  // <d d> = -s e^{i theta}
  return state_from_moments(p.alpha(), c.n, -c.s * std::polar(1.0, p.theta()));
}

double g2_tau(const QbeParams& p, double tau) {
  const double rel = wrap_angle(p.theta() - 2.0 * p.phi());
  const double eta = p.eta();
  if (eta == 0.0) {
    const dpa::Correlators c = correlators(p, tau);
    return g2_tau_from_correlators(p.alpha_mag(), c.n, c.s, 0.0, rel);
  }
  if (!(tau >= 0.0)) throw Error(Errc::kInvalidArgument, "tau must be >= 0");
  const double r = p.r_qbe();
  const double sh2 = std::sinh(r) * std::sinh(r);
  const double x = p.alpha_mag() * p.alpha_mag() / eta;
  const double norm = x + sh2;
  if (!(norm > 0.0)) throw Error(Errc::kVacuumState, "g2 undefined for alpha^2 + n = 0");
  const double e1 = std::exp(-0.5 * p.kappa_qbe() * tau);
  const double numerator = x * (std::cos(rel) * std::sinh(2.0 * r) - 2.0 * sh2) * e1 -
                           sh2 * std::cosh(2.0 * r) * e1 * e1;
  return 1.0 - numerator / (norm * norm);
}

QbeParams match_dpa(double lambda, double kappa, double eta, double alpha_mag) {
  const dpa::DpaParams dp(lambda, kappa, 0.0);
  if (!dp.is_stable()) {
    throw Error(Errc::kUnstable, "lambda/kappa = " + std::to_string(lambda / kappa) +
                                     " is not below " + std::to_string(dpa::kStabilityMargin));
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(Errc::kBadEta, "eta = " + std::to_string(eta) + " outside (0, 1)");
  }
  const double root = std::sqrt(4.0 * lambda * lambda * (1.0 - 2.0 * eta) + eta * eta * kappa * kappa);
  const double e2r = (2.0 * lambda * (1.0 - eta) + root) / (eta * (kappa - 2.0 * lambda));
  const double r = std::max(0.0, 0.5 * std::log(e2r));
  return {r, eta * kappa, (1.0 - eta) * kappa, alpha_mag};
}

std::pair<double, double> purity_pair(double lambda, double kappa, double eta) {
  match_dpa(lambda, kappa, eta);
  const double l2 = lambda * lambda;
  const double k2 = kappa * kappa;
  const double p_dpa = std::sqrt(1.0 - 4.0 * l2 / k2);
  const double root = std::sqrt(4.0 * l2 * (1.0 - 2.0 * eta) + eta * eta * k2);
  const double inv_sq =
      1.0 + 2.0 * (1.0 - eta) / (k2 - 4.0 * l2) * (4.0 * l2 - eta * k2 + kappa * root);
  return {p_dpa, 1.0 / std::sqrt(inv_sq)};
}

opt::OptimumResult optimal_point(const QbeParams& p) {
  const double e2 = std::exp(2.0 * p.r_qbe());
  const double e4 = e2 * e2;
  opt::OptimumResult out;
  out.r_opt = p.r_qbe();
  out.alpha_opt = std::sqrt(0.25 * p.eta() * (e4 - 1.0));
  out.g2_min = 1.0 - 2.0 / (e4 + 2.0 * e2 - 1.0);
  out.converged = true;
  return out;
}

std::complex<double> drive_for_alpha(const QbeParams& p) {
  return std::complex<double>(0.0, 0.5 * p.kappa_qbe()) * p.alpha();
}

std::complex<double> input_amplitude(const QbeParams& p) {
  return -p.kappa_qbe() * p.alpha() / (2.0 * std::sqrt(p.kappa_ext()));
}

double output_g2(const QbeParams& p, std::complex<double> alpha_in, double tau) {
  const double sk = std::sqrt(p.kappa_ext());
  const std::complex<double> alpha_out = sk * p.alpha() + alpha_in;
  return g2_tau(p.with_alpha(alpha_out / sk), tau);
}

}  // namespace g2kit::qbe
