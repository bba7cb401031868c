#include "g2kit/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "g2kit/errors.hpp"
#include "g2kit/numerics.hpp"

namespace g2kit {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::kInvalidArgument, what);
}

}  // namespace

GaussianStateParams::GaussianStateParams(double alpha_mag, double alpha_phase,
                                         double squeeze_mag, double squeeze_phase,
                                         double n_eff)
    : alpha_mag_(alpha_mag),
      alpha_phase_(wrap_angle(alpha_phase)),
      squeeze_mag_(squeeze_mag),
      squeeze_phase_(wrap_angle(squeeze_phase)),
      n_eff_(n_eff) {
  require(std::isfinite(alpha_mag) && alpha_mag >= 0.0, "alpha_mag must be finite and >= 0");
  require(std::isfinite(squeeze_mag) && squeeze_mag >= 0.0,
          "squeeze_mag must be finite and >= 0");
  require(std::isfinite(n_eff) && n_eff >= 0.0, "n_eff must be finite and >= 0");
  require(std::isfinite(alpha_phase) && std::isfinite(squeeze_phase), "phases must be finite");
}

GaussianStateParams GaussianStateParams::amplitude_squeezed(double alpha_mag, double squeeze_mag,
                                                            double n_eff, double alpha_phase) {
  return {alpha_mag, alpha_phase, squeeze_mag, 2.0 * alpha_phase, n_eff};
}

double GaussianStateParams::relative_angle() const {
  return wrap_angle(squeeze_phase_ - 2.0 * alpha_phase_);
}

MomentPair::MomentPair(double n, double s, double rel_angle)
    : n_(n), s_(s), rel_angle_(wrap_angle(rel_angle)) {
  require(std::isfinite(n) && n >= 0.0, "moment n must be finite and >= 0");
  require(std::isfinite(s) && s >= 0.0, "moment s must be finite and >= 0");
  const double bound = n * (n + 1.0);
  if (s * s > bound + kHeisenbergTolerance * std::max(1.0, bound)) {
    throw Error(Errc::kUnphysicalMoments,
                "s^2 = " + std::to_string(s * s) + " exceeds n(n+1) = " + std::to_string(bound));
  }
}

CorrelationSeries::CorrelationSeries(std::vector<double> taus_in, std::vector<double> values_in)
    : taus(std::move(taus_in)), values(std::move(values_in)) {
  require(taus.size() == values.size(), "taus and values differ in length");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    require(std::isfinite(taus[i]) && taus[i] >= 0.0, "taus must be finite and >= 0");
    require(i == 0 || taus[i] > taus[i - 1], "taus must be strictly increasing");
    require(std::isfinite(values[i]) && values[i] >= 0.0, "g2 values must be finite and >= 0");
  }
}

MomentPair moments_from_state(const GaussianStateParams& p) {
  const double r = p.squeeze_mag();
  const double sh = std::sinh(r);
  // (n_eff + 1/2) cosh 2r - 1/2 without the cancellation at small r.
  const double n = p.n_eff() * std::cosh(2.0 * r) + sh * sh;
  const double s = (p.n_eff() + 0.5) * std::sinh(2.0 * r);
  return {n, s, p.relative_angle()};
}

double purity(const GaussianStateParams& p) { return 1.0 / (1.0 + 2.0 * p.n_eff()); }

double n_total(const GaussianStateParams& p) {
  return p.alpha_mag() * p.alpha_mag() + moments_from_state(p).n();
}

double g2_tau_from_correlators(double alpha_mag, double n_tau, double s_tau, double n_zero,
                               double rel_angle) {
  const double a2 = alpha_mag * alpha_mag;
  const double norm = a2 + n_zero;
  if (!(norm > 0.0)) {
    throw Error(Errc::kVacuumState, "g2 undefined for alpha^2 + n = 0");
  }
  const double numerator =
      2.0 * a2 * (n_tau - std::cos(rel_angle) * s_tau) + n_tau * n_tau + s_tau * s_tau;
  return 1.0 + numerator / (norm * norm);
}

double g2_zero(const GaussianStateParams& p) {
  const MomentPair m = moments_from_state(p);
  return g2_tau_from_correlators(p.alpha_mag(), m.n(), m.s(), m.n(), m.rel_angle());
}

GaussianStateParams state_from_moments(std::complex<double> alpha, double n,
                                       std::complex<double> m) {
  const double s = std::abs(m);
  if (!std::isfinite(n) || !std::isfinite(s) || n < 0.0 || s > n + 0.5) {
    throw Error(Errc::kUnphysicalMoments, "|<dd>| exceeds <d^dag d> + 1/2");
  }
  const double root = std::sqrt((n + 0.5) * (n + 0.5) - s * s);
  double n_eff = (n * n + n - s * s) / (root + 0.5);
  if (n_eff < 0.0) {
    if (n_eff < -1e-14) {
      throw Error(Errc::kUnphysicalMoments,
                  "moments violate s^2 <= n(n+1) (n_eff = " + std::to_string(n_eff) + ")");
    }
    n_eff = 0.0;
  }
  const double r = 0.5 * std::atanh(2.0 * s / (2.0 * n + 1.0));
  const double theta = s > 0.0 ? std::arg(m) + std::numbers::pi : 0.0;
  const double phi = std::abs(alpha) > 0.0 ? std::arg(alpha) : 0.0;
  return {std::abs(alpha), phi, r, theta, n_eff};
}

}  // namespace g2kit
