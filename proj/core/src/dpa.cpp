#include "g2kit/dpa.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "g2kit/errors.hpp"
#include "g2kit/numerics.hpp"

namespace g2kit::dpa {
namespace {

void require_stable(const DpaParams& p) {
  if (!p.is_stable()) {
    throw Error(Errc::kUnstable, "lambda/kappa = " + std::to_string(p.lambda() / p.kappa()) +
                                     " is not below " + std::to_string(kStabilityMargin));
  }
}

// Numerator of g2(0) - 1 as a function of alpha^2.
double excess_numerator(double a2, double n, double s, double cos_rel) {
  return 2.0 * a2 * (n - s * cos_rel) + s * s + n * n;
}

}  // namespace

DpaParams::DpaParams(double lambda, double kappa, double alpha_mag, double phi)
    : DpaParams(lambda, kappa, alpha_mag, 2.0 * phi, phi) {}

DpaParams::DpaParams(double lambda, double kappa, double alpha_mag, double theta, double phi)
    : lambda_(lambda),
      kappa_(kappa),
      alpha_mag_(alpha_mag),
      theta_(wrap_angle(theta)),
      phi_(wrap_angle(phi)) {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "lambda must be finite and >= 0");
  }
  if (!(std::isfinite(kappa) && kappa > 0.0)) {
    throw Error(Errc::kInvalidArgument, "kappa must be finite and > 0");
  }
  if (!(std::isfinite(alpha_mag) && alpha_mag >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "alpha_mag must be finite and >= 0");
  }
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw Error(Errc::kInvalidArgument, "phases must be finite");
  }
}

DpaParams DpaParams::with_alpha(std::complex<double> alpha) const {
  const double mag = std::abs(alpha);
  return {lambda_, kappa_, mag, theta_, mag > 0.0 ? std::arg(alpha) : phi_};
}

DpaParams DpaParams::with_alpha_mag(double alpha_mag) const {
  return {lambda_, kappa_, alpha_mag, theta_, phi_};
}

std::string_view to_string(AntibunchingKind k) noexcept {
  switch (k) {
    case AntibunchingKind::kAntibunched: return "ANTIBUNCHED";
    case AntibunchingKind::kNonmonotonicNonclassical: return "NONMONOTONIC_NONCLASSICAL";
    case AntibunchingKind::kMonotonicDecay: return "MONOTONIC_DECAY";
  }
  return "UNKNOWN";
}

GaussianStateParams steady_state(const DpaParams& p) {
  require_stable(p);
  const double r = 0.5 * std::atanh(2.0 * p.lambda() / p.kappa());
  const double sh = std::sinh(r);
  return {p.alpha_mag(), p.phi(), r, p.theta(), sh * sh};
}

double optimal_alpha(const DpaParams& p) {
  require_stable(p);
  return std::sqrt(p.kappa() * p.lambda()) / (p.kappa() - 2.0 * p.lambda());
}

double alpha_plus(const DpaParams& p) {
  require_stable(p);
  return std::sqrt(correlators(p, 0.0).s);
}

Correlators correlators(const DpaParams& p, double tau) {
  require_stable(p);
  if (!(tau >= 0.0)) throw Error(Errc::kInvalidArgument, "tau must be >= 0");
  const double k = p.kappa();
  const double l = p.lambda();
  const double pref = l / ((k - 2.0 * l) * (k + 2.0 * l));
  // e^{-k tau/2} cosh(l tau) and e^{-k tau/2} sinh(l tau) without overflow.
  const double slow = std::exp((l - 0.5 * k) * tau);
  const double fast = std::exp(-(l + 0.5 * k) * tau);
  const double ch = 0.5 * (slow + fast);
  const double sh = 0.5 * (slow - fast);
  return {pref * (2.0 * l * ch + k * sh), pref * (2.0 * l * sh + k * ch)};
}

double g2_tau(const DpaParams& p, double tau) {
  const Correlators c0 = correlators(p, 0.0);
  const Correlators ct = tau == 0.0 ? c0 : correlators(p, tau);
  return g2_tau_from_correlators(p.alpha_mag(), ct.n, ct.s, c0.n,
                                 wrap_angle(p.theta() - 2.0 * p.phi()));
}

double initial_slope(const DpaParams& p) {
  const Correlators c0 = correlators(p, 0.0);
  const double a2 = p.alpha_mag() * p.alpha_mag();
  const double norm = a2 + c0.n;
  if (!(norm > 0.0)) throw Error(Errc::kVacuumState, "g2 undefined for alpha^2 + n = 0");
  const double cos_rel = std::cos(p.theta() - 2.0 * p.phi());
  return p.lambda() * (a2 * cos_rel - c0.s) / (norm * norm);
}

double alpha_min(const DpaParams& p) {
  const Correlators c0 = correlators(p, 0.0);
  const double cos_rel = std::cos(p.theta() - 2.0 * p.phi());
  if (!(c0.s * cos_rel > c0.n)) return std::numeric_limits<double>::infinity();
  auto f = [&](double a) { return excess_numerator(a * a, c0.n, c0.s, cos_rel); };
  double hi = std::max(1.0, std::sqrt(c0.s));
  while (f(hi) >= 0.0) hi *= 2.0;
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-8; };
  const auto bracket = boost::math::tools::bisect(f, 0.0, hi, tol);
  return 0.5 * (bracket.first + bracket.second);
}

AntibunchingClass classify(const DpaParams& p) {
  AntibunchingClass out;
  out.alpha_plus = alpha_plus(p);
  out.alpha_min = alpha_min(p);
  const double a = p.alpha_mag();
  if (a > out.alpha_plus && a > 0.0 && g2_tau(p, 0.0) < 1.0) {
    out.kind = AntibunchingKind::kAntibunched;
  } else if (a > out.alpha_min && a < out.alpha_plus) {
    out.kind = AntibunchingKind::kNonmonotonicNonclassical;
  } else {
    out.kind = AntibunchingKind::kMonotonicDecay;
  }
  return out;
}

Correlators output_correlators(const DpaParams& p, double tau) {
  const Correlators c = correlators(p, tau);
  return {p.kappa() * c.n, p.kappa() * c.s};
}

double output_g2(const DpaParams& p, std::complex<double> alpha_in, double tau) {
  const double sk = std::sqrt(p.kappa());
  const DpaParams eff = p.with_alpha(p.alpha() + alpha_in / sk);
  const Correlators o0 = output_correlators(eff, 0.0);
  const Correlators ot = tau == 0.0 ? o0 : output_correlators(eff, tau);
  return g2_tau_from_correlators(sk * eff.alpha_mag(), ot.n, ot.s, o0.n,
                                 wrap_angle(eff.theta() - 2.0 * eff.phi()));
}

std::complex<double> drive_for_alpha(double lambda, double kappa, double theta,
                                     std::complex<double> alpha) {
  const std::complex<double> i(0.0, 1.0);
  return i * (0.5 * kappa * alpha + lambda * std::polar(1.0, theta) * std::conj(alpha));
}

std::complex<double> alpha_for_drive(double lambda, double kappa, double theta,
                                     std::complex<double> eps) {
  const std::complex<double> i(0.0, 1.0);
  const double det = 0.25 * kappa * kappa - lambda * lambda;
  if (!(det > 0.0)) throw Error(Errc::kUnstable, "lambda >= kappa/2 has no stationary mean field");
  return -i * (0.5 * kappa * eps + lambda * std::polar(1.0, theta) * std::conj(eps)) / det;
}

}  // namespace g2kit::dpa
