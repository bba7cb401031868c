#include "oracles.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>

namespace g2kit::testing {
namespace {

constexpr cplx kI{0.0, 1.0};

Eigen::MatrixXcd lowering(int levels) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

double golden(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 500 && b - a > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

Eigen::MatrixXcd displaced_squeezed_thermal(cplx alpha, double r, double theta, double n_eff,
                                            int cutoff, int padding) {
  const int levels = cutoff + 1 + padding;
  const Eigen::MatrixXcd a = lowering(levels);
  const Eigen::MatrixXcd ad = a.adjoint();
  Eigen::MatrixXcd thermal = Eigen::MatrixXcd::Zero(levels, levels);
  const double q = n_eff / (1.0 + n_eff);
  for (int n = 0; n < levels; ++n) thermal(n, n) = std::pow(q, n) / (1.0 + n_eff);
  const cplx xi = std::polar(r, theta);
  const Eigen::MatrixXcd gen_s = 0.5 * (std::conj(xi) * a * a - xi * ad * ad);
  const Eigen::MatrixXcd gen_d = alpha * ad - std::conj(alpha) * a;
  const Eigen::MatrixXcd s = gen_s.exp();
  const Eigen::MatrixXcd d = gen_d.exp();
  const Eigen::MatrixXcd u = d * s;
  const Eigen::MatrixXcd rho = u * thermal * u.adjoint();
  return rho.topLeftCorner(cutoff + 1, cutoff + 1);
}

int squeezed_thermal_cutoff(double r, double n_eff, double tail) {
  const double v = (n_eff + 0.5) * std::exp(2.0 * r);
  const double x = (v - 0.5) / (v + 0.5);
  if (x <= 0.0) return 40;
  const double k = std::log(tail) / std::log(x);
  return std::max(40, 10 * static_cast<int>(std::ceil(k / 10.0)));
}

double g2_of_rho(const Eigen::MatrixXcd& rho) {
  const int levels = static_cast<int>(rho.rows());
  const Eigen::MatrixXcd a = lowering(levels);
  const Eigen::MatrixXcd ad = a.adjoint();
  const double num = (rho * ad * ad * a * a).trace().real();
  const double den = (rho * ad * a).trace().real();
  return num / (den * den);
}

std::pair<double, cplx> central_moments_of_rho(const Eigen::MatrixXcd& rho) {
  const int levels = static_cast<int>(rho.rows());
  const Eigen::MatrixXcd a = lowering(levels);
  const cplx mean = (rho * a).trace();
  const double n = (rho * a.adjoint() * a).trace().real() - std::norm(mean);
  const cplx m = (rho * a * a).trace() - mean * mean;
  return {n, m};
}

std::pair<double, cplx> dpa_correlators_green(double lambda, double kappa, double theta, double tau) {
  Eigen::Matrix2cd drift;
  drift << -0.5 * kappa, -lambda * std::exp(kI * theta), -lambda * std::exp(-kI * theta),
      -0.5 * kappa;
  auto green = [&](double t) -> Eigen::Matrix2cd { return (drift * t).exp(); };
  boost::math::quadrature::exp_sinh<double> integrator;
  auto integrate = [&](auto&& f) {
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
  };
  const double n = kappa * integrate([&](double u) {
    return (std::conj(green(tau + u)(0, 1)) * green(u)(0, 1)).real();
  });
  const double m_re = kappa * integrate([&](double u) {
    return (green(tau + u)(0, 0) * green(u)(0, 1)).real();
  });
  const double m_im = kappa * integrate([&](double u) {
    return (green(tau + u)(0, 0) * green(u)(0, 1)).imag();
  });
  return {n, {m_re, m_im}};
}

Eigen::Matrix4cd two_cavity_drift(const upb::TwoCavityParams& p, cplx alpha1, cplx alpha2) {
  // H = sum_k [-Delta_k a_k^dag a_k + U_k a_k^dag^2 a_k^2] + J (a1^dag a2 + a2^dag a1)
  //     + F (a1 + a1^dag); linearized around (alpha1, alpha2).
  const std::array<cplx, 2> al{alpha1, alpha2};
  Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 2; ++k) {
    const int l = 1 - k;
    a(k, k) = kI * p.delta[k] - 0.5 * p.kappa[k] - 4.0 * kI * p.u[k] * std::norm(al[k]);
    a(k, k + 2) = -2.0 * kI * p.u[k] * al[k] * al[k];
    a(k, l) = -kI * p.j;
    a(k + 2, k + 2) = std::conj(a(k, k));
    a(k + 2, k) = std::conj(a(k, k + 2));
    a(k + 2, l + 2) = std::conj(a(k, l));
  }
  return a;
}

LyapunovMoments two_cavity_lyapunov(const upb::TwoCavityParams& p, cplx alpha1, cplx alpha2) {
  const Eigen::Matrix4cd a = two_cavity_drift(p, alpha1, alpha2);
  // Unordered moments C = <x x^T> obey A C + C A^T + D = 0 with vacuum
  // diffusion D(k, k+2) = kappa_k. Writing C = N + K, K(k, k+2) = 1 (the
  // commutators), N holds the normal-ordered moments and obeys
  // A N + N A^T = -(A K + K A^T + D), whose source is O(U) rather than O(1).
  Eigen::Matrix4cd k = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd d = Eigen::Matrix4cd::Zero();
  for (int c = 0; c < 2; ++c) {
    k(c, c + 2) = 1.0;
    d(c, c + 2) = p.kappa[c];
  }
  const Eigen::Matrix4cd source = a * k + k * a.transpose() + d;
  const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
  const Eigen::MatrixXcd op = Eigen::kroneckerProduct(id, a) + Eigen::kroneckerProduct(a, id);
  const Eigen::VectorXcd rhs = -Eigen::Map<const Eigen::VectorXcd>(source.data(), 16);
  const Eigen::VectorXcd vec = op.fullPivLu().solve(rhs);
  const Eigen::Map<const Eigen::Matrix4cd> n(vec.data());
  LyapunovMoments out;
  for (int c = 0; c < 2; ++c) {
    out.n[c] = n(c + 2, c).real();
    out.m[c] = n(c, c);
  }
  return out;
}

std::pair<double, double> minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                                      int grid, double tol) {
  double best_x = lo;
  double best_f = f(lo);
  const double h = (hi - lo) / grid;
  for (int i = 1; i <= grid; ++i) {
    const double x = lo + i * h;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  const double x = golden(f, std::max(lo, best_x - h), std::min(hi, best_x + h), tol);
  const double fx = f(x);
  return fx < best_f ? std::pair{x, fx} : std::pair{best_x, best_f};
}

std::array<double, 3> minimize_2d(const std::function<double(double, double)>& f, double r_hi,
                                  double alpha_lo, double alpha_hi, double tol) {
  auto inner = [&](double alpha) {
    return minimize_1d([&](double r) { return f(r, alpha); }, 0.0, r_hi, 200, tol);
  };
  const auto [alpha, value] =
      minimize_1d([&](double al) { return inner(al).second; }, alpha_lo, alpha_hi, 200, tol);
  const auto [r, fr] = inner(alpha);
  return {r, alpha, fr};
}

}  // namespace g2kit::testing
