#include "g2kit/two_cavity.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "g2kit/errors.hpp"

namespace g2kit::upb {
namespace {

constexpr cplx kI{0.0, 1.0};

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

Vec4 pack(cplx a1, cplx a2) { return {a1.real(), a1.imag(), a2.real(), a2.imag()}; }
cplx first(const Vec4& x) { return {x[0], x[1]}; }
cplx second(const Vec4& x) { return {x[2], x[3]}; }

// Mean-field problem with Kerr strengths scaled by s in [0, 1].
struct Homotopy {
  const TwoCavityParams& p;

  Vec4 residual(const Vec4& x, double s) const {
    TwoCavityParams q = p;
    q.u = {s * p.u[0], s * p.u[1]};
    const auto r = classical_rhs(q, first(x), second(x));
    return pack(r[0], r[1]);
  }

  Mat4 jacobian(const Vec4& x, double s) const {
    const std::array<cplx, 2> a{first(x), second(x)};
    Mat4 jac;
    for (int k = 0; k < 2; ++k) {
      const int l = 1 - k;
      const double uk = s * p.u[k];
      // Wirtinger derivatives of rhs_k.
      const cplx d_self = kI * p.delta[k] - 0.5 * p.kappa[k] - 4.0 * kI * uk * std::norm(a[k]);
      const cplx d_self_conj = -2.0 * kI * uk * a[k] * a[k];
      const cplx d_other = -kI * p.j;
      const cplx dx_self = d_self + d_self_conj;
      const cplx dy_self = kI * (d_self - d_self_conj);
      const cplx dx_other = d_other;
      const cplx dy_other = kI * d_other;
      jac(2 * k, 2 * k) = dx_self.real();
      jac(2 * k + 1, 2 * k) = dx_self.imag();
      jac(2 * k, 2 * k + 1) = dy_self.real();
      jac(2 * k + 1, 2 * k + 1) = dy_self.imag();
      jac(2 * k, 2 * l) = dx_other.real();
      jac(2 * k + 1, 2 * l) = dx_other.imag();
      jac(2 * k, 2 * l + 1) = dy_other.real();
      jac(2 * k + 1, 2 * l + 1) = dy_other.imag();
    }
    return jac;
  }

  Vec4 d_ds(const Vec4& x) const {
    const cplx a1 = first(x);
    const cplx a2 = second(x);
    return pack(-2.0 * kI * p.u[0] * std::norm(a1) * a1, -2.0 * kI * p.u[1] * std::norm(a2) * a2);
  }

  // Newton iteration at fixed s; false if it stalls.
  bool newton(Vec4& x, double s, int max_iter = 50) const {
    for (int it = 0; it < max_iter; ++it) {
      const Vec4 r = residual(x, s);
      const Eigen::FullPivLU<Mat4> lu(jacobian(x, s));
      if (!lu.isInvertible()) return false;
      const Vec4 dx = lu.solve(-r);
      x += dx;
      if (!x.allFinite()) return false;
      if (dx.norm() <= 1e-15 * std::max(x.norm(), 1e-300)) return true;
    }
    return residual(x, s).norm() <= 1e-13 * std::max(1.0, x.norm());
  }
};

double scaled_residual(const TwoCavityParams& p, cplx a1, cplx a2) {
  if (p.f == 0.0) return 0.0;
  const auto r = classical_rhs(p, a1, a2);
  return std::max(std::abs(r[0]), std::abs(r[1])) /
         (std::max(p.kappa[0], p.kappa[1]) * p.f);
}

}  // namespace

void TwoCavityParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  bool ok = finite(j) && finite(f) && j >= 0.0 && f >= 0.0;
  for (int k = 0; k < 2; ++k) {
    ok = ok && finite(delta[k]) && finite(u[k]) && finite(kappa[k]) && u[k] >= 0.0 &&
         kappa[k] > 0.0;
  }
  if (!ok) {
    throw Error(Errc::kInvalidArgument,
                "two-cavity parameters need finite values, kappa > 0 and U, J, F >= 0");
  }
}

TwoCavityParams TwoCavityParams::symmetric(double delta, double u, double j, double f,
                                           double kappa) {
  TwoCavityParams p;
  p.delta = {delta, delta};
  p.u = {u, u};
  p.kappa = {kappa, kappa};
  p.j = j;
  p.f = f;
  p.validate();
  return p;
}

TwoCavityParams TwoCavityParams::weak_drive_reference(double u) {
  return symmetric(-0.275, u, 3.0, 0.01);
}

std::array<cplx, 2> classical_rhs(const TwoCavityParams& p, cplx alpha1, cplx alpha2) {
  const std::array<cplx, 2> a{alpha1, alpha2};
  std::array<cplx, 2> r;
  for (int k = 0; k < 2; ++k) {
    r[k] = (kI * p.delta[k] - 0.5 * p.kappa[k]) * a[k] -
           2.0 * kI * p.u[k] * std::norm(a[k]) * a[k] - kI * p.j * a[1 - k] -
           (k == 0 ? kI * p.f : cplx{});
  }
  return r;
}

ClassicalFixedPoint linear_fixed_point(const TwoCavityParams& p) {
  p.validate();
  const cplx c1(p.delta[0], 0.5 * p.kappa[0]);
  const cplx c2(p.delta[1], 0.5 * p.kappa[1]);
  const cplx den = c1 * c2 - p.j * p.j;
  ClassicalFixedPoint fp;
  fp.alpha1 = p.f * c2 / den;
  fp.alpha2 = p.j * p.f / den;
  fp.branch_id = "linear";
  TwoCavityParams lin = p;
  lin.u = {0.0, 0.0};
  fp.residual = scaled_residual(lin, fp.alpha1, fp.alpha2);
  return fp;
}

ClassicalFixedPoint classical_fixed_point(const TwoCavityParams& p) {
  ClassicalFixedPoint fp = linear_fixed_point(p);
  if (p.u[0] == 0.0 && p.u[1] == 0.0) return fp;

  const Homotopy h{p};
  Vec4 x = pack(fp.alpha1, fp.alpha2);
  double s = 0.0;
  double ds = 0.1;
  constexpr double kMinStep = 1e-9;
  constexpr double kMaxStep = 0.25;
  // dalpha/ds diverges at a fold, so a bounded predictor stalls there instead
  // of letting Newton land on another branch.
  constexpr double kMaxRelPredictor = 0.1;
  int steps = 0;
  while (s < 1.0) {
    ds = std::min(ds, 1.0 - s);
    const Eigen::FullPivLU<Mat4> lu(h.jacobian(x, s));
    bool accepted = false;
    if (lu.isInvertible()) {
      const Vec4 step = ds * lu.solve(-h.d_ds(x));
      const Vec4 predicted = x + step;
      Vec4 corrected = predicted;
      const bool bounded =
          step.norm() <= kMaxRelPredictor * std::max(x.norm(), std::numeric_limits<double>::min());
      if (bounded && h.newton(corrected, s + ds)) {
        const double correction = (corrected - predicted).norm();
        const double floor = 1e-10 * std::max(corrected.norm(), 1e-300);
        if (correction <= 10.0 * step.norm() + floor) {
          x = corrected;
          s += ds;
          ds = std::min(1.5 * ds, kMaxStep);
          ++steps;
          accepted = true;
        }
      }
    }
    if (!accepted) {
      ds *= 0.5;
      if (ds < kMinStep) {
        throw Error(Errc::kBranchJump, "continuation in U stalled at U/U_target = " +
                                           std::to_string(s) + " (fold of the weak-drive branch)");
      }
    }
  }
  h.newton(x, 1.0);
  fp.alpha1 = first(x);
  fp.alpha2 = second(x);
  fp.steps = steps;
  fp.branch_id = "U=0->target/" + std::to_string(steps);
  fp.residual = scaled_residual(p, fp.alpha1, fp.alpha2);
  if (!(fp.residual < 1e-12)) {
    throw Error(Errc::kNoConvergence,
                "fixed-point residual " + std::to_string(fp.residual) + " exceeds 1e-12 kappa F");
  }
  return fp;
}

Eigen::Matrix4cd susceptibility_inverse(const TwoCavityParams& p, const ClassicalFixedPoint& fp,
                                        double omega) {
  const std::array<cplx, 2> a{fp.alpha1, fp.alpha2};
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 2; ++k) {
    const double shifted = p.delta[k] - 4.0 * p.u[k] * std::norm(a[k]);
    const double half = 0.5 * p.kappa[k];
    m(k, k) = half - kI * (shifted + omega);
    m(k + 2, k + 2) = half - kI * (-shifted + omega);
    m(k, k + 2) = 2.0 * kI * p.u[k] * a[k] * a[k];
    m(k + 2, k) = -2.0 * kI * p.u[k] * std::conj(a[k] * a[k]);
  }
  m(0, 1) = m(1, 0) = kI * p.j;
  m(2, 3) = m(3, 2) = -kI * p.j;
  return m;
}

SusceptibilityMatrix susceptibility(const TwoCavityParams& p, const ClassicalFixedPoint& fp,
                                    double omega) {
  SusceptibilityMatrix out;
  out.omega = omega;
  out.matrix = susceptibility_inverse(p, fp, omega);
  const Eigen::JacobiSVD<Eigen::Matrix4cd> svd(out.matrix);
  const auto& sv = svd.singularValues();
  out.condition = sv[3] > 0.0 ? sv[0] / sv[3] : std::numeric_limits<double>::infinity();
  if (!(out.condition <= 1e12)) {
    throw Error(Errc::kSingular, "cond(M[omega]) = " + std::to_string(out.condition));
  }
  out.chi = out.matrix.partialPivLu().inverse();
  return out;
}

Eigen::Vector4cd stability_spectrum(const TwoCavityParams& p, const ClassicalFixedPoint& fp) {
  const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(susceptibility_inverse(p, fp, 0.0), false);
  return es.eigenvalues();
}

bool is_stable(const TwoCavityParams& p, const ClassicalFixedPoint& fp) {
  const Eigen::Vector4cd ev = stability_spectrum(p, fp);
  for (int i = 0; i < 4; ++i) {
    if (!(ev[i].real() > 0.0)) return false;
  }
  return true;
}

FluctuationMoments fluctuation_moments_all(const TwoCavityParams& p, const ClassicalFixedPoint& fp,
                                           const MomentOptions& opt) {
  p.validate();
  if (!is_stable(p, fp)) {
    throw Error(Errc::kUnstableLinearization, "drift matrix has an eigenvalue with Re >= 0");
  }
  // Components: n1, n2, Re m1, Im m1, Re m2, Im m2 (already divided by 2 pi).
  const quad::Integrand integrand = [&](double w) {
    const Eigen::Matrix4cd chi = susceptibility_inverse(p, fp, w).partialPivLu().inverse();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
    for (int j = 0; j < 2; ++j) {
      const double weight = p.kappa[j] / (2.0 * std::numbers::pi);
      for (int k = 0; k < 2; ++k) {
        v[k] += weight * std::norm(chi(k, j + 2));
        const cplx m = weight * std::conj(chi(k + 2, j + 2)) * chi(k, j + 2);
        v[2 + 2 * k] += m.real();
        v[3 + 2 * k] += m.imag();
      }
    }
    return v;
  };

  quad::Options qopt;
  qopt.rel_tol = opt.rel_tol;
  qopt.max_panels = opt.max_panels;
  qopt.groups = {0, 1, 2, 2, 3, 3};

  const double scale = std::max({p.kappa[0], p.kappa[1], p.j, std::abs(p.delta[0]),
                                 std::abs(p.delta[1])});
  double omega = opt.omega_start_factor * scale;
  // Break points near the normal-mode resonances sharpen the first pass.
  std::vector<double> breaks;
  for (double d : {p.delta[0], p.delta[1]}) {
    for (double sgn : {-1.0, 1.0}) {
      breaks.push_back(sgn * (std::abs(d) + p.j));
      breaks.push_back(sgn * std::abs(std::abs(d) - p.j));
    }
  }
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  quad::Result core = quad::integrate(integrand, -omega, omega, qopt, 8, breaks);
  if (!core.converged) {
    throw Error(Errc::kQuadratureNotConverged, "core interval did not reach rel_tol");
  }
  Eigen::VectorXd total = core.value;
  int panels = core.panels;

  auto magnitude = [&](const Eigen::VectorXd& v) {
    return Eigen::Vector4d(std::abs(v[0]), std::abs(v[1]), std::hypot(v[2], v[3]),
                           std::hypot(v[4], v[5]));
  };
  bool tail_ok = false;
  for (int d = 0; d < opt.max_doublings; ++d) {
    const quad::Result lo = quad::integrate(integrand, -2.0 * omega, -omega, qopt, 4);
    const quad::Result hi = quad::integrate(integrand, omega, 2.0 * omega, qopt, 4);
    if (!lo.converged || !hi.converged) {
      throw Error(Errc::kQuadratureNotConverged, "tail interval did not reach rel_tol");
    }
    const Eigen::VectorXd tail = lo.value + hi.value;
    total += tail;
    panels += lo.panels + hi.panels;
    omega *= 2.0;
    const Eigen::Vector4d t = magnitude(tail);
    const Eigen::Vector4d m = magnitude(total);
    tail_ok = true;
    for (int i = 0; i < 4; ++i) {
      if (t[i] > opt.tail_tol * m[i]) tail_ok = false;
    }
    if (tail_ok) break;
  }
  if (!tail_ok) {
    throw Error(Errc::kQuadratureNotConverged,
                "frequency tail above tolerance at Omega = " + std::to_string(omega));
  }

  FluctuationMoments out;
  out.n = {total[0], total[1]};
  out.m = {cplx(total[2], total[3]), cplx(total[4], total[5])};
  out.omega_max = omega;
  out.panels = panels;
  return out;
}

MomentPair fluctuation_moments(const TwoCavityParams& p, const ClassicalFixedPoint& fp, int k,
                               const MomentOptions& opt) {
  if (k != 0 && k != 1) throw Error(Errc::kInvalidArgument, "cavity index must be 0 or 1");
  const FluctuationMoments all = fluctuation_moments_all(p, fp, opt);
  const cplx alpha = k == 0 ? fp.alpha1 : fp.alpha2;
  const cplx m = all.m[k];
  const double theta = std::abs(m) > 0.0 ? std::arg(m) + std::numbers::pi : 0.0;
  const double phi = std::abs(alpha) > 0.0 ? std::arg(alpha) : 0.0;
  return {std::max(all.n[k], 0.0), std::abs(m), theta - 2.0 * phi};
}

Cavity1Result g2_cavity1(const TwoCavityParams& p, const MomentOptions& opt) {
  Cavity1Result out;
  out.fixed_point = classical_fixed_point(p);
  out.moments = fluctuation_moments_all(p, out.fixed_point, opt);
  out.state = state_from_moments(out.fixed_point.alpha1, std::max(out.moments.n[0], 0.0),
                                 out.moments.m[0]);
  out.g2 = g2_zero(out.state);
  return out;
}

SqueezingDecomposition squeezing_decomposition(const TwoCavityParams& p,
                                               const ClassicalFixedPoint& fp, double omega) {
  const double d2 = p.delta[1] - 4.0 * p.u[1] * std::norm(fp.alpha2);
  const double half2 = 0.5 * p.kappa[1];
  const cplx a2sq = fp.alpha2 * fp.alpha2;
  const double kerr4 = 4.0 * p.u[1] * p.u[1] * std::norm(a2sq);
  const cplx lower(omega - d2, half2);
  const cplx upper(omega + d2, half2);

  SqueezingDecomposition out;
  out.omega = omega;
  out.lambda_direct = 2.0 * p.u[0] * fp.alpha1 * fp.alpha1;
  out.g2r_denominator = 1.0 / (upper + kerr4 / lower);
  out.lambda_induced = -2.0 * p.j * p.j * p.u[1] * a2sq * out.g2r_denominator / lower;
  out.lambda_total =
      out.lambda_direct - 2.0 * p.j * p.j * p.u[1] * a2sq / (lower * upper + kerr4);
  out.lambda_induced_small_u =
      2.0 * p.u[1] * a2sq * p.j * p.j / (p.delta[1] * p.delta[1] + half2 * half2);
  return out;
}

}  // namespace g2kit::upb
