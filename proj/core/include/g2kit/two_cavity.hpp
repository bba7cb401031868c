#pragma once

// Linearized Gaussian theory of two coupled, driven Kerr cavities.
// Fluctuation vector ordering: (d1, d2, d1^dag, d2^dag).

#include <Eigen/Core>

#include <array>
#include <complex>
#include <string>

#include "g2kit/gaussian_core.hpp"
#include "g2kit/quadrature.hpp"

namespace g2kit::upb {

using cplx = std::complex<double>;

struct TwoCavityParams {
  std::array<double, 2> delta{0.0, 0.0};
  std::array<double, 2> u{0.0, 0.0};
  std::array<double, 2> kappa{1.0, 1.0};
  double j = 0.0;
  double f = 0.0;

  /// Throws Error(kInvalidArgument) on non-finite values, kappa <= 0, or
  /// negative U, J, F.
  void validate() const;

  /// Equal cavities: delta_k = delta, U_k = u, kappa_k = kappa.
  static TwoCavityParams symmetric(double delta, double u, double j, double f,
                                   double kappa = 1.0);
  /// Delta = -0.275, J = 3, F = 0.01 in units of kappa_1 = kappa_2 = 1.
  static TwoCavityParams weak_drive_reference(double u);
};

struct ClassicalFixedPoint {
  cplx alpha1;
  cplx alpha2;
  /// Continuation record: "U=0->target/<steps>".
  std::string branch_id;
  int steps = 0;
  /// max_k |rhs_k| / (kappa_max F); 0 for F = 0.
  double residual = 0.0;
};

struct SusceptibilityMatrix {
  double omega = 0.0;
  Eigen::Matrix4cd matrix;  ///< the matrix being inverted, M[omega]
  Eigen::Matrix4cd chi;     ///< M[omega]^{-1}
  double condition = 1.0;
};

struct SqueezingDecomposition {
  double omega = 0.0;
  cplx lambda_direct;
  cplx lambda_induced;
  cplx lambda_total;
  cplx g2r_denominator;  ///< G^R_2[omega]
  /// Small-U estimate 2 U2 alpha2^2 J^2 / (Delta2^2 + kappa2^2/4).
  cplx lambda_induced_small_u;
};

/// Normal-ordered fluctuation moments of both cavities.
struct FluctuationMoments {
  std::array<double, 2> n{0.0, 0.0};  ///< <d_k^dag d_k>
  std::array<cplx, 2> m{};            ///< <d_k d_k>
  double omega_max = 0.0;             ///< final integration half-width
  int panels = 0;
};

struct MomentOptions {
  double rel_tol = 1e-12;
  double tail_tol = 1e-12;
  double omega_start_factor = 50.0;
  int max_doublings = 40;
  int max_panels = 40000;
};

/// Residual of the classical mean-field equations at (alpha1, alpha2).
std::array<cplx, 2> classical_rhs(const TwoCavityParams& p, cplx alpha1, cplx alpha2);

/// Exact U = 0 solution.
ClassicalFixedPoint linear_fixed_point(const TwoCavityParams& p);

/// Continuation in U from the linear solution. Throws Error(kBranchJump) when a
/// Newton correction exceeds 10x the tangent prediction at the minimum step, and
/// Error(kNoConvergence) if the final residual is not below 1e-12 kappa F.
ClassicalFixedPoint classical_fixed_point(const TwoCavityParams& p);

/// M[omega] with shifted detunings Delta_k - 4 U_k |alpha_k|^2.
Eigen::Matrix4cd susceptibility_inverse(const TwoCavityParams& p, const ClassicalFixedPoint& fp,
                                        double omega);

/// Throws Error(kSingular) when cond(M[omega]) > 1e12.
SusceptibilityMatrix susceptibility(const TwoCavityParams& p, const ClassicalFixedPoint& fp,
                                    double omega);

/// Eigenvalues of M[0]; the linearization is stable iff all real parts are > 0.
Eigen::Vector4cd stability_spectrum(const TwoCavityParams& p, const ClassicalFixedPoint& fp);
bool is_stable(const TwoCavityParams& p, const ClassicalFixedPoint& fp);

/// Frequency integrals of |chi|^2 over [-Omega, Omega], Omega doubled until the
/// added tails are below tail_tol relative. Throws Error(kUnstableLinearization)
/// or Error(kQuadratureNotConverged).
FluctuationMoments fluctuation_moments_all(const TwoCavityParams& p, const ClassicalFixedPoint& fp,
                                           const MomentOptions& opt = {});

/// Cavity k in {0, 1}: n_k, |<d_k d_k>|, rel_angle = arg<d_k d_k> + pi - 2 arg alpha_k.
MomentPair fluctuation_moments(const TwoCavityParams& p, const ClassicalFixedPoint& fp, int k,
                               const MomentOptions& opt = {});

struct Cavity1Result {
  double g2 = 0.0;
  GaussianStateParams state;
  ClassicalFixedPoint fixed_point;
  FluctuationMoments moments;
};

Cavity1Result g2_cavity1(const TwoCavityParams& p, const MomentOptions& opt = {});

SqueezingDecomposition squeezing_decomposition(const TwoCavityParams& p,
                                               const ClassicalFixedPoint& fp, double omega);

}  // namespace g2kit::upb
