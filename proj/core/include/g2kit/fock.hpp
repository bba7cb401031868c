#pragma once

// Truncated Fock-space Lindblad steady states. Density matrices are
// vectorized by column stacking; mode 0 is the most significant tensor factor.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "g2kit/dpa.hpp"
#include "g2kit/gaussian_core.hpp"
#include "g2kit/qbe.hpp"
#include "g2kit/two_cavity.hpp"

namespace g2kit::fock {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

enum class Frame {
  kLab,        ///< plain Fock basis of a
  kDisplaced,  ///< Fock basis of b = a - alpha0 with alpha0 the expected mean field
};

struct FockConfig {
  /// Highest retained Fock level N_k per mode (N_k + 1 states).
  std::vector<int> cutoffs;
  /// Max population allowed in the top two levels of any mode.
  double tail_tol = 1e-10;
  double solver_tol = 1e-10;
  /// Budget on nonzeros of the assembled superoperator.
  std::size_t max_nonzeros = 1'000'000;
  /// 0 disables the Hilbert-dimension cap.
  std::size_t max_hilbert_dim = 0;
  bool escalate = true;
  int max_escalations = 6;
  double growth = 1.5;
  Frame frame = Frame::kDisplaced;
  /// Re-centering passes of the displaced frame on the solved <a>.
  int max_recenter = 3;
  /// Directory of the steady-state cache; disabled when empty.
  std::filesystem::path cache_dir;

  /// Throws Error(kInvalidArgument) unless cutoffs >= 2 and 0 < tail_tol <= 1e-4.
  void validate(std::size_t modes) const;
};

/// Default cutoffs: 30 for DPA/QBE, 5 per mode for the two-cavity system.
FockConfig default_config_dpa();
FockConfig default_config_qbe();
FockConfig default_config_two_cavity();

struct DpaSystem {
  dpa::DpaParams params;
};
struct QbeSystem {
  qbe::QbeParams params;
};
struct TwoCavitySystem {
  upb::TwoCavityParams params;
};
using System = std::variant<DpaSystem, QbeSystem, TwoCavitySystem>;

std::size_t mode_count(const System& s);

/// Expected mean field used to center the displaced frame.
std::vector<cplx> frame_offsets(const System& s);

struct Liouvillian {
  std::vector<int> cutoffs;
  std::vector<cplx> offsets;
  std::size_t hilbert_dim = 0;
  std::size_t dimension = 0;  ///< hilbert_dim^2
  SparseMatrix matrix;
  /// max_j |sum_i w_i L_ij| for the trace functional w.
  double trace_defect = 0.0;
  /// ||L(rho) - L(rho)^dag||_max on fixed-seed random Hermitian rho.
  double hermiticity_defect = 0.0;
};

/// Throws Error(kDimensionOverflow) when the superoperator would exceed the
/// nonzero budget or the Hilbert dimension cap.
Liouvillian build_liouvillian(const System& system, const FockConfig& cfg);
Liouvillian build_liouvillian(const System& system, const FockConfig& cfg,
                              const std::vector<cplx>& offsets);

struct ModeObservables {
  cplx mean_field;        ///< <a>
  double occupation = 0;  ///< <a^dag a>
  cplx squeeze_moment;    ///< <a^2>
  double central_n = 0;   ///< <d^dag d>, d = a - <a>
  cplx central_m;         ///< <d d>
  std::optional<double> g2;
  double tail = 0;  ///< population of the top two retained levels
};

struct FockSteadyState {
  Eigen::MatrixXcd rho;
  std::vector<int> cutoffs;
  std::vector<cplx> offsets;
  std::vector<ModeObservables> modes;
  double purity = 0;
  double min_eigenvalue = 0;
  double hermiticity_defect = 0;
  double residual = 0;  ///< ||L rho||_max of the solved system
  int escalations = 0;

  /// Observables of a density matrix given in the Fock basis of b_k = a_k - offsets_k.
  static FockSteadyState from_density_matrix(Eigen::MatrixXcd rho, std::vector<int> cutoffs,
                                             std::vector<cplx> offsets = {});
};

/// Single sparse-LU solve of L rho = 0 with Tr rho = 1. Throws Error(kNoNullVector)
/// when the trace-replaced system is singular or the residual exceeds 1e-8.
FockSteadyState solve(const Liouvillian& liouv);

/// Full protocol: displaced-frame re-centering and cutoff escalation until the
/// observables change by < 10 solver_tol and the tail is < tail_tol. Throws
/// Error(kCutoffNotConverged) otherwise.
FockSteadyState steady_state(const System& system, const FockConfig& cfg);

/// Tr[rho a^dag a^dag a a] / Tr[rho a^dag a]^2. Throws Error(kVacuumState).
double g2_from_rho(const FockSteadyState& state, std::size_t mode);

/// Displaced squeezed thermal state with the same first and second moments.
GaussianStateParams gaussian_fit(const FockSteadyState& state, std::size_t mode);

/// D(alpha) S(xi) rho_th S^dag D^dag in the Fock basis 0..cutoff, built with
/// matrix exponentials on cutoff + padding levels and truncated afterwards.
Eigen::MatrixXcd gaussian_density_matrix(const GaussianStateParams& p, int cutoff,
                                         int padding = 15);

/// Truncated annihilation operator on levels 0..cutoff.
SparseMatrix annihilation(int cutoff);

/// FNV-1a over the canonical description of (system, cutoffs, offsets).
std::uint64_t cache_key(const System& system, const std::vector<int>& cutoffs,
                        const std::vector<cplx>& offsets);

}  // namespace g2kit::fock
