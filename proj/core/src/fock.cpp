#include "g2kit/fock.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#ifdef G2KIT_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>

#include "g2kit/errors.hpp"

namespace g2kit::fock {
namespace {

constexpr std::uint32_t kCacheVersion = 1;
constexpr char kCacheMagic[8] = {'G', '2', 'K', 'R', 'H', 'O', '\0', '\0'};

SparseMatrix identity(std::size_t n) {
  SparseMatrix id(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  id.setIdentity();
  return id;
}

std::vector<std::size_t> level_counts(const std::vector<int>& cutoffs) {
  std::vector<std::size_t> dims;
  for (int c : cutoffs) dims.push_back(static_cast<std::size_t>(c) + 1);
  return dims;
}

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

// I (x) ... (x) op (x) ... (x) I with `op` on `mode`.
SparseMatrix embed(const SparseMatrix& op, std::size_t mode, const std::vector<std::size_t>& dims) {
  SparseMatrix out = identity(1);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const SparseMatrix factor = k == mode ? op : identity(dims[k]);
    SparseMatrix next = Eigen::kroneckerProduct(out, factor).eval();
    out = std::move(next);
  }
  return out;
}

struct Model {
  SparseMatrix hamiltonian;
  std::vector<std::pair<double, SparseMatrix>> collapse;  // (rate, operator)
};

// Lab-frame operators a_k = b_k + offset_k expressed on the truncated b basis.
std::vector<SparseMatrix> lab_operators(const std::vector<int>& cutoffs,
                                        const std::vector<cplx>& offsets) {
  const auto dims = level_counts(cutoffs);
  const SparseMatrix id = identity(product(dims));
  std::vector<SparseMatrix> ops;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    ops.push_back(embed(annihilation(cutoffs[k]), k, dims) + offsets[k] * id);
  }
  return ops;
}

SparseMatrix dagger(const SparseMatrix& m) { return SparseMatrix(m.adjoint()); }

Model make_model(const System& system, const std::vector<SparseMatrix>& a) {
  const cplx i(0.0, 1.0);
  Model model;
  if (const auto* d = std::get_if<DpaSystem>(&system)) {
    const auto& p = d->params;
    const cplx eps = dpa::drive_for_alpha(p.lambda(), p.kappa(), p.theta(), p.alpha());
    const SparseMatrix& op = a[0];
    const SparseMatrix opd = dagger(op);
    const cplx pump = std::polar(1.0, p.theta());
    model.hamiltonian = -0.5 * i * p.lambda() * (pump * (opd * opd) - std::conj(pump) * (op * op)) +
                        eps * opd + std::conj(eps) * op;
    model.collapse.emplace_back(p.kappa(), op);
  } else if (const auto* q = std::get_if<QbeSystem>(&system)) {
    const auto& p = q->params;
    const cplx eps = qbe::drive_for_alpha(p);
    const SparseMatrix& op = a[0];
    const SparseMatrix opd = dagger(op);
    model.hamiltonian = eps * opd + std::conj(eps) * op;
    const SparseMatrix bog =
        std::cosh(p.r_qbe()) * op + std::polar(std::sinh(p.r_qbe()), p.theta()) * opd;
    model.collapse.emplace_back(p.gamma_qbe(), bog);
    model.collapse.emplace_back(p.kappa_ext(), op);
  } else {
    const auto& p = std::get<TwoCavitySystem>(system).params;
    SparseMatrix h = SparseMatrix(a[0].rows(), a[0].cols());
    for (int k = 0; k < 2; ++k) {
      const SparseMatrix ad = dagger(a[k]);
      h += -p.delta[k] * (ad * a[k]) + p.u[k] * (ad * ad * a[k] * a[k]);
      model.collapse.emplace_back(p.kappa[k], a[k]);
    }
    const SparseMatrix hop = dagger(a[0]) * a[1];
    h += p.j * (hop + dagger(hop)) + p.f * (a[0] + dagger(a[0]));
    model.hamiltonian = h;
  }
  for (auto& c : model.collapse) c.second.prune(cplx(0.0));
  model.hamiltonian.prune(cplx(0.0));
  return model;
}

Eigen::MatrixXcd random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) m(r, c) = cplx(g(rng), g(rng));
  }
  return 0.5 * (m + m.adjoint());
}

cplx expect(const SparseMatrix& op, const Eigen::MatrixXcd& rho) {
  // Tr(rho X) = sum_ij rho_ji X_ij
  cplx acc = 0.0;
  for (int col = 0; col < op.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(op, col); it; ++it) acc += rho(col, it.row()) * it.value();
  }
  return acc;
}

std::string describe(const System& system) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* d = std::get_if<DpaSystem>(&system)) {
    const auto& p = d->params;
    os << "dpa " << p.lambda() << ' ' << p.kappa() << ' ' << p.alpha_mag() << ' ' << p.theta()
       << ' ' << p.phi();
  } else if (const auto* q = std::get_if<QbeSystem>(&system)) {
    const auto& p = q->params;
    os << "qbe " << p.r_qbe() << ' ' << p.gamma_qbe() << ' ' << p.kappa_ext() << ' '
       << p.alpha_mag() << ' ' << p.theta() << ' ' << p.phi();
  } else {
    const auto& p = std::get<TwoCavitySystem>(system).params;
    os << "two_cavity";
    for (int k = 0; k < 2; ++k) os << ' ' << p.delta[k] << ' ' << p.u[k] << ' ' << p.kappa[k];
    os << ' ' << p.j << ' ' << p.f;
  }
  return os.str();
}

std::filesystem::path cache_path(const FockConfig& cfg, std::uint64_t key) {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.g2rho", static_cast<unsigned long long>(key));
  return cfg.cache_dir / name;
}

template <class T>
void write_pod(std::ostream& os, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool read_pod(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

std::optional<FockSteadyState> cache_load(const FockConfig& cfg, std::uint64_t key,
                                          const std::vector<int>& cutoffs,
                                          const std::vector<cplx>& offsets) {
  if (cfg.cache_dir.empty()) return std::nullopt;
  std::ifstream in(cache_path(cfg, key), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0;
  std::uint32_t modes = 0;
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kCacheMagic)) return std::nullopt;
  if (!read_pod(in, version) || version != kCacheVersion) return std::nullopt;
  if (!read_pod(in, modes) || modes != cutoffs.size()) return std::nullopt;
  for (std::size_t k = 0; k < modes; ++k) {
    std::int32_t c = 0;
    double re = 0.0;
    double im = 0.0;
    if (!read_pod(in, c) || !read_pod(in, re) || !read_pod(in, im)) return std::nullopt;
    if (c != cutoffs[k] || re != offsets[k].real() || im != offsets[k].imag()) return std::nullopt;
  }
  double residual = 0.0;
  if (!read_pod(in, residual)) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(product(level_counts(cutoffs)));
  Eigen::MatrixXcd rho(n, n);
  if (!in.read(reinterpret_cast<char*>(rho.data()),
               static_cast<std::streamsize>(sizeof(cplx) * n * n))) {
    return std::nullopt;
  }
  FockSteadyState st = FockSteadyState::from_density_matrix(std::move(rho), cutoffs, offsets);
  st.residual = residual;
  return st;
}

void cache_store(const FockConfig& cfg, std::uint64_t key, const FockSteadyState& st) {
  if (cfg.cache_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cfg.cache_dir, ec);
  const auto path = cache_path(cfg, key);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out.write(kCacheMagic, 8);
    write_pod(out, kCacheVersion);
    write_pod(out, static_cast<std::uint32_t>(st.cutoffs.size()));
    for (std::size_t k = 0; k < st.cutoffs.size(); ++k) {
      write_pod(out, static_cast<std::int32_t>(st.cutoffs[k]));
      write_pod(out, st.offsets[k].real());
      write_pod(out, st.offsets[k].imag());
    }
    write_pod(out, st.residual);
    out.write(reinterpret_cast<const char*>(st.rho.data()),
              static_cast<std::streamsize>(sizeof(cplx) * st.rho.size()));
  }
  std::filesystem::rename(tmp, path, ec);
}

// Observables compared between cutoff levels.
std::vector<cplx> fingerprint(const FockSteadyState& st) {
  std::vector<cplx> v;
  for (const auto& m : st.modes) {
    v.push_back(m.mean_field);
    v.push_back(m.occupation);
    v.push_back(m.squeeze_moment);
    v.push_back(m.g2.value_or(0.0));
  }
  return v;
}

double relative_change(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale > 0.0) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

double max_tail(const FockSteadyState& st) {
  double t = 0.0;
  for (const auto& m : st.modes) t = std::max(t, m.tail);
  return t;
}

std::string format_cutoffs(const std::vector<int>& c) {
  std::string s = "(";
  for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k]);
  return s + ")";
}

}  // namespace

void FockConfig::validate(std::size_t modes) const {
  if (cutoffs.size() != modes) {
    throw Error(Errc::kInvalidArgument, "expected " + std::to_string(modes) + " cutoffs, got " +
                                            std::to_string(cutoffs.size()));
  }
  for (int c : cutoffs) {
    if (c < 2) throw Error(Errc::kInvalidArgument, "Fock cutoffs must be >= 2");
  }
  if (!(tail_tol > 0.0 && tail_tol <= 1e-4)) {
    throw Error(Errc::kInvalidArgument, "tail_tol must lie in (0, 1e-4]");
  }
  if (!(solver_tol > 0.0)) throw Error(Errc::kInvalidArgument, "solver_tol must be > 0");
  if (!(growth > 1.0)) throw Error(Errc::kInvalidArgument, "cutoff growth factor must be > 1");
}

FockConfig default_config_dpa() {
  FockConfig c;
  c.cutoffs = {30};
  return c;
}

FockConfig default_config_qbe() { return default_config_dpa(); }

FockConfig default_config_two_cavity() {
  FockConfig c;
  c.cutoffs = {5, 5};
  return c;
}

std::size_t mode_count(const System& s) {
  return std::holds_alternative<TwoCavitySystem>(s) ? 2 : 1;
}

std::vector<cplx> frame_offsets(const System& s) {
  if (const auto* d = std::get_if<DpaSystem>(&s)) return {d->params.alpha()};
  if (const auto* q = std::get_if<QbeSystem>(&s)) return {q->params.alpha()};
  const auto& p = std::get<TwoCavitySystem>(s).params;
  try {
    const auto fp = upb::classical_fixed_point(p);
    return {fp.alpha1, fp.alpha2};
  } catch (const Error&) {
    const auto fp = upb::linear_fixed_point(p);
    return {fp.alpha1, fp.alpha2};
  }
}

SparseMatrix annihilation(int cutoff) {
  const int n = cutoff + 1;
  SparseMatrix a(n, n);
  a.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int k = 1; k < n; ++k) a.insert(k - 1, k) = std::sqrt(static_cast<double>(k));
  a.makeCompressed();
  return a;
}

Liouvillian build_liouvillian(const System& system, const FockConfig& cfg) {
  const std::vector<cplx> offsets =
      cfg.frame == Frame::kDisplaced ? frame_offsets(system)
                                     : std::vector<cplx>(mode_count(system), cplx{});
  return build_liouvillian(system, cfg, offsets);
}

Liouvillian build_liouvillian(const System& system, const FockConfig& cfg,
                              const std::vector<cplx>& offsets) {
  const std::size_t modes = mode_count(system);
  cfg.validate(modes);
  if (offsets.size() != modes) throw Error(Errc::kInvalidArgument, "one offset per mode required");
  if (const auto* d = std::get_if<DpaSystem>(&system); d && !d->params.is_stable()) {
    throw Error(Errc::kUnstable, "DPA Liouvillian requires lambda < kappa/2");
  }
  if (const auto* t = std::get_if<TwoCavitySystem>(&system)) t->params.validate();

  const auto dims = level_counts(cfg.cutoffs);
  const std::size_t n = product(dims);
  if (cfg.max_hilbert_dim != 0 && n > cfg.max_hilbert_dim) {
    throw Error(Errc::kDimensionOverflow, "Hilbert dimension " + std::to_string(n) +
                                              " exceeds cap " + std::to_string(cfg.max_hilbert_dim));
  }

  const auto a = lab_operators(cfg.cutoffs, offsets);
  const Model model = make_model(system, a);

  // Upper bound on the nonzeros of the assembled superoperator.
  std::size_t budget = 2 * n * static_cast<std::size_t>(model.hamiltonian.nonZeros());
  std::vector<SparseMatrix> number_like;
  for (const auto& [rate, c] : model.collapse) {
    SparseMatrix cdc = dagger(c) * c;
    cdc.prune(cplx(0.0));
    budget += static_cast<std::size_t>(c.nonZeros()) * static_cast<std::size_t>(c.nonZeros()) +
              2 * n * static_cast<std::size_t>(cdc.nonZeros());
    number_like.push_back(std::move(cdc));
  }
  if (budget > cfg.max_nonzeros) {
    throw Error(Errc::kDimensionOverflow, "superoperator for cutoffs " +
                                              format_cutoffs(cfg.cutoffs) + " needs up to " +
                                              std::to_string(budget) + " nonzeros (budget " +
                                              std::to_string(cfg.max_nonzeros) + ")");
  }

  const cplx i(0.0, 1.0);
  const SparseMatrix id = identity(n);
  const SparseMatrix ht = SparseMatrix(model.hamiltonian.transpose());
  SparseMatrix l = (-i) * (SparseMatrix(Eigen::kroneckerProduct(id, model.hamiltonian)) -
                           SparseMatrix(Eigen::kroneckerProduct(ht, id)));
  for (std::size_t c = 0; c < model.collapse.size(); ++c) {
    const auto& [rate, op] = model.collapse[c];
    if (rate == 0.0) continue;
    const SparseMatrix op_conj = SparseMatrix(op.conjugate());
    const SparseMatrix cdc_t = SparseMatrix(number_like[c].transpose());
    l += rate * (SparseMatrix(Eigen::kroneckerProduct(op_conj, op)) -
                 0.5 * SparseMatrix(Eigen::kroneckerProduct(id, number_like[c])) -
                 0.5 * SparseMatrix(Eigen::kroneckerProduct(cdc_t, id)));
  }
  l.prune(cplx(0.0));
  l.makeCompressed();

  Liouvillian out;
  out.cutoffs = cfg.cutoffs;
  out.offsets = offsets;
  out.hilbert_dim = n;
  out.dimension = n * n;

  // Trace functional w picks vec indices j (n + 1).
  double trace_defect = 0.0;
  for (int col = 0; col < l.outerSize(); ++col) {
    cplx acc = 0.0;
    for (SparseMatrix::InnerIterator it(l, col); it; ++it) {
      if (static_cast<std::size_t>(it.row()) % (n + 1) == 0) acc += it.value();
    }
    trace_defect = std::max(trace_defect, std::abs(acc));
  }
  out.trace_defect = trace_defect;

  std::mt19937_64 rng(0x67326b6974ULL);
  double herm = 0.0;
  for (int rep = 0; rep < 2; ++rep) {
    const Eigen::MatrixXcd rho = random_hermitian(n, rng);
    const Eigen::VectorXcd v = l * Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    const Eigen::Map<const Eigen::MatrixXcd> lr(v.data(), n, n);
    herm = std::max(herm, (lr - lr.adjoint()).cwiseAbs().maxCoeff());
  }
  out.hermiticity_defect = herm;
  out.matrix = std::move(l);
  return out;
}

FockSteadyState FockSteadyState::from_density_matrix(Eigen::MatrixXcd rho, std::vector<int> cutoffs,
                                                     std::vector<cplx> offsets) {
  if (offsets.empty()) offsets.assign(cutoffs.size(), cplx{});
  const auto dims = level_counts(cutoffs);
  const std::size_t n = product(dims);
  if (static_cast<std::size_t>(rho.rows()) != n || rho.rows() != rho.cols()) {
    throw Error(Errc::kInvalidArgument, "density matrix does not match the cutoffs");
  }
  FockSteadyState st;
  st.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const cplx tr = rho.trace();
  if (std::abs(tr) > 0.0) rho /= tr.real();

  for (std::size_t k = 0; k < dims.size(); ++k) {
    const SparseMatrix b = embed(annihilation(cutoffs[k]), k, dims);
    const SparseMatrix bd = dagger(b);
    const SparseMatrix id = identity(n);
    ModeObservables m;
    const cplx mu = expect(b, rho);
    m.mean_field = mu + offsets[k];
    m.central_n = expect(SparseMatrix(bd * b), rho).real() - std::norm(mu);
    m.central_m = expect(SparseMatrix(b * b), rho) - mu * mu;
    m.occupation = m.central_n + std::norm(m.mean_field);
    m.squeeze_moment = m.central_m + m.mean_field * m.mean_field;
    const SparseMatrix a = b + offsets[k] * id;
    const SparseMatrix a2 = a * a;
    const double pairs = expect(SparseMatrix(dagger(a2) * a2), rho).real();
    if (m.occupation > 0.0) m.g2 = pairs / (m.occupation * m.occupation);

    // Population of the top two levels of mode k.
    std::size_t stride = 1;
    for (std::size_t q = k + 1; q < dims.size(); ++q) stride *= dims[q];
    double tail = 0.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const std::size_t level = (idx / stride) % dims[k];
      if (level + 2 >= dims[k]) tail += rho(idx, idx).real();
    }
    m.tail = tail;
    st.modes.push_back(m);
  }
  st.purity = rho.squaredNorm();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  st.min_eigenvalue = es.eigenvalues().minCoeff();
  st.rho = std::move(rho);
  st.cutoffs = std::move(cutoffs);
  st.offsets = std::move(offsets);
  return st;
}

FockSteadyState solve(const Liouvillian& liouv) {
  const auto n = static_cast<Eigen::Index>(liouv.hilbert_dim);
  const Eigen::Index dim = n * n;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(liouv.matrix.nonZeros()) + static_cast<std::size_t>(n));
  for (int col = 0; col < liouv.matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(liouv.matrix, col); it; ++it) {
      if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) trips.emplace_back(0, j * (n + 1), 1.0);
  SparseMatrix a(dim, dim);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
  rhs[0] = 1.0;
#ifdef G2KIT_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(Errc::kNoNullVector, "sparse LU of the trace-replaced Liouvillian failed");
  }
  Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(Errc::kNoNullVector, "sparse LU solve failed");
  }
  const double residual = (liouv.matrix * x).cwiseAbs().maxCoeff();
  if (!(residual < 1e-8)) {
    throw Error(Errc::kNoNullVector, "steady-state residual " + std::to_string(residual));
  }
  Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), n, n);
  FockSteadyState st = FockSteadyState::from_density_matrix(std::move(rho), liouv.cutoffs, liouv.offsets);
  st.residual = residual;
  return st;
}

FockSteadyState steady_state(const System& system, const FockConfig& cfg_in) {
  FockConfig cfg = cfg_in;
  const std::size_t modes = mode_count(system);
  if (cfg.cutoffs.empty()) {
    cfg.cutoffs = modes == 2 ? default_config_two_cavity().cutoffs : default_config_dpa().cutoffs;
  }
  cfg.validate(modes);
  std::vector<cplx> offsets = cfg.frame == Frame::kDisplaced ? frame_offsets(system)
                                                             : std::vector<cplx>(modes, cplx{});

  auto solve_at = [&](const std::vector<int>& cutoffs) {
    FockConfig c = cfg;
    c.cutoffs = cutoffs;
    for (int pass = 0;; ++pass) {
      const std::uint64_t key = cache_key(system, cutoffs, offsets);
      std::optional<FockSteadyState> st = cache_load(c, key, cutoffs, offsets);
      if (!st) {
        st = solve(build_liouvillian(system, c, offsets));
        cache_store(c, key, *st);
      }
      if (cfg.frame != Frame::kDisplaced || pass >= cfg.max_recenter) return *st;
      bool centered = true;
      for (std::size_t k = 0; k < modes; ++k) {
        if (std::abs(st->modes[k].mean_field - offsets[k]) > 0.05) centered = false;
      }
      if (centered) return *st;
      for (std::size_t k = 0; k < modes; ++k) offsets[k] = st->modes[k].mean_field;
    }
  };

  std::vector<int> cutoffs = cfg.cutoffs;
  FockSteadyState current = solve_at(cutoffs);
  if (!cfg.escalate) {
    if (!(max_tail(current) < cfg.tail_tol)) {
      throw Error(Errc::kCutoffNotConverged, "tail population " + std::to_string(max_tail(current)) +
                                                 " at cutoffs " + format_cutoffs(cutoffs));
    }
    return current;
  }
  for (int esc = 1; esc <= cfg.max_escalations; ++esc) {
    std::vector<int> next;
    for (int c : cutoffs) {
      next.push_back(std::max(c + 1, static_cast<int>(std::ceil(cfg.growth * c))));
    }
    FockSteadyState refined;
    try {
      refined = solve_at(next);
    } catch (const Error& e) {
      if (e.code() != Errc::kDimensionOverflow) throw;
      throw Error(Errc::kCutoffNotConverged, "escalation to " + format_cutoffs(next) +
                                                 " exceeds the size budget: " + e.what());
    }
    refined.escalations = esc;
    const double change = relative_change(fingerprint(current), fingerprint(refined));
    cutoffs = next;
    current = std::move(refined);
    if (change < 10.0 * cfg.solver_tol && max_tail(current) < cfg.tail_tol) return current;
  }
  throw Error(Errc::kCutoffNotConverged,
              "observables not stable after " + std::to_string(cfg.max_escalations) +
                  " escalations (last cutoffs " + format_cutoffs(cutoffs) + ")");
}

double g2_from_rho(const FockSteadyState& state, std::size_t mode) {
  if (mode >= state.modes.size()) throw Error(Errc::kInvalidArgument, "mode index out of range");
  const auto& m = state.modes[mode];
  if (!m.g2 || !(m.occupation > 0.0)) {
    throw Error(Errc::kVacuumState, "g2 undefined for zero occupation");
  }
  return *m.g2;
}

GaussianStateParams gaussian_fit(const FockSteadyState& state, std::size_t mode) {
  if (mode >= state.modes.size()) throw Error(Errc::kInvalidArgument, "mode index out of range");
  const auto& m = state.modes[mode];
  return state_from_moments(m.mean_field, std::max(m.central_n, 0.0), m.central_m);
}

Eigen::MatrixXcd gaussian_density_matrix(const GaussianStateParams& p, int cutoff, int padding) {
  if (cutoff < 1 || padding < 0) throw Error(Errc::kInvalidArgument, "bad cutoff or padding");
  const int m = cutoff + 1 + padding;
  const Eigen::MatrixXcd a = Eigen::MatrixXcd(annihilation(m - 1));
  const Eigen::MatrixXcd ad = a.adjoint();
  Eigen::MatrixXcd thermal = Eigen::MatrixXcd::Zero(m, m);
  const double nb = p.n_eff();
  for (int k = 0; k < m; ++k) {
    thermal(k, k) = nb == 0.0 ? (k == 0 ? 1.0 : 0.0)
                              : std::pow(nb / (nb + 1.0), k) / (nb + 1.0);
  }
  const cplx xi = std::polar(p.squeeze_mag(), p.squeeze_phase());
  const cplx alpha = p.alpha();
  const Eigen::MatrixXcd sq_gen = 0.5 * (std::conj(xi) * (a * a) - xi * (ad * ad));
  const Eigen::MatrixXcd disp_gen = alpha * ad - std::conj(alpha) * a;
  const Eigen::MatrixXcd s = sq_gen.exp();
  const Eigen::MatrixXcd d = disp_gen.exp();
  const Eigen::MatrixXcd u = d * s;
  const Eigen::MatrixXcd rho = u * thermal * u.adjoint();
  return rho.topLeftCorner(cutoff + 1, cutoff + 1);
}

std::uint64_t cache_key(const System& system, const std::vector<int>& cutoffs,
                        const std::vector<cplx>& offsets) {
  std::ostringstream os;
  os.precision(17);
  os << "v" << kCacheVersion << ' ' << describe(system) << " |";
  for (int c : cutoffs) os << ' ' << c;
  os << " |";
  for (const auto& o : offsets) os << ' ' << o.real() << ' ' << o.imag();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace g2kit::fock
