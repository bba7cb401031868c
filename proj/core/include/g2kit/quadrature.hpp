#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of vector-valued functions with a
// global error queue. Deterministic: panel order depends only on the integrand.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace g2kit::quad {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_panels = 20000;
  /// Optional component -> group map; the relative tolerance of a component is
  /// taken against the Euclidean norm of its group (e.g. Re/Im of one complex
  /// quantity). Empty means every component is its own group.
  std::vector<int> groups;
};

/// Per-component magnitude used for relative tolerances.
inline Eigen::VectorXd group_magnitude(const Eigen::VectorXd& v, const std::vector<int>& groups) {
  if (groups.empty()) return v.cwiseAbs();
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (groups[i] == groups[j]) sq[i] += v[j] * v[j];
    }
  }
  return sq.cwiseSqrt();
}

struct Result {
  Eigen::VectorXd value;
  Eigen::VectorXd error;
  int panels = 0;
  bool converged = false;
};

using Integrand = std::function<Eigen::VectorXd(double)>;

namespace detail {

inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd value;
  Eigen::VectorXd error;
  double priority = 0.0;
  bool operator<(const Panel& o) const { return priority < o.priority; }
};

inline Panel integrate_panel(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Eigen::VectorXd fc = f(c);
  Eigen::VectorXd kron = kWk[7] * fc;
  Eigen::VectorXd gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const Eigen::VectorXd f1 = f(c - h * kXk[i]);
    const Eigen::VectorXd f2 = f(c + h * kXk[i]);
    kron += kWk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = h * kron;
  p.error = (h * (kron - gauss)).cwiseAbs();
  return p;
}

}  // namespace detail

/// Integrates f over [a, b], initially split at `breaks` (sorted, inside (a, b))
/// and into `initial_panels` equal pieces between them. Converged when every
/// component satisfies error_i <= max(abs_tol, rel_tol |value_i|), with |value_i|
/// taken over the component's group when groups are given.
inline Result integrate(const Integrand& f, double a, double b, const Options& opt,
                        int initial_panels = 16, const std::vector<double>& breaks = {}) {
  std::vector<double> edges{a};
  for (double x : breaks) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);

  std::vector<detail::Panel> initial;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double w = (edges[e + 1] - edges[e]) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
      const double lo = edges[e] + i * w;
      const double hi = i + 1 == initial_panels ? edges[e + 1] : lo + w;
      initial.push_back(detail::integrate_panel(f, lo, hi));
    }
  }
  Result res;
  res.value = Eigen::VectorXd::Zero(initial.front().value.size());
  res.error = Eigen::VectorXd::Zero(res.value.size());
  Eigen::VectorXd magnitude = Eigen::VectorXd::Zero(res.value.size());
  for (const auto& p : initial) {
    res.value += p.value;
    res.error += p.error;
    magnitude += group_magnitude(p.value, opt.groups);
  }
  // Components differ by many orders of magnitude; rank panels by error
  // relative to each component's own scale.
  const Eigen::VectorXd scale =
      magnitude.cwiseMax(opt.rel_tol > 0.0 ? opt.abs_tol / opt.rel_tol : 0.0)
          .cwiseMax(std::numeric_limits<double>::min());
  auto rank = [&](detail::Panel& p) { p.priority = p.error.cwiseQuotient(scale).maxCoeff(); };
  std::priority_queue<detail::Panel> queue;
  for (auto& p : initial) {
    rank(p);
    queue.push(std::move(p));
  }
  res.panels = static_cast<int>(queue.size());

  auto done = [&] {
    const Eigen::VectorXd mag = group_magnitude(res.value, opt.groups);
    for (Eigen::Index i = 0; i < res.value.size(); ++i) {
      if (res.error[i] > std::max(opt.abs_tol, opt.rel_tol * mag[i])) return false;
    }
    return true;
  };

  while (!done()) {
    if (res.panels >= opt.max_panels || queue.empty()) return res;
    detail::Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) return res;
    detail::Panel left = detail::integrate_panel(f, worst.a, mid);
    detail::Panel right = detail::integrate_panel(f, mid, worst.b);
    rank(left);
    rank(right);
    res.value += left.value + right.value - worst.value;
    res.error += left.error + right.error - worst.error;
    res.error = res.error.cwiseMax(0.0);
    queue.push(std::move(left));
    queue.push(std::move(right));
    ++res.panels;
  }
  // Re-sum to remove drift from the running updates.
  res.value.setZero();
  res.error.setZero();
  while (!queue.empty()) {
    res.value += queue.top().value;
    res.error += queue.top().error;
    queue.pop();
  }
  res.converged = done();
  return res;
}

}  // namespace g2kit::quad
