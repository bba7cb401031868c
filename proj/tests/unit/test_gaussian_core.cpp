#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "g2kit/errors.hpp"
#include "g2kit/gaussian_core.hpp"
#include "oracles.hpp"

namespace g2kit {
namespace {

using std::numbers::pi;

using cplx = std::complex<double>;

double sq(double x) { return x * x; }

TEST(GaussianCore, CoherentStateHasNoFluctuations) {
  const auto m = moments_from_state(GaussianStateParams(1.0, 0.0, 0.0, 0.0, 0.0));
  EXPECT_EQ(m.n(), 0.0);
  EXPECT_EQ(m.s(), 0.0);
}

TEST(GaussianCore, ThermalStateMoments) {
  const auto m = moments_from_state(GaussianStateParams(0.0, 0.0, 0.0, 0.0, 0.5));
  EXPECT_NEAR(m.n(), 0.5, 1e-15);
  EXPECT_EQ(m.s(), 0.0);
}

TEST(GaussianCore, SqueezedVacuumMomentsMatchFockBasis) {
  const auto m = moments_from_state(GaussianStateParams(0.0, 0.0, 1.0, 0.0, 0.0));
  EXPECT_NEAR(m.n(), sq(std::sinh(1.0)), 1e-14);
  EXPECT_NEAR(m.s(), 0.5 * std::sinh(2.0), 1e-14);
  EXPECT_NEAR(m.n(), 1.3811, 1e-4);
  EXPECT_NEAR(m.s(), 1.8134, 1e-4);

  const auto rho = testing::displaced_squeezed_thermal(0.0, 1.0, 0.0, 0.0, 140);
  const auto [n, dd] = testing::central_moments_of_rho(rho);
  EXPECT_NEAR(n, m.n(), 1e-9);
  EXPECT_NEAR(std::abs(dd), m.s(), 1e-9);
}

TEST(GaussianCore, Purity) {
  EXPECT_EQ(purity(GaussianStateParams(1.0, 0.0, 0.3, 0.0, 0.0)), 1.0);
  EXPECT_DOUBLE_EQ(purity(GaussianStateParams(0.0, 0.0, 0.0, 0.0, 0.5)), 0.5);
  // r = atanh(1/2)/2 is the DPA point lambda = kappa/4, where P = sqrt(1 - 1/4).
  const double r = 0.5 * std::atanh(0.5);
  const double n_eff = sq(std::sinh(r));
  EXPECT_NEAR(n_eff, 0.0774, 1e-4);
  EXPECT_NEAR(purity(GaussianStateParams(0.0, 0.0, r, 0.0, n_eff)), std::sqrt(0.75), 1e-12);

  const auto rho = testing::displaced_squeezed_thermal(0.0, r, 0.0, n_eff, 60);
  EXPECT_NEAR((rho * rho).trace().real(), std::sqrt(0.75), 1e-9);
}

TEST(GaussianCore, G2ZeroExamples) {
  EXPECT_NEAR(g2_zero(GaussianStateParams(0.7, 0.3, 0.0, 0.0, 0.0)), 1.0, 1e-15);
  EXPECT_NEAR(g2_zero(GaussianStateParams(0.0, 0.0, 0.0, 0.0, 1.0)), 2.0, 1e-15);
  EXPECT_NEAR(g2_zero(GaussianStateParams::amplitude_squeezed(1.0, 0.28, 0.0)), 0.71, 0.01);
  EXPECT_NEAR(g2_zero(GaussianStateParams::amplitude_squeezed(1.0, 10.0, 0.0)), 3.0, 1e-3);
}

TEST(GaussianCore, VacuumIsAnError) {
  try {
    g2_zero(GaussianStateParams(0.0, 0.0, 0.0, 0.0, 0.0));
    FAIL() << "expected VacuumState";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kVacuumState);
  }
}

TEST(GaussianCore, RejectsInvalidParameters) {
  EXPECT_THROW(GaussianStateParams(-1.0, 0.0, 0.0, 0.0, 0.0), Error);
  EXPECT_THROW(GaussianStateParams(0.0, 0.0, -0.1, 0.0, 0.0), Error);
  EXPECT_THROW(GaussianStateParams(0.0, 0.0, 0.0, 0.0, -0.1), Error);
  EXPECT_THROW(GaussianStateParams(NAN, 0.0, 0.0, 0.0, 0.0), Error);
  EXPECT_THROW(MomentPair(0.1, 1.0), Error);
  EXPECT_THROW(CorrelationSeries({0.0, 0.0}, {1.0, 1.0}), Error);
  EXPECT_THROW(CorrelationSeries({0.0, 1.0}, {1.0}), Error);
  EXPECT_THROW(CorrelationSeries({0.0, 1.0}, {1.0, -0.5}), Error);
  EXPECT_NO_THROW(CorrelationSeries({0.0, 1.0}, {0.5, 1.0}));
}

TEST(GaussianCore, PhasesAreReduced) {
  const GaussianStateParams p(1.0, 3.0 * pi, 0.1, -3.0 * pi, 0.0);
  EXPECT_NEAR(p.alpha_phase(), pi, 1e-12);
  EXPECT_NEAR(p.squeeze_phase(), pi, 1e-12);
  EXPECT_GT(p.alpha_phase(), -pi);
}

TEST(GaussianCore, NTotal) {
  EXPECT_DOUBLE_EQ(n_total(GaussianStateParams(2.0, 0.0, 0.0, 0.0, 0.0)), 4.0);
  EXPECT_NEAR(n_total(GaussianStateParams(0.0, 0.0, 1.0, 0.0, 0.0)), 1.3811, 1e-4);
  EXPECT_DOUBLE_EQ(n_total(GaussianStateParams(0.0, 0.0, 0.0, 0.0, 0.3)), 0.3);
}

TEST(GaussianCore, TwoTimeFormulaReducesToEqualTime) {
  EXPECT_DOUBLE_EQ(g2_tau_from_correlators(0.8, 0.0, 0.0, 0.2, 0.0), 1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const GaussianStateParams p(2.0 * u(rng), 2.0 * pi * u(rng), u(rng), 2.0 * pi * u(rng), u(rng));
    const auto m = moments_from_state(p);
    EXPECT_NEAR(g2_tau_from_correlators(p.alpha_mag(), m.n(), m.s(), m.n(), m.rel_angle()),
                g2_zero(p), 1e-12 * g2_zero(p));
  }
}

TEST(GaussianCoreProperty, UnsqueezedStatesAreClassical) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = 3.0 * u(rng);
    const double n = 2.0 * u(rng) + 1e-6;
    const double g2 = g2_zero(GaussianStateParams(a, 0.4, 0.0, 0.8, n));
    EXPECT_NEAR(g2, 1.0 + (2.0 * a * a * n + n * n) / sq(a * a + n), 1e-13);
    EXPECT_GE(g2, 1.0);
  }
}

TEST(GaussianCoreProperty, OnlyRelativeAngleMatters) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = 2.0 * u(rng) + 0.01;
    const double r = u(rng);
    const double n = u(rng);
    const double phi = 2.0 * pi * u(rng);
    const double theta = 2.0 * pi * u(rng);
    const double delta = 20.0 * (u(rng) - 0.5);
    const double g = g2_zero(GaussianStateParams(a, phi, r, theta, n));
    const double h = g2_zero(GaussianStateParams(a, phi + delta, r, theta + 2.0 * delta, n));
    EXPECT_NEAR(g, h, 1e-12 * g);
  }
}

TEST(GaussianCoreProperty, HeisenbergBound) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = 2.0 * u(rng);
    const double n_eff = i % 4 == 0 ? 0.0 : 2.0 * u(rng);
    const auto m = moments_from_state(GaussianStateParams(0.0, 0.0, r, 0.0, n_eff));
    const double gap = m.n() * (m.n() + 1.0) - m.s() * m.s();
    if (n_eff == 0.0) {
      EXPECT_NEAR(gap, 0.0, 1e-12 * std::max(1.0, m.n() * m.n()));
    } else {
      EXPECT_GT(gap, 0.0);
    }
  }
}

TEST(GaussianCoreProperty, StateFromMomentsInvertsMoments) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const GaussianStateParams p(1.0 + u(rng), 2.0 * pi * (u(rng) - 0.5), 0.05 + u(rng),
                                2.0 * pi * (u(rng) - 0.5), u(rng));
    const auto m = moments_from_state(p);
    const cplx dd = -m.s() * std::exp(cplx(0.0, p.squeeze_phase()));
    const auto q = state_from_moments(p.alpha(), m.n(), dd);
    EXPECT_NEAR(q.squeeze_mag(), p.squeeze_mag(), 1e-10);
    EXPECT_NEAR(q.n_eff(), p.n_eff(), 1e-10);
    EXPECT_NEAR(std::remainder(q.squeeze_phase() - p.squeeze_phase(), 2.0 * pi), 0.0, 1e-10);
  }
  EXPECT_THROW(state_from_moments(1.0, 0.1, cplx(1.0, 0.0)), Error);
}

// Fock-basis equivalence over random parameters (the criterion-4 sample uses
// a different seed in the acceptance binary).
TEST(GaussianCoreProperty, FockOracleEquivalence) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const GaussianStateParams p(2.0 * u(rng), 2.0 * pi * u(rng), u(rng), 2.0 * pi * u(rng), u(rng));
    Eigen::MatrixXcd rho;
    for (int cutoff = 40;; cutoff += 20) {
      rho = testing::displaced_squeezed_thermal(p.alpha(), p.squeeze_mag(), p.squeeze_phase(),
                                                p.n_eff(), cutoff);
      if (1.0 - rho.trace().real() < 1e-10) break;
      ASSERT_LT(cutoff, 400);
    }
    EXPECT_NEAR(testing::g2_of_rho(rho), g2_zero(p), 1e-6 * g2_zero(p));
  }
}

}  // namespace
}  // namespace g2kit
