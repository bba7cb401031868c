#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "g2kit/errors.hpp"
#include "g2kit/gaussian_core.hpp"
#include "g2kit/optimality.hpp"
#include "oracles.hpp"

namespace g2kit::opt {
namespace {

double sq(double x) { return x * x; }

// Evaluated through gaussian_core so the oracles never touch the optimizer.
double g2(double alpha, double r, double n_eff) {
  return g2_zero(GaussianStateParams::amplitude_squeezed(alpha, r, n_eff));
}

// alpha_opt grows quickly with n_eff (about 35 at n_eff = 2).
std::array<double, 3> minimize_2d_at(double n) {
  return testing::minimize_2d([&](double r, double al) { return g2(al, r, n); }, 3.0, 1e-3,
                              n < 0.3 ? 4.0 : 60.0);
}

TEST(Optimality, AmplitudeSqueezedMatchesGaussianCore) {
  for (double a : {0.1, 1.0, 3.0}) {
    for (double r : {0.0, 0.2, 1.5}) {
      for (double n : {0.0, 0.01, 0.7}) {
        EXPECT_NEAR(g2_amplitude_squeezed(a, r, n), g2(a, r, n), 1e-14 * g2(a, r, n));
      }
    }
  }
}

TEST(Optimality, PureOptimumAtUnitDisplacement) {
  const auto res = r_opt_pure(1.0);
  EXPECT_TRUE(res.converged);
  EXPECT_FALSE(res.alpha_opt.has_value());
  EXPECT_NEAR(res.r_opt, 0.28, 0.01);
  EXPECT_NEAR(res.g2_min, 0.71, 0.01);
  const auto [r, f] = testing::minimize_1d([](double r) { return g2(1.0, r, 0.0); }, 0.0, 5.0);
  EXPECT_NEAR(res.r_opt, r, 1e-6);
  EXPECT_NEAR(res.g2_min, f, 1e-12);
}

TEST(Optimality, SmallDisplacementAsymptotics) {
  const auto res = r_opt_pure(0.05);
  EXPECT_NEAR(res.r_opt / 0.0025, 1.0, 0.05);
  EXPECT_NEAR(res.g2_min / 0.01, 1.0, 0.05);
  const auto tiny = r_opt_pure(0.02);
  EXPECT_NEAR(tiny.g2_min / (4.0 * 0.02 * 0.02), 1.0, 0.05);
}

// (1 - g2_min) alpha^2 approaches 1 only as 1 - O(alpha^{-2/3}); the exact
// optimum at alpha = 10 is 0.9920912 (high-precision root of dg2/dr).
TEST(Optimality, LargeDisplacementAsymptote) {
  EXPECT_NEAR(r_opt_pure(10.0).g2_min, 0.99209116780554819, 1e-9);
  double last = 0.0;
  for (double a : {15.0, 30.0, 100.0, 300.0}) {
    const double g = r_opt_pure(a).g2_min;
    EXPECT_LT(std::abs(g - (1.0 - 1.0 / (a * a))), 1e-3) << "alpha=" << a;
    const double ratio = (1.0 - g) * a * a;
    EXPECT_GT(ratio, last);
    EXPECT_LT(ratio, 1.0);
    last = ratio;
  }
}

TEST(Optimality, RejectsNonPositiveDisplacement) {
  EXPECT_THROW(r_opt_pure(0.0), Error);
  EXPECT_THROW(r_opt(-1.0, 0.0), Error);
}

TEST(Optimality, AlphaOptForMatchesScan) {
  for (auto [r, n] : std::vector<std::pair<double, double>>{
           {0.01, 0.0}, {0.28, 0.0}, {0.5, 0.0}, {0.1, 0.005}, {0.4, 0.1}}) {
    const double a = alpha_opt_for(r, n);
    const auto [a_scan, f_scan] =
        testing::minimize_1d([&](double al) { return g2(al, r, n); }, 1e-4, 5.0);
    EXPECT_NEAR(a, a_scan, 1e-6 * a_scan) << "r=" << r << " n=" << n;
    EXPECT_LE(g2(a, r, n), f_scan + 1e-13);
  }
  EXPECT_NEAR(alpha_opt_for(0.01, 0.0) / std::sqrt(0.01), 1.0, 0.05);
  // At fixed r = 0.28 the best displacement is not 1; the (1, 0.28) pairing
  // runs the other way, from alpha to r.
  EXPECT_NEAR(alpha_opt_for(0.28, 0.0), 0.7185, 1e-3);
  EXPECT_NEAR(r_opt_pure(1.0).r_opt, 0.28, 0.01);
}

TEST(Optimality, BelowMinimalSqueezing) {
  const double n = 0.2;
  const double edge = std::log(std::sqrt(2.0 * n + 1.0));
  for (double r : {edge, 0.5 * edge, 0.0}) {
    try {
      alpha_opt_for(r, n);
      FAIL() << "expected BelowMinimalSqueezing at r=" << r;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kBelowMinimalSqueezing);
    }
  }
  EXPECT_NO_THROW(alpha_opt_for(edge * 1.01, n));
}

TEST(Optimality, FixedNeffClosedForm) {
  EXPECT_EQ(g2_min_at_fixed_neff(0.0).g2_min, 0.0);
  const auto small = g2_min_at_fixed_neff(1e-4);
  EXPECT_NEAR(small.g2_min / (8.0 * std::sqrt(1e-4)), 1.0, 0.1);
  ASSERT_TRUE(small.alpha_opt.has_value());
  EXPECT_NEAR(*small.alpha_opt / std::pow(1e-4, 0.25), 1.0, 0.1);
  for (double n : {1e-3, 0.1, 0.5, 2.0}) {
    const auto res = g2_min_at_fixed_neff(n);
    EXPECT_NEAR(sq(std::sinh(res.r_opt)), n, 1e-12 * std::max(1.0, n));
    ASSERT_TRUE(res.alpha_opt.has_value());
    EXPECT_NEAR(res.g2_min, g2(*res.alpha_opt, res.r_opt, n), 1e-12);
    const auto [r, a, f] = minimize_2d_at(n);
    EXPECT_NEAR(res.g2_min, f, 1e-6) << "n_eff=" << n;
  }
}

TEST(Optimality, FixedNeffGradientVanishes) {
  constexpr double h = 1e-6;
  for (double n : {1e-3, 1e-2, 0.1, 1.0, 2.0}) {
    const auto res = g2_min_at_fixed_neff(n);
    const double r = res.r_opt;
    const double a = *res.alpha_opt;
    const double dr = (g2(a, r + h, n) - g2(a, r - h, n)) / (2.0 * h);
    const double da = (g2(a + h, r, n) - g2(a - h, r, n)) / (2.0 * h);
    EXPECT_LT(std::hypot(dr, da), 1e-4) << "n_eff=" << n;
  }
}

TEST(Optimality, LocalMinimality) {
  for (double a : {0.05, 0.3, 1.0, 2.5, 7.0}) {
    for (double n : {0.0, 1e-3, 0.2}) {
      const auto res = r_opt(a, n);
      for (double dr : {-1e-4, 1e-4}) {
        const double r = res.r_opt + dr;
        if (r < 0.0) continue;
        EXPECT_LE(res.g2_min, g2(a, r, n)) << "a=" << a << " n=" << n;
      }
    }
  }
  for (double n : {1e-3, 0.1, 1.0}) {
    const auto res = g2_min_at_fixed_neff(n);
    for (double dr : {-1e-4, 0.0, 1e-4}) {
      for (double da : {-1e-4, 0.0, 1e-4}) {
        EXPECT_LE(res.g2_min, g2(*res.alpha_opt + da, res.r_opt + dr, n) + 1e-15);
      }
    }
  }
}

TEST(OptimalityProperty, Eq8IdentityFromNumericalMinimization) {
  for (double n : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0}) {
    const auto [r, a, f] = minimize_2d_at(n);
    EXPECT_LT(std::abs(sq(std::sinh(r)) - n), 1e-4) << "n_eff=" << n;
  }
}

TEST(OptimalityProperty, BoundCurve) {
  std::vector<double> grid;
  for (int i = 0; i <= 80; ++i) grid.push_back(0.01 * std::pow(1000.0, i / 80.0));
  const auto curve = gaussian_bound_curve(grid);
  ASSERT_EQ(curve.size(), grid.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto [a, v] = curve[i];
    EXPECT_EQ(a, grid[i]);
    EXPECT_LT(v, 1.0);
    if (i > 0) EXPECT_GT(v, curve[i - 1].second);
    if (a >= 2.0) EXPECT_GT(v, 1.0 - 1.0 / (a * a) - 1e-3);
  }
  EXPECT_LT(curve.front().second, 1e-3);
  const std::vector<double> three{3.0};
  const double v3 = gaussian_bound_curve(three).front().second;
  EXPECT_GE(v3, 1.0 - 1.0 / 9.0);
  EXPECT_LT(v3, 1.0);
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW(gaussian_bound_curve(bad), Error);
}

TEST(Optimality, WitnessExamples) {
  EXPECT_EQ(witness(1.0, 0.9).classification, Verdict::kNonclassicalGaussianPossible);
  EXPECT_EQ(witness(1.0, 0.5).classification, Verdict::kNonGaussianCertified);
  EXPECT_EQ(witness(1.0, 1.5).classification, Verdict::kClassicalPossible);
  EXPECT_EQ(witness(0.01, 0.001).classification, Verdict::kNonclassicalGaussianPossible);
  EXPECT_EQ(witness(2.0, 1.2).classification, Verdict::kClassicalPossible);
  EXPECT_NEAR(witness(1.0, 0.9).gaussian_bound, r_opt_pure(1.0).g2_min, 1e-15);
  // Impurity raises the bound.
  EXPECT_GT(witness(1.0, 0.9, 1e-3, 0.1).gaussian_bound, witness(1.0, 0.9).gaussian_bound);
}

TEST(Optimality, WitnessToleranceBand) {
  const double bound = r_opt_pure(1.0).g2_min;
  EXPECT_EQ(witness(1.0, bound - 5e-4).classification, Verdict::kNonclassicalGaussianPossible);
  EXPECT_EQ(witness(1.0, bound - 2e-3).classification, Verdict::kNonGaussianCertified);
  EXPECT_EQ(witness(1.0, bound - 5e-4, 1e-4).classification, Verdict::kNonGaussianCertified);
}

TEST(OptimalityProperty, WitnessIsMonotone) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::kClassicalPossible: return 0;
      case Verdict::kNonclassicalGaussianPossible: return 1;
      case Verdict::kNonGaussianCertified: return 2;
    }
    return -1;
  };
  for (double a : {0.01, 0.2, 1.0, 4.0}) {
    for (double n : {0.0, 0.05}) {
      int last = 0;
      for (int i = 0; i <= 400; ++i) {
        const double g = 2.0 * (1.0 - i / 400.0);
        const int k = rank(witness(a, g, kDefaultWitnessTolerance, n).classification);
        EXPECT_GE(k, last) << "a=" << a << " g2=" << g;
        last = k;
      }
    }
  }
}

}  // namespace
}  // namespace g2kit::opt
