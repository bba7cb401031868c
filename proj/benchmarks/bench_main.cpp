#include <benchmark/benchmark.h>

#include "g2kit/dpa.hpp"
#include "g2kit/fock.hpp"
#include "g2kit/gaussian_core.hpp"
#include "g2kit/optimality.hpp"
#include "g2kit/two_cavity.hpp"

namespace {

using namespace g2kit;

void BM_G2Zero(benchmark::State& state) {
  const GaussianStateParams p(1.0, 0.3, 0.4, 0.6, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(g2_zero(p));
}
BENCHMARK(BM_G2Zero);

void BM_ROptThermal(benchmark::State& state) {
  double n = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(opt::r_opt(1.0, n));
    n = n < 0.1 ? n * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_ROptThermal);

void BM_DpaG2Tau(benchmark::State& state) {
  const dpa::DpaParams base(0.25, 1.0, 0.0);
  const auto p = base.with_alpha_mag(dpa::optimal_alpha(base));
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpa::g2_tau(p, tau));
    tau = tau < 10.0 ? tau + 0.01 : 0.0;
  }
}
BENCHMARK(BM_DpaG2Tau);

void BM_TwoCavityG2(benchmark::State& state) {
  const auto p = upb::TwoCavityParams::weak_drive_reference(0.04);
  for (auto _ : state) benchmark::DoNotOptimize(upb::g2_cavity1(p));
}
BENCHMARK(BM_TwoCavityG2)->Unit(benchmark::kMicrosecond);

void BM_FockTwoCavitySolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cfg = fock::default_config_two_cavity();
  cfg.cutoffs = {n, n};
  cfg.escalate = false;
  cfg.tail_tol = 1e-4;
  const fock::System sys = fock::TwoCavitySystem{upb::TwoCavityParams::weak_drive_reference(0.04)};
  for (auto _ : state) benchmark::DoNotOptimize(fock::g2_from_rho(fock::steady_state(sys, cfg), 0));
  state.counters["hilbert_dim"] = (n + 1) * (n + 1);
}
BENCHMARK(BM_FockTwoCavitySolve)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
