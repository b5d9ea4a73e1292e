// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sciexp/numerics/rk4.hpp"
#include "sciexp/numerics/spin.hpp"
#include "sciexp/numerics/split_step.hpp"

using namespace sciexp;
using namespace sciexp::numerics;

static void BM_Rk4DampedPendulum(benchmark::State& state) {
  auto rhs = [](std::span<const double> X, double, std::span<const double> p, std::span<double> d) {
    d[0] = X[1];
    d[1] = -p[0] * std::sin(X[0]) - p[1] * X[1];
  };
  const std::vector<double> x0{1.0, 0.0}, params{9.81, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(rk4_solve(x0, rhs, params, 1e-3, 20.0));
  state.SetItemsProcessed(state.iterations() * 20001);
}
BENCHMARK(BM_Rk4DampedPendulum)->Unit(benchmark::kMillisecond);

static void BM_SplitStepNls(benchmark::State& state) {
  const auto g = LatticeGrid::standard();
  std::vector<Complex> phi(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) phi[j] = std::exp(-g.x[j] * g.x[j]);
  RealSpacePropagator pot = [](std::span<const Complex> p, std::span<const double>, double, double dt) {
    std::vector<Complex> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::exp(Complex(0, std::norm(p[i]) * dt)) * p[i];
    return out;
  };
  FourierSpacePropagator kin = [](std::span<const Complex> p, std::span<const double> k, double, double dt) {
    std::vector<Complex> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::exp(Complex(0, -(1 - std::cos(k[i])) * dt)) * p[i];
    return out;
  };
  const auto ts = uniform_times(20.0, 200);
  const auto sub = substeps_for(ts, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(split_step_evolve(phi, pot, kin, g, ts, sub));
}
BENCHMARK(BM_SplitStepNls)->Unit(benchmark::kMillisecond);

static SpinOperator tfi_chain(std::size_t n) {
  const auto s = pauli_set(n);
  SparseOperator h(std::size_t(1) << n, std::size_t(1) << n);
  for (std::size_t j = 0; j + 1 < n; ++j) h -= s[2][j] * s[2][j + 1];
  for (std::size_t j = 0; j < n; ++j) h -= 0.7 * s[0][j];
  return make_hermitian_operator(h, n);
}

static void BM_GroundStateTfi(benchmark::State& state) {
  const auto h = tfi_chain(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h));
}
BENCHMARK(BM_GroundStateTfi)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_EvolveStateTfi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto h = tfi_chain(n);
  const std::vector<std::array<double, 3>> bloch(n, {0.0, 0.0, 1.0});
  const auto psi = product_state(bloch);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_state(h, psi, 5.0, 0.05));
}
BENCHMARK(BM_EvolveStateTfi)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
