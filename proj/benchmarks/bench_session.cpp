// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/session/session.hpp"

using namespace sciexp;
using nlohmann::json;

static void BM_ObserveEvolutionCall(benchmark::State& state) {
  const auto task = catalog::Catalog::builtin().task("mech/damped_duffing");
  session::Session s(task, 1);
  int i = 0;
  for (auto _ : state) {
    const json args{{"q0", 0.2}, {"q0_dot", 0.0}, {"result_label", "o" + std::to_string(i++)}};
    const auto r = s.execute({"c", "observe_evolution", args});
    if (!r.ok) {
      state.SkipWithError(r.text.c_str());
      break;
    }
  }
}
BENCHMARK(BM_ObserveEvolutionCall)->Unit(benchmark::kMillisecond);

static void BM_ScriptedAnalysis(benchmark::State& state) {
  const auto task = catalog::Catalog::builtin().task("mech/damped_duffing");
  session::Session s(task, 1);
  s.execute({"c", "observe_evolution", {{"q0", 0.2}, {"q0_dot", 0.0}, {"result_label", "obs"}}});
  const std::string code =
      "a = obs['array']\n"
      "v = (a[1:, 0] - a[:-1, 0]) / (obs['ts'][1] - obs['ts'][0])\n"
      "result = {'mean': jnp.mean(v), 'max': jnp.max(jnp.abs(v))}";
  int i = 0;
  for (auto _ : state) {
    const json args{{"code", code}, {"result_label", "r" + std::to_string(i++)}};
    const auto r = s.execute({"c", "execute_code", args});
    if (!r.ok) {
      state.SkipWithError(r.text.c_str());
      break;
    }
  }
}
BENCHMARK(BM_ScriptedAnalysis)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
