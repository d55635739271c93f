#include <benchmark/benchmark.h>

#include "aoisched/bandit_sim.hpp"
#include "aoisched/flsim.hpp"
#include "aoisched/presets.hpp"

namespace aoisched {
namespace {

void BM_GlrStatistic(benchmark::State& state) {
  Rng rng(1);
  GlrDetector d(0.001);
  for (int i = 0; i < state.range(0); ++i) d.push(rng.bernoulli(0.4));
  for (auto _ : state) benchmark::DoNotOptimize(d.statistic());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GlrStatistic)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_MExp3Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MExp3 s(n, 2, 0.5);
  Rng rng(2);
  Round t = 0;
  for (auto _ : state) {
    const auto d = s.select(rng, ++t);
    const auto& combo = s.combos()[d.super_arm];
    const ChannelFeedback fb[2] = {{combo[0], static_cast<std::uint8_t>(rng.bernoulli(0.5))},
                                   {combo[1], static_cast<std::uint8_t>(rng.bernoulli(0.5))}};
    s.update(d.super_arm, fb);
  }
  state.counters["super_arms"] = static_cast<double>(s.combo_count());
}
BENCHMARK(BM_MExp3Step)->Arg(5)->Arg(10)->Arg(30);

void BM_BanditRun(benchmark::State& state) {
  const auto config = make_preset("fig2a");
  const auto env = build_environment(config.env);
  const auto& policy = config.variants[static_cast<std::size_t>(state.range(0))].policy;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_bandit(env, policy, 2, seed++).final_regret());
  state.SetLabel(policy.label());
  state.SetItemsProcessed(state.iterations() * env.horizon());
}
BENCHMARK(BM_BanditRun)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_FederatedRound(benchmark::State& state) {
  const auto config = make_preset("fl-piecewise");
  const auto env = build_environment(config.env);
  const auto& v = config.variants[0];
  for (auto _ : state) {
    state.PauseTiming();
    FederatedRun run(env, v.policy, v.matching, config.fl, config.clients, 1);
    state.ResumeTiming();
    for (int i = 0; i < 10; ++i) benchmark::DoNotOptimize(run.run_round().accuracy);
  }
  state.SetLabel(v.label);
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_FederatedRound)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace aoisched

BENCHMARK_MAIN();
