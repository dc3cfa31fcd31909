#include <benchmark/benchmark.h>

#include "ttw/builder.hpp"
#include "ttw/checker.hpp"
#include "ttw/solver.hpp"
#include "ttw/timing.hpp"

namespace {

ttw::SystemSpec pipeline_spec(ttw::TimeUs period) {
  ttw::SystemSpec spec;
  spec.synth.grid_us = 1000;
  spec.tasks = {{"sense", "s1", 1000}, {"ctrl", "c1", 1000}, {"act", "a1", 1000}};
  spec.messages = {{"m1"}, {"m2"}};
  spec.applications = {{"loop", period, period, {"sense", "ctrl", "act"}, {"m1", "m2"},
                        {{"sense", "m1", "ctrl"}, {"ctrl", "m2", "act"}}}};
  spec.modes = {{"normal", {"loop"}}};
  return spec;
}

void BM_RoundLength(benchmark::State& state) {
  ttw::NetworkParams p;
  p.hops = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ttw::t_round(p));
}
BENCHMARK(BM_RoundLength)->Arg(4)->Arg(8);

void BM_BuildInstance(benchmark::State& state) {
  const auto spec = pipeline_spec(200'000);
  const auto model = ttw::resolve_mode(spec, "normal");
  for (auto _ : state) {
    auto ilp = ttw::build_instance(model, static_cast<int>(state.range(0)), spec.network, spec.synth);
    benchmark::DoNotOptimize(ilp.instance.constraints.size());
  }
}
BENCHMARK(BM_BuildInstance)->Arg(1)->Arg(2)->Arg(3);

void BM_Synthesize(benchmark::State& state) {
  const auto spec = pipeline_spec(200'000);
  const auto model = ttw::resolve_mode(spec, "normal");
  for (auto _ : state) {
    auto result = ttw::synthesize(model, spec.network, spec.synth);
    benchmark::DoNotOptimize(result.rounds);
  }
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

void BM_Check(benchmark::State& state) {
  const auto spec = pipeline_spec(200'000);
  const auto model = ttw::resolve_mode(spec, "normal");
  const auto result = ttw::synthesize(model, spec.network, spec.synth);
  for (auto _ : state) {
    auto report = ttw::check(model, *result.schedule, spec.network);
    benchmark::DoNotOptimize(report.ok());
  }
}
BENCHMARK(BM_Check);

}  // namespace
BENCHMARK_MAIN();
