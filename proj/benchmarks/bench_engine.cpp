#include "bisched/engine.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace bisched;

Scenario saturated_video(SchedulerPolicy policy) {
    Scenario sc;
    sc.duration = 100'000;
    sc.scheduler.policy = policy;
    FlowSpec f;
    f.flow_id = 1;
    f.ac = AccessCategory::Video;
    f.saturated = true;
    sc.flows = {f};
    return sc;
}

void BM_SaturatedVideo(benchmark::State& state) {
    const auto sc = saturated_video(static_cast<SchedulerPolicy>(state.range(0)));
    for (auto _ : state) {
        auto report = run(sc, 1);
        benchmark::DoNotOptimize(report.transmissions);
    }
}
BENCHMARK(BM_SaturatedVideo)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_UnsaturatedMixed(benchmark::State& state) {
    auto sc = unsaturated_mixed_scenario();
    sc.duration = 200'000;
    for (auto _ : state) {
        auto report = run(sc, 7);
        benchmark::DoNotOptimize(report.transmissions);
    }
}
BENCHMARK(BM_UnsaturatedMixed)->Unit(benchmark::kMillisecond);

}  // namespace
