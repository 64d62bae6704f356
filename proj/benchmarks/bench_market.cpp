#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include <ratiomarket/engine.hpp>
#include <ratiomarket/market.hpp>
#include <ratiomarket/two_agent.hpp>

using namespace ratiomarket;

static void BM_TradingStep(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    CounterStream s(1);
    std::vector<AgentState> set(m);
    for (auto& a : set) a = {s.uniform(0.2, 1.0), s.uniform(1.0, 10.0), s.uniform(1.0, 10.0)};
    const MarketParams p{1.001, 4.0, 0.3};
    for (auto _ : state) {
        auto out = trading_step(set, p);
        benchmark::DoNotOptimize(out.price_ratio);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_TradingStep)->Arg(5)->Arg(40)->Arg(500);

static void BM_AmplificationA(benchmark::State& state) {
    double k1 = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(amplification_A(k1, 2.0, 10.0, 40.0, 4.0, 0.3));
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_AmplificationA);

static void BM_ScanA(benchmark::State& state) {
    ScanSpec spec;
    spec.alpha = 4.0;
    spec.beta = 0.3;
    spec.k_points = static_cast<std::size_t>(state.range(0));
    spec.s_points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(scan_A(spec).max_a);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(std::pow(state.range(0), 4)));
}
BENCHMARK(BM_ScanA)->Arg(5)->Arg(17)->Unit(benchmark::kMillisecond);

static void BM_SimulationStep(benchmark::State& state) {
    SimulationConfig c;
    c.scheme = FixedCount{static_cast<std::size_t>(state.range(0))};
    MarketSimulation sim(c, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_SimulationStep)->Arg(5)->Arg(40)->Arg(80);

static void BM_SimulationStepBinomial(benchmark::State& state) {
    SimulationConfig c;
    c.scheme = BinomialCount{500, 0.1};
    MarketSimulation sim(c, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_SimulationStepBinomial);
BENCHMARK_MAIN();
