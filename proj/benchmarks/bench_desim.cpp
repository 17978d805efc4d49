#include <benchmark/benchmark.h>

#include "scalazone/analytic_mrm.hpp"
#include "scalazone/desim.hpp"

using namespace scalazone;

static void BM_RunSim(benchmark::State& state, SimMode mode) {
    SimConfig cfg;
    cfg.population = static_cast<int>(state.range(0));
    cfg.mode = mode;
    cfg.horizon = 500.0;
    cfg.seed = 1;
    std::uint64_t events = 0;
    for (auto _ : state) {
        const auto m = run_sim(cfg);
        events += m.events;
        benchmark::DoNotOptimize(m.throughput);
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_RunSim, async, SimMode{Asynchronous{}})->Arg(10)->Arg(100);
BENCHMARK_CAPTURE(BM_RunSim, syncgate, SimMode{SyncGate{}})->Arg(10)->Arg(100);
BENCHMARK_CAPTURE(BM_RunSim, batch, SimMode{Batch{}})->Arg(10)->Arg(100);
BENCHMARK_CAPTURE(BM_RunSim, loaddep, SimMode{SyncGateLoadDep{0.001, false}})->Arg(10)->Arg(100);

static void BM_SolveMrm(benchmark::State& state) {
    const MrmParams p{static_cast<int>(state.range(0)), 0.1, 0.9};
    for (auto _ : state) benchmark::DoNotOptimize(solve_mrm(p).back().x);
}
BENCHMARK(BM_SolveMrm)->Arg(100)->Arg(10000);
