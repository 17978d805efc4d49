#include <benchmark/benchmark.h>

#include <random>

#include "scalazone/fitting.hpp"

using namespace scalazone;

namespace {

CapacitySeries noisy_usl(int points) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.02);
    CapacitySeries s;
    for (int n = 1; n <= points; ++n) {
        double c = n / (1.0 + 0.18169 * (n - 1) + 0.00047 * n * (n - 1));
        if (n > 1) c *= 1.0 + noise(rng);
        s.push_back({double(n), c});
    }
    return s;
}

}  // namespace

static void BM_FitUsl(benchmark::State& state) {
    const auto s = noisy_usl(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_usl(s).r_squared);
}
BENCHMARK(BM_FitUsl)->Arg(10)->Arg(100)->Arg(1000);

static void BM_FitAmdahl(benchmark::State& state) {
    const auto s = noisy_usl(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_amdahl(s).r_squared);
}
BENCHMARK(BM_FitAmdahl)->Arg(100);

static void BM_FitThreeParam(benchmark::State& state) {
    std::vector<Measurement> pts;
    for (int n = 2; n <= 100; n += 2) pts.push_back({double(n), 250.0 * n / (1.0 + 0.18169 * (n - 1) + 0.00047 * n * (n - 1))});
    const Dataset d(pts);
    for (auto _ : state) benchmark::DoNotOptimize(fit_with_baseline(d).scale);
}
BENCHMARK(BM_FitThreeParam);
