#include <gtest/gtest.h>

#include <sstream>

#include "scalazone/analytic_mrm.hpp"
#include "scalazone/desim.hpp"
#include "scalazone/error.hpp"

using namespace scalazone;

namespace {

SimConfig base_config(int n, SimMode mode = Asynchronous{}) {
    SimConfig c;
    c.population = n;
    c.mode = mode;
    c.horizon = 500.0;
    c.seed = 42;
    return c;
}

}  // namespace

TEST(Distribution, ParseAndMean) {
    EXPECT_DOUBLE_EQ(Distribution::parse("exp:0.9").mean(), 0.9);
    EXPECT_DOUBLE_EQ(Distribution::parse("fixed:0.1").mean(), 0.1);
    EXPECT_DOUBLE_EQ(Distribution::parse("normal:0.1,0.02").mean(), 0.1);
    EXPECT_THROW(Distribution::parse("gamma:1"), ValidationError);
    EXPECT_THROW(Distribution::parse("exp:-1"), ValidationError);
}

TEST(EventQueue, OrdersByTimeThenSequence) {
    EventQueue q;
    q.push(2.0, EventKind::ServiceDone, 1);
    q.push(1.0, EventKind::ParallelDone, 2);
    q.push(1.0, EventKind::ParallelDone, 3);
    EXPECT_EQ(q.pop().request, 2);
    EXPECT_EQ(q.pop().request, 3);
    EXPECT_EQ(q.pop().request, 1);
    EXPECT_TRUE(q.empty());
}

TEST(RunSim, DeterministicForSeed) {
    for (SimMode mode : {SimMode{Asynchronous{}}, SimMode{SyncGate{}}, SimMode{Batch{}},
                         SimMode{SyncGateLoadDep{0.001, false}}}) {
        const auto cfg = base_config(20, mode);
        EXPECT_EQ(serialize(run_sim(cfg)), serialize(run_sim(cfg))) << mode_name(mode);
        auto other = cfg;
        other.seed = 43;
        EXPECT_NE(serialize(run_sim(cfg)), serialize(run_sim(other))) << mode_name(mode);
    }
}

TEST(RunSim, ConservationAndCpuAccounting) {
    for (SimMode mode : {SimMode{Asynchronous{}}, SimMode{SyncGate{}}, SimMode{Batch{}},
                         SimMode{SyncGateLoadDep{0.01, true}}}) {
        for (int n : {1, 3, 25}) {
            const auto m = run_sim(base_config(n, mode));
            EXPECT_EQ(m.audit_violations, 0u) << mode_name(mode) << ' ' << n;
            EXPECT_NEAR(m.cpu_parallel + m.idle_parallel, n * m.elapsed, 1e-6 * n * m.elapsed)
                << mode_name(mode) << ' ' << n;
            EXPECT_LE(m.cpu_serial, m.elapsed + 1e-9);
            EXPECT_GT(m.completed, 0u);
        }
    }
}

TEST(RunSim, SinglePopulationHasNoWaiting) {
    for (SimMode mode : {SimMode{Asynchronous{}}, SimMode{SyncGate{}}}) {
        const auto m = run_sim(base_config(1, mode));
        EXPECT_NEAR(m.mean_queue, 0.0, 1e-12);
        EXPECT_TRUE(queue_zero_check(m));
    }
}

TEST(RunSim, AsyncMatchesExactRepairman) {
    auto cfg = base_config(10);
    cfg.horizon = 20000.0;
    const auto m = run_sim(cfg);
    const double exact = solve_mrm({10, 0.1, 0.9}).back().x;
    EXPECT_NEAR(m.throughput, exact, 0.03 * exact);
}

TEST(RunSim, AsyncLittleConsistency) {
    auto cfg = base_config(50);
    cfg.horizon = 5000.0;
    const auto m = run_sim(cfg);
    const auto d = little_metrics(m.cpu_parallel, m.cpu_serial, m.elapsed, double(m.completed), 50);
    EXPECT_NEAR(d.n_queue, m.mean_queue + m.mean_cpu_wait, 0.5);
}

TEST(RunSim, SyncGateKeepsQueueEmpty) {
    auto cfg = base_config(100, SyncGate{});
    const auto m = run_sim(cfg);
    EXPECT_TRUE(queue_zero_check(m));
    cfg.parallel_dist = Fixed{0.9};
    cfg.serial_dist = Fixed{0.1};
    EXPECT_TRUE(queue_zero_check(run_sim(cfg)));
}

TEST(RunSim, LoadDepWithZeroCoefficientEqualsSyncGate) {
    const auto gate = run_sim(base_config(30, SyncGate{}));
    const auto dep = run_sim(base_config(30, SyncGateLoadDep{0.0, false}));
    EXPECT_EQ(serialize(gate), serialize(dep));
}

TEST(RunSim, BatchNeedsOneCpuPerRequest) {
    auto cfg = base_config(10, Batch{});
    cfg.parallel_cpus = 5;
    EXPECT_THROW(run_sim(cfg), ValidationError);
}

TEST(RunSim, RejectsInvalidConfig) {
    auto cfg = base_config(0);
    EXPECT_THROW(run_sim(cfg), ValidationError);
    cfg = base_config(5);
    cfg.warmup = 600.0;
    EXPECT_THROW(run_sim(cfg), ValidationError);
}

TEST(RunSim, TraceFormat) {
    auto cfg = base_config(3);
    cfg.horizon = 5.0;
    std::ostringstream trace;
    const auto m = run_sim(cfg, &trace);
    std::istringstream lines(trace.str());
    std::string line;
    std::uint64_t count = 0;
    double last = 0.0;
    while (std::getline(lines, line)) {
        std::istringstream f(line);
        double t;
        std::uint64_t seq;
        std::string kind;
        int req, qlen;
        ASSERT_TRUE(f >> t >> seq >> kind >> req >> qlen) << line;
        EXPECT_TRUE(kind == "parallel_done" || kind == "service_done") << kind;
        EXPECT_GE(t, last);
        EXPECT_GE(req, 0);
        EXPECT_GE(qlen, 0);
        last = t;
        ++count;
    }
    EXPECT_GT(count, 0u);
    EXPECT_EQ(count, m.events);
}

TEST(Sweep, NormalizesToUnitLoadAndIsThreadInvariant) {
    SimConfig base = base_config(1);
    base.horizon = 300.0;
    const int pops[] = {2, 5, 10};
    SweepOptions one{2, SeedPolicy::Common, SweepMetric::Completions, 1};
    SweepOptions four = one;
    four.threads = 4;
    const auto a = sweep(base, pops, one);
    const auto b = sweep(base, pops, four);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].population, pops[i]);
        EXPECT_EQ(a[i].speedup, b[i].speedup);
        EXPECT_GT(a[i].speedup, 1.0);
    }
    const int with_one[] = {1, 4};
    const auto c = sweep(base, with_one, one);
    EXPECT_DOUBLE_EQ(c.front().speedup, 1.0);
}
