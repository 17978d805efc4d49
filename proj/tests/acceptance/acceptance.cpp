// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scalazone/analytic_mrm.hpp"
#include "scalazone/capacity_models.hpp"
#include "scalazone/desim.hpp"
#include "scalazone/fitting.hpp"
#include "scalazone/zones.hpp"

using namespace scalazone;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

SimConfig exp_config(SimMode mode) {
    SimConfig c;
    c.population = 1;
    c.parallel_dist = Exponential{0.9};
    c.serial_dist = Exponential{0.1};
    c.mode = mode;
    c.horizon = 3000.0;
    c.warmup = 0.0;
    c.seed = 1;
    return c;
}

SweepOptions reps(int r, SweepMetric metric = SweepMetric::Completions) {
    SweepOptions o;
    o.replications = r;
    o.metric = metric;
    return o;
}

std::vector<int> range(int lo, int hi, int step = 1) {
    std::vector<int> out;
    for (int n = lo; n <= hi; n += step) out.push_back(n);
    return out;
}

const std::vector<int> kCheckpoints{2, 5, 10, 20, 50, 100};

Outcome worked_examples() {
    struct Case {
        const char* name;
        double cp, cs, el, done, pop;
        double np, ns, nq, r;
    };
    const Case cases[] = {
        {"repairman", 27206, 2999, 3000, 30118, 100, 9.07, 1.00, 89.93, 9.06},
        {"sync", 24842, 2750, 3000, 27624, 100, 8.28, 0.92, 90.80, 9.96},
        {"batch", 270033, 299, 3000, 299608, 100, 90.0, 0.10, 9.9, 0.10},
    };
    Outcome o;
    const double tol = 0.01 + 1e-9;
    for (const auto& c : cases) {
        const auto m = little_metrics(c.cp, c.cs, c.el, c.done, c.pop);
        const double np = round_display(m.n_parallel), ns = round_display(m.n_serial);
        const double nq = round_display(m.n_queue), r = round_display(m.response.value_or(-1));
        o.detail << ' ' << c.name << '=' << np << '/' << ns << '/' << nq << '/' << r;
        o.check(std::abs(np - c.np) <= tol && std::abs(ns - c.ns) <= tol && std::abs(nq - c.nq) <= tol &&
                    std::abs(r - c.r) <= tol,
                c.name);
    }
    return o;
}

Outcome async_vs_analytic() {
    Outcome o;
    double x = 0, u = 0, q = 0;
    SimConfig cfg = exp_config(Asynchronous{});
    cfg.population = 100;
    constexpr int kReps = 5;
    for (int r = 0; r < kReps; ++r) {
        SimConfig run = cfg;
        run.seed = cfg.seed + static_cast<std::uint64_t>(r);
        const auto m = run_sim(run);
        x += m.throughput / kReps;
        u += m.utilization / kReps;
        q += m.mean_queue / kReps;
    }
    o.detail << " X=" << x << " U=" << 100 * u << "% Q=" << q;
    o.check(std::abs(x - 10.0) <= 0.3, "throughput");
    o.check(std::abs(100 * u - 10.0) <= 1.0, "utilization");
    o.check(std::abs(q - 89.9) <= 2.0, "mean queue");

    const auto mrm = solve_mrm({100, 0.1, 0.9});
    const auto points = sweep(cfg, kCheckpoints, reps(kReps));
    double worst = 0.0;
    for (const auto& p : points) {
        const double exact = mrm[static_cast<std::size_t>(p.population - 1)].x / mrm[0].x;
        const double z = std::abs(p.speedup - exact) / p.speedup_se;
        worst = std::max(worst, z);
        o.check(z <= 3.0, "N=" + std::to_string(p.population) + " vs exact");
    }
    o.detail << " max|z|=" << worst;
    return o;
}

Outcome syncgate_vs_amdahl() {
    Outcome o;
    const auto points = sweep(exp_config(SyncGate{}), kCheckpoints, reps(5));
    const Amdahl amdahl(0.1);
    double worst = 0.0;
    for (const auto& p : points) {
        const double rel = std::abs(p.speedup / eval_capacity(amdahl, p.population) - 1.0);
        worst = std::max(worst, rel);
        o.check(rel <= 0.05, "N=" + std::to_string(p.population));
        o.check(p.speedup <= 10.0, "asymptote at N=" + std::to_string(p.population));
    }
    o.detail << " max rel err=" << 100 * worst << "% C(100)=" << points.back().speedup;
    return o;
}

Outcome gustafson_batch() {
    Outcome o;
    SimConfig cfg = exp_config(Batch{});
    cfg.parallel_dist = Fixed{0.9};
    std::vector<int> pops{1};
    for (int n = 10; n <= 100; n += 10) pops.push_back(n);
    const auto points = sweep(cfg, pops, reps(5, SweepMetric::Work));
    CapacitySeries s;
    for (const auto& p : points) s.push_back({double(p.population), p.speedup});
    const auto lf = fit_linear(s);
    const double u100 = points.back().mean_utilization;
    o.detail << " slope=" << lf.slope << " intercept=" << lf.intercept << " R2=" << lf.r_squared.value_or(-1)
             << " U(100)=" << 100 * u100 << '%';
    o.check(std::abs(lf.slope - 0.909) <= 0.02, "slope");
    o.check(std::abs(lf.intercept - 0.10) <= 0.05, "intercept");
    o.check(lf.r_squared && *lf.r_squared >= 0.99, "R2");
    o.check(u100 >= 0.88 && u100 <= 0.92, "utilization");
    return o;
}

Outcome retrograde(const SimConfig& cfg, double min_r2) {
    Outcome o;
    const auto pops = range(1, 100);
    const auto points = sweep(cfg, pops, reps(5));
    const auto best = std::max_element(points.begin(), points.end(),
                                       [](const SweepPoint& a, const SweepPoint& b) { return a.speedup < b.speedup; });
    CapacitySeries s;
    for (const auto& p : points) s.push_back({double(p.population), p.speedup});
    const auto fit = fit_usl(s);
    const auto& usl = std::get<Usl>(fit.model);
    o.detail << " argmax N=" << best->population << " C(max)=" << best->speedup << " C(100)=" << points.back().speedup
             << " alpha=" << usl.alpha() << " beta=" << usl.beta() << " R2=" << fit.r_squared.value_or(-1);
    o.check(best->population > 1 && best->population < 100, "interior maximum");
    o.check(fit.r_squared && *fit.r_squared >= min_r2, "R2");
    o.check(usl.alpha() >= 0.08 && usl.alpha() <= 0.12, "alpha");
    o.check(usl.beta() > 0.0, "beta");
    return o;
}

Outcome usl_simulation() { return retrograde(exp_config(SyncGateLoadDep{0.001, false}), 0.99); }

Outcome generalized_distributions() {
    SimConfig cfg = exp_config(SyncGateLoadDep{0.001, false});
    cfg.parallel_dist = Fixed{0.9};
    cfg.serial_dist = Normal{0.1, 0.02};
    return retrograde(cfg, 0.98);
}

bool recovered(double fitted, double truth) {
    return truth == 0.0 ? std::abs(fitted) <= 1e-9 : std::abs(fitted - truth) <= 1e-6 * truth;
}

Outcome fit_round_trip() {
    Outcome o;
    int grid_total = 0, grid_ok = 0;
    for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 100; ++j) {
            const double a = 0.05 * i, b = 1e-4 * j;
            CapacitySeries s;
            for (int n = 1; n <= 100; ++n) s.push_back({double(n), n / (1.0 + a * (n - 1) + b * n * (n - 1))});
            const auto f = fit_usl(s);
            const auto& u = std::get<Usl>(f.model);
            ++grid_total;
            if (recovered(u.alpha(), a) && recovered(u.beta(), b)) ++grid_ok;
        }
    }
    o.detail << " noiseless " << grid_ok << '/' << grid_total;
    o.check(grid_ok == grid_total, "noiseless grid");

    constexpr double ta = 0.18169, tb = 0.00047;
    int noisy_ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(trial));
        std::normal_distribution<double> noise(0.0, 0.02);
        CapacitySeries s;
        for (int n = 1; n <= 99; n += 2) {
            double c = n / (1.0 + ta * (n - 1) + tb * n * (n - 1));
            if (n > 1) c *= 1.0 + noise(rng);
            s.push_back({double(n), c});
        }
        const auto& u = std::get<Usl>(fit_usl(s).model);
        if (std::abs(u.alpha() - ta) <= 0.02 && std::abs(u.beta() - tb) <= 2e-4) ++noisy_ok;
    }
    o.detail << ", noisy " << noisy_ok << "/100";
    o.check(noisy_ok >= 95, "noisy recovery");
    return o;
}

Outcome property_suites() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> time(0.001, 10.0);

    bool bound_ok = true, identity_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const double s = time(rng), z = time(rng);
        const auto exact = solve_mrm({500, s, z});
        const Amdahl amdahl(serial_fraction(s, z));
        const Gustafson gustafson(serial_fraction(s, z));
        for (int n = 1; n <= 500; ++n) {
            if (sync_bound({n, s, z}) > exact[static_cast<std::size_t>(n - 1)].x * (1.0 + 1e-12)) bound_ok = false;
            if (std::abs(sync_capacity(n, s, z) - eval_capacity(amdahl, n)) > 1e-9) identity_ok = false;
            if (std::abs(gustafson_via_rescaling(n, s, z) - eval_capacity(gustafson, n)) > 1e-9) identity_ok = false;
        }
    }
    o.check(bound_ok, "sync bound");
    o.check(identity_ok, "amdahl/gustafson identities");

    // Zones: every grid point gets exactly one label consistent with its position.
    bool zones_ok = true;
    const ZoneBounds b(0.18169, 0.00047);
    for (int n = 1; n <= 100; ++n) {
        const double upper = b.upper(n), middle = b.middle(n), lower = b.lower(n);
        for (int k = 1; k <= 60; ++k) {
            const double c = 1.1 * upper * k / 60.0;
            const auto label = classify_point(n, c, b);
            ZoneLabel expect;
            if (c > upper * (1.0 + kDefaultZoneEps)) expect = ZoneLabel::Superlinear;
            else if (c <= lower * (1.0 + 1e-9)) expect = ZoneLabel::C;
            else if (c <= middle * (1.0 + 1e-9)) expect = ZoneLabel::B;
            else expect = ZoneLabel::A;
            if (label != expect) zones_ok = false;
        }
        if (n > 1 && classify_point(n, upper, b) != ZoneLabel::A) zones_ok = false;
        if (n > 1 && classify_point(n, middle, b) != ZoneLabel::B) zones_ok = false;
        if (n > 1 && classify_point(n, lower, b) != ZoneLabel::C) zones_ok = false;
    }
    o.check(zones_ok, "zone partition");

    bool det_ok = true;
    for (SimMode mode : {SimMode{Asynchronous{}}, SimMode{SyncGate{}}, SimMode{Batch{}},
                         SimMode{SyncGateLoadDep{0.001, false}}}) {
        SimConfig cfg = exp_config(mode);
        cfg.population = 30;
        cfg.horizon = 500.0;
        if (serialize(run_sim(cfg)) != serialize(run_sim(cfg))) det_ok = false;
    }
    o.check(det_ok, "determinism");

    bool peak_ok = true;
    std::uniform_real_distribution<double> alpha(0.0, 0.9), log_beta(-5.0, -1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = alpha(rng), bb = std::pow(10.0, log_beta(rng));
        const double peak = *usl_peak(UslParams(a, bb));
        if (peak > 999.0) continue;
        const Usl usl(a, bb);
        int arg = 1;
        for (int n = 2; n <= 1000; ++n) {
            if (eval_capacity(usl, n) > eval_capacity(usl, arg)) arg = n;
        }
        if (std::abs(peak - arg) > 1.0) peak_ok = false;
    }
    o.check(peak_ok, "usl peak");
    o.detail << " bound=" << bound_ok << " identities=" << identity_ok << " zones=" << zones_ok
             << " determinism=" << det_ok << " peak=" << peak_ok;
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"worked-example arithmetic", worked_examples},
        {"asynchronous simulation vs analytics", async_vs_analytic},
        {"sync gate vs Amdahl", syncgate_vs_amdahl},
        {"Gustafson batch simulation", gustafson_batch},
        {"USL simulation", usl_simulation},
        {"generalized distributions", generalized_distributions},
        {"fit round-trip", fit_round_trip},
        {"property suites", property_suites},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %d %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
