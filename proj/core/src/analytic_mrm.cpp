#include "scalazone/analytic_mrm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalazone/error.hpp"

namespace scalazone {

namespace {

void check_times(double s, double z) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("service time s must be > 0");
    if (!(z >= 0.0) || !std::isfinite(z)) throw ValidationError("think time z must be >= 0");
}

}  // namespace

void MrmParams::validate() const {
    if (n < 1) throw ValidationError("population n must be >= 1, got " + std::to_string(n));
    check_times(s, z);
}

double MrmSolution::display_utilization() const { return std::clamp(u, 0.0, 1.0); }

std::vector<MrmSolution> solve_mrm(const MrmParams& params) {
    params.validate();
    std::vector<MrmSolution> out;
    out.reserve(static_cast<std::size_t>(params.n));
    double q_prev = 0.0;
    for (int k = 1; k <= params.n; ++k) {
        MrmSolution sol;
        sol.population = k;
        sol.r = params.s * (1.0 + q_prev);
        sol.x = k / (sol.r + params.z);
        sol.q = sol.x * sol.r;
        sol.u = sol.x * params.s;
        q_prev = sol.q;
        out.push_back(sol);
    }
    return out;
}

double sync_bound(const MrmParams& params) {
    params.validate();
    return params.n / (params.n * params.s + params.z);
}

double serial_fraction(double s, double z) {
    check_times(s, z);
    return s / (s + z);
}

double sync_capacity(int n, double s, double z) {
    const MrmParams at_n{n, s, z};
    const MrmParams at_one{1, s, z};
    return sync_bound(at_n) / sync_bound(at_one);
}

double gustafson_via_rescaling(int n, double s, double z) {
    check_times(s, z);
    if (n < 0) throw ValidationError("population must be >= 0");
    // n / (1 + a'(n - 1)) reduces to (s + n z) / (s + z); the factor n cancels,
    // so n = 0 takes the continuous limit s / (s + z).
    if (n == 0) return serial_fraction(s, z);
    const double alpha_scaled = s / (s + n * z);
    return n / (1.0 + alpha_scaled * (n - 1.0));
}

double sync_loaddep_wait(int n, double s, double c) {
    if (n < 1) throw ValidationError("population n must be >= 1");
    if (!(s > 0.0)) throw ValidationError("service time s must be > 0");
    if (!(c >= 0.0)) throw ValidationError("load coefficient c must be >= 0");
    return c * n * (n - 1.0) * s;
}

DerivedMetrics little_metrics(double cpu_parallel, double cpu_serial, double elapsed,
                              double completed, double population) {
    if (!(elapsed > 0.0)) throw ValidationError("elapsed time must be > 0");
    if (completed < 0.0 || cpu_parallel < 0.0 || cpu_serial < 0.0) {
        throw ValidationError("counters must be non-negative");
    }
    DerivedMetrics m;
    m.n_parallel = cpu_parallel / elapsed;
    m.n_serial = cpu_serial / elapsed;
    m.n_queue = population - m.n_parallel - m.n_serial;
    m.x = completed / elapsed;
    if (completed > 0.0) m.response = (m.n_queue + m.n_serial) / m.x;
    return m;
}

double round_display(double value) { return std::round(value * 100.0) / 100.0; }

}  // namespace scalazone
