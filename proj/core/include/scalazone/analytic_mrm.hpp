#pragma once

/**
 * @file analytic_mrm.hpp
 * @brief Closed-form and exact solutions of the machine-repairman model (MRM).
 *
 * The MRM is a closed system of N requests, each alternating a think/parallel
 * period of mean Z with a visit to a single FIFO service station of mean
 * service time S. The helpers here cover the exact steady-state solution,
 * the synchronous-queueing lower bound and its relation to Amdahl's and
 * Gustafson's laws, and the Little's-law bookkeeping used to read simulator
 * counters.
 */

#include <optional>
#include <vector>

namespace scalazone {

/// Queueing inputs. Invariants: n >= 1, s > 0, z >= 0.
struct MrmParams {
    int n = 1;
    double s = 1.0;
    double z = 0.0;

    void validate() const;
};

struct MrmSolution {
    int population = 0;
    double x = 0.0;  ///< throughput
    double r = 0.0;  ///< residence time at the repair station
    double q = 0.0;  ///< mean number at the repair station (waiting + in service)
    double u = 0.0;  ///< x * s, unclamped

    /// Utilization clamped into [0, 1] for display.
    double display_utilization() const;
};

/// Exact solution for every population 1..params.n, in order.
///
/// Uses the closed single-queue recursion
///   r(k) = s (1 + q(k-1)),  x(k) = k / (r(k) + z),  q(k) = x(k) r(k),
/// starting from q(0) = 0.
std::vector<MrmSolution> solve_mrm(const MrmParams& params);

/// Synchronous-queueing lower bound on throughput, n / (n s + z).
double sync_bound(const MrmParams& params);

/// Serial fraction alpha = s / (s + z).
double serial_fraction(double s, double z);

/// sync_bound(n) / sync_bound(1). Identical to Amdahl's law with
/// alpha = serial_fraction(s, z).
double sync_capacity(int n, double s, double z);

/// Amdahl capacity after rescaling the think time z -> n z. Identical to
/// Gustafson's law with alpha = serial_fraction(s, z). Accepts n = 0.
double gustafson_via_rescaling(int n, double s, double z);

/// Quadratic waiting term c n (n - 1) s of the load-dependent repairman.
double sync_loaddep_wait(int n, double s, double c);

/// Mean occupancy of each stage derived from CPU accounting counters.
struct DerivedMetrics {
    double n_parallel = 0.0;
    double n_serial = 0.0;
    double n_queue = 0.0;
    double x = 0.0;
    /// Empty when nothing completed ("no throughput").
    std::optional<double> response;
};

/// Applies Little's law to raw counters: occupancy = CPU-seconds / elapsed,
/// the queue gets whatever population is left over, and the serial-path
/// response time is (n_queue + n_serial) / x.
DerivedMetrics little_metrics(double cpu_parallel, double cpu_serial, double elapsed,
                              double completed, double population);

/// Rounds to two decimal places, the precision used when reporting
/// DerivedMetrics.
double round_display(double value);

}  // namespace scalazone
