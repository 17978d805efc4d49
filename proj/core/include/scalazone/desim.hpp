#pragma once

/**
 * @file desim.hpp
 * @brief Discrete-event simulator of the closed machine-repairman system.
 *
 * A fixed population of requests alternates a parallel phase (one CPU each,
 * drawn from a pool of parallel CPUs) with a serial phase at a single
 * server. Four modes change how the two phases interact:
 *
 *  - Asynchronous: the standard repairman. Requests queue FIFO for the
 *    serial server independently of each other.
 *  - SyncGate: while the serial server is busy, every parallel request is
 *    frozen. Remaining parallel time is kept, not resampled, so elapsed time
 *    stretches while consumed CPU time does not.
 *  - Batch: requests wait at a gate until the whole population is present,
 *    then the batch gets one serial draw on one CPU and is released at once.
 *  - SyncGateLoadDep: SyncGate with each serial draw inflated by
 *    (1 + c * q_load).
 *
 * A run is strictly sequential and fully determined by its SimConfig.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace scalazone {

struct Exponential {
    double mean = 1.0;
};
struct Fixed {
    double value = 1.0;
};
/// Truncated at zero by resampling.
struct Normal {
    double mean = 1.0;
    double sd = 0.0;
};

class Distribution {
public:
    using Variant = std::variant<Exponential, Fixed, Normal>;

    Distribution() : Distribution(Fixed{1.0}) {}
    Distribution(Exponential d);
    Distribution(Fixed d);
    Distribution(Normal d);

    /// Parses `exp:<mean>`, `fixed:<value>` or `normal:<mean>,<sd>`.
    static Distribution parse(const std::string& text);

    double mean() const noexcept;
    const Variant& kind() const noexcept { return kind_; }
    std::string to_string() const;

private:
    Variant kind_;
};

struct Asynchronous {};
struct SyncGate {};
struct Batch {};
struct SyncGateLoadDep {
    double c = 0.0;
    /// When set, q_load is the literal number waiting at the serial queue
    /// instead of population - 1.
    bool literal_queue = false;
};

using SimMode = std::variant<Asynchronous, SyncGate, Batch, SyncGateLoadDep>;

std::string mode_name(const SimMode& mode);

struct SimConfig {
    int population = 1;
    std::optional<int> parallel_cpus;  ///< defaults to population
    Distribution parallel_dist = Exponential{0.9};
    Distribution serial_dist = Exponential{0.1};
    SimMode mode = Asynchronous{};
    double horizon = 3000.0;
    double warmup = 0.0;
    std::uint64_t seed = 0;

    int cpus() const noexcept { return parallel_cpus.value_or(population); }
    /// Throws ValidationError on any violated invariant.
    void validate() const;
};

struct SimMetrics {
    double elapsed = 0.0;
    std::uint64_t completed = 0;
    double cpu_parallel = 0.0;
    double cpu_serial = 0.0;
    double idle_parallel = 0.0;  ///< idle parallel CPU-seconds (frozen requests count as idle)
    double mean_queue = 0.0;     ///< waiting at the serial station (or batch gate), not in service
    double mean_suspended = 0.0; ///< requests frozen mid-parallel-phase by the sync gate
    double mean_cpu_wait = 0.0;  ///< requests waiting for a free parallel CPU
    double utilization = 0.0;
    double throughput = 0.0;
    std::uint64_t events = 0;
    std::uint64_t audit_violations = 0;

    friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

/// Serializes every field with round-trip precision, one `key=value` per line.
std::string serialize(const SimMetrics& metrics);

enum class EventKind : std::uint8_t { ParallelDone, ServiceDone };

std::string_view to_string(EventKind kind);

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ParallelDone;
    int request = -1;
    std::uint64_t epoch = 0;
};

/// Future-event list ordered by (time, insertion sequence).
class EventQueue {
public:
    std::uint64_t push(double time, EventKind kind, int request, std::uint64_t epoch = 0);
    Event pop();
    const Event& top() const { return heap_.top(); }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

/// Runs one replication. When `trace` is non-null, writes one tab-separated
/// line per dispatched event: time, seq, kind, request_id, queue_len.
SimMetrics run_sim(const SimConfig& config, std::ostream* trace = nullptr);

/// True iff the time-averaged serial queue is below 0.05 requests.
bool queue_zero_check(const SimMetrics& metrics);

enum class SweepMetric {
    Completions,  ///< serial-path completions per second
    Work,         ///< delivered CPU-seconds per second (parallel + serial)
};

enum class SeedPolicy {
    Common,    ///< replication r uses base_seed + r at every population
    PerPoint,  ///< additionally offset by the population, decorrelating points
};

struct SweepOptions {
    int replications = 1;
    SeedPolicy seeds = SeedPolicy::Common;
    SweepMetric metric = SweepMetric::Completions;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct SweepPoint {
    int population = 0;
    double mean_rate = 0.0;  ///< mean of the selected metric over replications
    double rate_se = 0.0;
    double speedup = 0.0;  ///< mean_rate / mean_rate at population 1
    double speedup_se = 0.0;
    double mean_utilization = 0.0;
};

/// Runs every population (with parallel_cpus = population) for the requested
/// replications and normalizes by the population-1 mean, running population
/// 1 even if it was not requested. Output is ascending in population and
/// independent of thread scheduling.
std::vector<SweepPoint> sweep(const SimConfig& base, std::span<const int> populations,
                              const SweepOptions& options);

}  // namespace scalazone
