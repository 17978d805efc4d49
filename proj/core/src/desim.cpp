#include "scalazone/desim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "scalazone/error.hpp"

namespace scalazone {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(const std::string& text, const std::string& context) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ValidationError("cannot parse number '" + text + "' in " + context);
    }
    if (used != text.size()) throw ValidationError("cannot parse number '" + text + "' in " + context);
    return value;
}

double sample(const Distribution& dist, std::mt19937_64& rng) {
    return std::visit(overloaded{[&](const Exponential& d) {
                                     return std::exponential_distribution<double>(1.0 / d.mean)(rng);
                                 },
                                 [](const Fixed& d) { return d.value; },
                                 [&](const Normal& d) {
                                     std::normal_distribution<double> normal(d.mean, d.sd);
                                     double v = normal(rng);
                                     while (v <= 0.0) v = normal(rng);
                                     return v;
                                 }},
                      dist.kind());
}

bool is_gate_mode(const SimMode& mode) {
    return std::holds_alternative<SyncGate>(mode) || std::holds_alternative<SyncGateLoadDep>(mode);
}

class Simulator {
public:
    Simulator(const SimConfig& config, std::ostream* trace)
        : cfg_(config),
          trace_(trace),
          rng_(config.seed),
          gate_mode_(is_gate_mode(config.mode)),
          batch_(std::holds_alternative<Batch>(config.mode)),
          free_cpus_(config.cpus()) {
        if (const auto* ld = std::get_if<SyncGateLoadDep>(&config.mode)) {
            load_coeff_ = ld->c;
            literal_queue_ = ld->literal_queue;
        }
    }

    SimMetrics run() {
        for (int id = 0; id < cfg_.population; ++id) enter_parallel(id);
        reschedule_parallel();
        audit();

        while (!events_.empty() && events_.top().time <= cfg_.horizon) {
            const Event e = events_.pop();
            if (e.kind == EventKind::ParallelDone && e.epoch != epoch_) continue;
            if (e.time < now_) ++metrics_.audit_violations;
            advance_to(e.time);
            ++metrics_.events;
            emit(e);
            if (e.kind == EventKind::ParallelDone) on_parallel_done(e);
            else on_service_done(e);
            audit();
        }
        advance_to(cfg_.horizon);
        return finish();
    }

private:
    struct Running {
        double vdone;
        std::uint64_t order;
        int id;
    };
    struct LaterRunning {
        bool operator()(const Running& a, const Running& b) const noexcept {
            return a.vdone != b.vdone ? a.vdone > b.vdone : a.order > b.order;
        }
    };

    std::size_t waiting() const noexcept { return serial_queue_.size() + gate_.size(); }

    void advance_to(double t) {
        const double lo = std::max(now_, cfg_.warmup);
        const double hi = std::min(t, cfg_.horizon);
        if (hi > lo) {
            const double dt = hi - lo;
            const double running = static_cast<double>(running_.size());
            const double active = suspended_ ? 0.0 : running;
            metrics_.cpu_parallel += active * dt;
            metrics_.idle_parallel += (cfg_.cpus() - active) * dt;
            if (busy_) metrics_.cpu_serial += dt;
            queue_area_ += static_cast<double>(waiting()) * dt;
            suspended_area_ += (suspended_ ? running : 0.0) * dt;
            cpu_wait_area_ += static_cast<double>(cpu_wait_.size()) * dt;
        }
        if (!suspended_) vclock_ += t - now_;
        now_ = t;
    }

    void enter_parallel(int id) {
        if (free_cpus_ == 0) {
            cpu_wait_.push_back(id);
            return;
        }
        --free_cpus_;
        running_.push({vclock_ + sample(cfg_.parallel_dist, rng_), run_order_++, id});
    }

    void reschedule_parallel() {
        if (suspended_ || running_.empty()) {
            if (scheduled_) ++epoch_;
            scheduled_ = false;
            return;
        }
        const Running& head = running_.top();
        const double at = now_ + std::max(0.0, head.vdone - vclock_);
        if (scheduled_ && scheduled_id_ == head.id && scheduled_time_ == at) return;
        ++epoch_;
        events_.push(at, EventKind::ParallelDone, head.id, epoch_);
        scheduled_ = true;
        scheduled_id_ = head.id;
        scheduled_time_ = at;
    }

    void on_parallel_done(const Event& e) {
        scheduled_ = false;
        if (running_.empty() || running_.top().id != e.request) ++metrics_.audit_violations;
        running_.pop();
        ++free_cpus_;
        if (!cpu_wait_.empty()) {
            const int next = cpu_wait_.front();
            cpu_wait_.pop_front();
            enter_parallel(next);
        }
        if (batch_) {
            gate_.push_back(e.request);
            if (static_cast<int>(gate_.size()) == cfg_.population) start_batch();
        } else {
            serial_queue_.push_back(e.request);
            if (!busy_) start_service();
        }
        reschedule_parallel();
    }

    void start_service() {
        const int id = serial_queue_.front();
        serial_queue_.pop_front();
        busy_ = true;
        in_service_ = 1;
        double service = sample(cfg_.serial_dist, rng_);
        if (load_coeff_ > 0.0) {
            const double q_load = literal_queue_ ? static_cast<double>(serial_queue_.size())
                                                 : static_cast<double>(cfg_.population - 1);
            service *= 1.0 + load_coeff_ * q_load;
        }
        if (gate_mode_) suspended_ = true;
        events_.push(now_ + service, EventKind::ServiceDone, id);
    }

    void start_batch() {
        batch_members_.assign(gate_.begin(), gate_.end());
        gate_.clear();
        busy_ = true;
        in_service_ = static_cast<int>(batch_members_.size());
        events_.push(now_ + sample(cfg_.serial_dist, rng_), EventKind::ServiceDone, -1);
    }

    void on_service_done(const Event& e) {
        busy_ = false;
        const int released = in_service_;
        in_service_ = 0;
        if (now_ > cfg_.warmup) metrics_.completed += static_cast<std::uint64_t>(released);
        if (batch_) {
            for (int id : batch_members_) enter_parallel(id);
            batch_members_.clear();
        } else {
            enter_parallel(e.request);
            if (!serial_queue_.empty()) start_service();
        }
        if (gate_mode_ && !busy_) suspended_ = false;
        reschedule_parallel();
    }

    void audit() {
        const std::size_t total =
            running_.size() + cpu_wait_.size() + waiting() + static_cast<std::size_t>(in_service_);
        if (total != static_cast<std::size_t>(cfg_.population)) ++metrics_.audit_violations;
        if (static_cast<int>(running_.size()) + free_cpus_ != cfg_.cpus()) ++metrics_.audit_violations;
    }

    void emit(const Event& e) {
        if (!trace_) return;
        *trace_ << std::setprecision(10) << e.time << '\t' << e.seq << '\t' << to_string(e.kind) << '\t'
                << e.request << '\t' << waiting() << '\n';
    }

    SimMetrics finish() {
        const double elapsed = cfg_.horizon - cfg_.warmup;
        metrics_.elapsed = elapsed;
        metrics_.mean_queue = queue_area_ / elapsed;
        metrics_.mean_suspended = suspended_area_ / elapsed;
        metrics_.mean_cpu_wait = cpu_wait_area_ / elapsed;
        metrics_.utilization = (metrics_.cpu_parallel + metrics_.cpu_serial) / (cfg_.cpus() * elapsed);
        metrics_.throughput = static_cast<double>(metrics_.completed) / elapsed;
        return metrics_;
    }

    const SimConfig& cfg_;
    std::ostream* trace_;
    std::mt19937_64 rng_;
    bool gate_mode_;
    bool batch_;
    double load_coeff_ = 0.0;
    bool literal_queue_ = false;

    EventQueue events_;
    double now_ = 0.0;
    double vclock_ = 0.0;
    bool suspended_ = false;

    std::priority_queue<Running, std::vector<Running>, LaterRunning> running_;
    std::uint64_t run_order_ = 0;
    int free_cpus_;
    std::deque<int> cpu_wait_;
    std::deque<int> serial_queue_;
    std::deque<int> gate_;
    std::vector<int> batch_members_;
    bool busy_ = false;
    int in_service_ = 0;

    std::uint64_t epoch_ = 0;
    bool scheduled_ = false;
    int scheduled_id_ = -1;
    double scheduled_time_ = 0.0;

    SimMetrics metrics_;
    double queue_area_ = 0.0;
    double suspended_area_ = 0.0;
    double cpu_wait_area_ = 0.0;
};

double metric_value(const SimMetrics& m, SweepMetric metric) {
    return metric == SweepMetric::Work ? (m.cpu_parallel + m.cpu_serial) / m.elapsed : m.throughput;
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments moments(std::span<const double> values) {
    Moments out;
    const double count = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (count - 1.0) / count);
    }
    return out;
}

}  // namespace

Distribution::Distribution(Exponential d) : kind_(d) {
    if (!(d.mean > 0.0) || !std::isfinite(d.mean)) throw ValidationError("exponential mean must be > 0");
}

Distribution::Distribution(Fixed d) : kind_(d) {
    if (!(d.value > 0.0) || !std::isfinite(d.value)) throw ValidationError("fixed value must be > 0");
}

Distribution::Distribution(Normal d) : kind_(d) {
    if (!(d.mean > 0.0) || !std::isfinite(d.mean)) throw ValidationError("normal mean must be > 0");
    if (!(d.sd >= 0.0) || !std::isfinite(d.sd)) throw ValidationError("normal sd must be >= 0");
}

Distribution Distribution::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ValidationError("distribution '" + text + "' must look like exp:<mean>, fixed:<value> or normal:<mean>,<sd>");
    }
    const std::string name = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);
    if (name == "exp") return Exponential{parse_number(args, text)};
    if (name == "fixed") return Fixed{parse_number(args, text)};
    if (name == "normal") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw ValidationError("normal distribution needs <mean>,<sd>: " + text);
        return Normal{parse_number(args.substr(0, comma), text), parse_number(args.substr(comma + 1), text)};
    }
    throw ValidationError("unknown distribution '" + name + "'");
}

double Distribution::mean() const noexcept {
    return std::visit(overloaded{[](const Exponential& d) { return d.mean; }, [](const Fixed& d) { return d.value; },
                                 [](const Normal& d) { return d.mean; }},
                      kind_);
}

std::string Distribution::to_string() const {
    std::ostringstream out;
    std::visit(overloaded{[&](const Exponential& d) { out << "exp:" << d.mean; },
                          [&](const Fixed& d) { out << "fixed:" << d.value; },
                          [&](const Normal& d) { out << "normal:" << d.mean << ',' << d.sd; }},
               kind_);
    return out.str();
}

std::string mode_name(const SimMode& mode) {
    return std::visit(overloaded{[](const Asynchronous&) { return std::string("async"); },
                                 [](const SyncGate&) { return std::string("syncgate"); },
                                 [](const Batch&) { return std::string("batch"); },
                                 [](const SyncGateLoadDep& m) {
                                     std::ostringstream out;
                                     out << "loaddep(c=" << m.c << (m.literal_queue ? ", literal" : "") << ')';
                                     return out.str();
                                 }},
                      mode);
}

void SimConfig::validate() const {
    if (population < 1) throw ValidationError("population must be >= 1");
    if (parallel_cpus && *parallel_cpus < 1) throw ValidationError("parallel_cpus must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be > 0");
    if (!(warmup >= 0.0) || !(warmup < horizon)) throw ValidationError("warmup must satisfy 0 <= warmup < horizon");
    if (const auto* ld = std::get_if<SyncGateLoadDep>(&mode); ld && !(ld->c >= 0.0)) {
        throw ValidationError("load-dependence coefficient c must be >= 0");
    }
    if (std::holds_alternative<Batch>(mode) && cpus() < population) {
        throw ValidationError("batch mode needs parallel_cpus >= population to synchronize");
    }
}

std::string serialize(const SimMetrics& m) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "elapsed=" << m.elapsed << '\n'
        << "completed=" << m.completed << '\n'
        << "cpu_parallel=" << m.cpu_parallel << '\n'
        << "cpu_serial=" << m.cpu_serial << '\n'
        << "idle_parallel=" << m.idle_parallel << '\n'
        << "mean_queue=" << m.mean_queue << '\n'
        << "mean_suspended=" << m.mean_suspended << '\n'
        << "mean_cpu_wait=" << m.mean_cpu_wait << '\n'
        << "utilization=" << m.utilization << '\n'
        << "throughput=" << m.throughput << '\n'
        << "events=" << m.events << '\n'
        << "audit_violations=" << m.audit_violations << '\n';
    return out.str();
}

std::string_view to_string(EventKind kind) {
    return kind == EventKind::ParallelDone ? "parallel_done" : "service_done";
}

std::uint64_t EventQueue::push(double time, EventKind kind, int request, std::uint64_t epoch) {
    const std::uint64_t seq = next_seq_++;
    heap_.push(Event{time, seq, kind, request, epoch});
    return seq;
}

Event EventQueue::pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
}

SimMetrics run_sim(const SimConfig& config, std::ostream* trace) {
    config.validate();
    return Simulator(config, trace).run();
}

bool queue_zero_check(const SimMetrics& metrics) { return metrics.mean_queue < 0.05; }

std::vector<SweepPoint> sweep(const SimConfig& base, std::span<const int> populations, const SweepOptions& options) {
    if (populations.empty()) throw ValidationError("sweep needs at least one population");
    if (options.replications < 1) throw ValidationError("replications must be >= 1");
    for (int n : populations) {
        if (n < 1) throw ValidationError("sweep populations must be >= 1");
    }

    std::vector<int> points(populations.begin(), populations.end());
    points.push_back(1);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    const std::size_t reps = static_cast<std::size_t>(options.replications);
    const std::size_t jobs = points.size() * reps;
    std::vector<SimMetrics> results(jobs);
    std::vector<std::exception_ptr> errors(jobs);

    auto run_job = [&](std::size_t job) {
        const int n = points[job / reps];
        const std::uint64_t r = job % reps;
        SimConfig cfg = base;
        cfg.population = n;
        cfg.parallel_cpus = n;
        cfg.seed = base.seed + r + (options.seeds == SeedPolicy::PerPoint ? 1000003ULL * static_cast<std::uint64_t>(n) : 0);
        try {
            results[job] = run_sim(cfg);
        } catch (...) {
            errors[job] = std::current_exception();
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t job = next++; job < jobs; job = next++) run_job(job);
        });
    }
    for (std::size_t job = next++; job < jobs; job = next++) run_job(job);
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    std::vector<SweepPoint> all(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<double> rates, utils;
        for (std::size_t r = 0; r < reps; ++r) {
            rates.push_back(metric_value(results[i * reps + r], options.metric));
            utils.push_back(results[i * reps + r].utilization);
        }
        const Moments m = moments(rates);
        all[i].population = points[i];
        all[i].mean_rate = m.mean;
        all[i].rate_se = m.se;
        all[i].mean_utilization = moments(utils).mean;
    }

    const SweepPoint& unit = all.front();
    if (!(unit.mean_rate > 0.0)) throw NumericError("sweep: population 1 produced no throughput");
    std::vector<SweepPoint> out;
    for (auto p : all) {
        if (std::find(populations.begin(), populations.end(), p.population) == populations.end()) continue;
        p.speedup = p.mean_rate / unit.mean_rate;
        if (p.population == 1) {
            p.speedup_se = unit.rate_se / unit.mean_rate;
        } else {
            const double rel_n = p.mean_rate > 0.0 ? p.rate_se / p.mean_rate : 0.0;
            const double rel_1 = unit.rate_se / unit.mean_rate;
            p.speedup_se = p.speedup * std::sqrt(rel_n * rel_n + rel_1 * rel_1);
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace scalazone
