#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "scalazone/analytic_mrm.hpp"
#include "scalazone/capacity_models.hpp"
#include "scalazone/desim.hpp"
#include "scalazone/error.hpp"
#include "scalazone/fitting.hpp"
#include "scalazone/io.hpp"
#include "scalazone/zones.hpp"

namespace scalazone::cli {

namespace {

struct Common {
    std::string format = "table";
    std::string config;
};

struct FitArgs {
    std::string data;
    std::string model = "usl";
    std::optional<double> baseline;
    bool three_param = false;
    double tau = kDefaultClassThreshold;
};

struct SimArgs {
    std::string mode = "async";
    double c = 0.001;
    bool literal_queue = false;
    int n = 1;
    std::optional<int> cpus;
    std::string parallel = "exp:0.9";
    std::string serial = "exp:0.1";
    double horizon = 3000.0;
    double warmup = 0.0;
    std::uint64_t seed = 1;
    std::string trace;
};

struct SweepArgs {
    std::string populations;
    int reps = 1;
    std::string metric = "completions";
    std::string seed_policy = "common";
    unsigned threads = 0;
    std::string fit;
};

struct ZonesArgs {
    std::string data;
    std::optional<double> baseline;
    bool three_param = false;
    double eps = kDefaultZoneEps;
    double tau = kDefaultClassThreshold;
    bool independent_amdahl = false;
    std::string out;
};

struct CurveArgs {
    double alpha = 0.0;
    double beta = 0.0;
    int nmax = 100;
    bool gustafson = false;
    std::string out;
};

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

std::string fixed2(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << round_display(v);
    return s.str();
}

void row(std::ostream& out, const std::string& key, const std::string& value) {
    out << std::left << std::setw(16) << key << value << '\n';
}

// Config-file keys become `--key value` arguments unless the flag already
// appears on the command line, so flags always win.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& app) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        if (!a.empty() && a.front() != '-') {
            sub = app.get_subcommand_no_throw(a);
            if (sub) break;
        }
    }
    auto present = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };

    std::vector<std::string> injected;
    for (const auto& [key, value] : read_key_value_file(config_path)) {
        if (key == "config") continue;
        const std::string flag = "--" + key;
        if (present(flag)) continue;
        CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
        if (!opt) opt = app.get_option_no_throw(flag);
        if (!opt) throw ValidationError("config file: unknown key '" + key + "'");
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes") injected.push_back(flag);
        } else {
            injected.push_back(flag);
            injected.push_back(value);
        }
    }
    std::vector<std::string> merged = args;
    merged.insert(merged.end(), injected.begin(), injected.end());
    return merged;
}

Dataset load_dataset(const std::string& path, std::optional<double> baseline) { return ingest_csv(path, baseline); }

FitResult fit_dataset(const Dataset& data, ModelFamily family, bool three_param) {
    if (!data.has_unit_load() && !data.explicit_baseline() && !three_param) {
        resolve_baseline(data);  // throws with the remedy
    }
    return fit_with_baseline(data, family);
}

SimConfig build_sim_config(const SimArgs& a) {
    SimConfig cfg;
    cfg.population = a.n;
    cfg.parallel_cpus = a.cpus;
    cfg.parallel_dist = Distribution::parse(a.parallel);
    cfg.serial_dist = Distribution::parse(a.serial);
    cfg.horizon = a.horizon;
    cfg.warmup = a.warmup;
    cfg.seed = a.seed;
    if (a.mode == "async") cfg.mode = Asynchronous{};
    else if (a.mode == "syncgate") cfg.mode = SyncGate{};
    else if (a.mode == "batch") cfg.mode = Batch{};
    else if (a.mode == "loaddep") cfg.mode = SyncGateLoadDep{a.c, a.literal_queue};
    else throw ValidationError("unknown mode '" + a.mode + "'");
    cfg.validate();
    return cfg;
}

void add_sim_options(CLI::App* sub, SimArgs& a) {
    sub->add_option("--mode", a.mode, "async | syncgate | batch | loaddep")
        ->check(CLI::IsMember({"async", "syncgate", "batch", "loaddep"}));
    sub->add_option("--c", a.c, "serial inflation per queued request (loaddep)");
    sub->add_flag("--literal-queue", a.literal_queue, "loaddep: inflate by the literal serial queue length");
    sub->add_option("--cpus", a.cpus, "parallel CPUs (default: population)");
    sub->add_option("--parallel", a.parallel, "parallel-phase distribution");
    sub->add_option("--serial", a.serial, "serial-phase distribution");
    sub->add_option("--horizon", a.horizon, "simulated seconds");
    sub->add_option("--warmup", a.warmup, "seconds discarded before measuring");
    sub->add_option("--seed", a.seed, "random seed")->envname("SCALAZONE_SEED");
}

void print_fit(std::ostream& out, const Common& common, const FitResult& fit, double tau) {
    double alpha = 0.0, beta = 0.0;
    if (const auto* u = std::get_if<Usl>(&fit.model)) {
        alpha = u->alpha();
        beta = u->beta();
    } else if (const auto* a = std::get_if<Amdahl>(&fit.model)) {
        alpha = a->alpha();
    }
    const auto peak = usl_peak(UslParams(alpha, beta));
    const auto cls = app_class(alpha, beta, tau);
    if (common.format == "csv") {
        out << "model,alpha,beta,scale,r_squared,peak,app_class\n"
            << model_name(fit.model) << ',' << format_exact(alpha) << ',' << format_exact(beta) << ','
            << format_exact(fit.scale) << ',' << (fit.r_squared ? format_exact(*fit.r_squared) : "") << ','
            << (peak ? format_exact(*peak) : "") << ',' << cls.letter << '\n';
        return;
    }
    row(out, "model", std::string(model_name(fit.model)));
    row(out, "alpha", num(alpha));
    if (std::holds_alternative<Usl>(fit.model)) row(out, "beta", num(beta));
    row(out, "lambda", num(fit.scale));
    row(out, "r_squared", fit.r_squared ? num(*fit.r_squared) : "undefined (zero variance)");
    row(out, "peak", peak ? num(*peak) : "no finite peak");
    row(out, "app_class", std::string(cls.letter) + " (" + std::string(cls.description) + ")");
}

int cmd_fit(const Common& common, const FitArgs& a, std::ostream& out) {
    const Dataset data = load_dataset(a.data, a.baseline);
    if (a.model == "linear") {
        const LinearFit lf = fit_linear(normalize(data));
        if (common.format == "csv") {
            out << "slope,intercept,r_squared\n"
                << format_exact(lf.slope) << ',' << format_exact(lf.intercept) << ','
                << (lf.r_squared ? format_exact(*lf.r_squared) : "") << '\n';
        } else {
            row(out, "model", "linear regression");
            row(out, "slope", num(lf.slope));
            row(out, "intercept", num(lf.intercept));
            row(out, "r_squared", lf.r_squared ? num(*lf.r_squared) : "undefined (zero variance)");
        }
        return kOk;
    }
    const ModelFamily family = a.model == "amdahl" ? ModelFamily::Amdahl : ModelFamily::Usl;
    print_fit(out, common, fit_dataset(data, family, a.three_param), a.tau);
    return kOk;
}

int cmd_simulate(const Common& common, const SimArgs& a, std::ostream& out) {
    const SimConfig cfg = build_sim_config(a);
    SimMetrics m;
    if (!a.trace.empty()) {
        std::ofstream trace(a.trace);
        if (!trace) throw ValidationError("cannot open trace file '" + a.trace + "'");
        trace << "time\tseq\tkind\trequest_id\tqueue_len\n";
        m = run_sim(cfg, &trace);
    } else {
        m = run_sim(cfg);
    }
    const DerivedMetrics d =
        little_metrics(m.cpu_parallel, m.cpu_serial, m.elapsed, static_cast<double>(m.completed), cfg.population);

    if (common.format == "csv") {
        out << "elapsed,completed,cpu_parallel,cpu_serial,mean_queue,utilization,throughput,n_parallel,n_serial,"
               "n_queue,response\n"
            << format_exact(m.elapsed) << ',' << m.completed << ',' << format_exact(m.cpu_parallel) << ','
            << format_exact(m.cpu_serial) << ',' << format_exact(m.mean_queue) << ','
            << format_exact(m.utilization) << ',' << format_exact(m.throughput) << ','
            << format_exact(d.n_parallel) << ',' << format_exact(d.n_serial) << ',' << format_exact(d.n_queue)
            << ',' << (d.response ? format_exact(*d.response) : "") << '\n';
        return kOk;
    }
    row(out, "mode", mode_name(cfg.mode));
    row(out, "population", std::to_string(cfg.population));
    row(out, "cpus", std::to_string(cfg.cpus()));
    row(out, "elapsed", num(m.elapsed) + " s");
    row(out, "completed", std::to_string(m.completed));
    row(out, "cpu_parallel", num(m.cpu_parallel) + " CPU-s");
    row(out, "cpu_serial", num(m.cpu_serial) + " CPU-s");
    row(out, "mean_queue", num(m.mean_queue));
    row(out, "utilization", num(100.0 * m.utilization) + " %");
    row(out, "throughput", num(m.throughput) + " /s");
    row(out, "N_P", fixed2(d.n_parallel));
    row(out, "N_S", fixed2(d.n_serial));
    row(out, "N_Q", fixed2(d.n_queue));
    row(out, "R", d.response ? fixed2(*d.response) + " s" : "no throughput");
    return kOk;
}

int cmd_sweep(const Common& common, const SimArgs& a, const SweepArgs& s, std::ostream& out) {
    const std::vector<int> populations = parse_population_list(s.populations);
    SimArgs base_args = a;
    base_args.n = populations.front();
    base_args.cpus.reset();
    SimConfig base = build_sim_config(base_args);

    SweepOptions opts;
    opts.replications = s.reps;
    opts.threads = s.threads;
    if (s.metric == "work") opts.metric = SweepMetric::Work;
    if (s.seed_policy == "per-point") opts.seeds = SeedPolicy::PerPoint;
    const auto points = sweep(base, populations, opts);

    if (common.format == "csv") {
        out << "n,speedup,speedup_se,rate,rate_se,utilization\n";
        for (const auto& p : points) {
            out << p.population << ',' << format_exact(p.speedup) << ',' << format_exact(p.speedup_se) << ','
                << format_exact(p.mean_rate) << ',' << format_exact(p.rate_se) << ','
                << format_exact(p.mean_utilization) << '\n';
        }
    } else {
        out << std::left << std::setw(8) << "n" << std::setw(14) << "speedup" << std::setw(14) << "se"
            << std::setw(14) << "rate" << std::setw(14) << "utilization" << '\n';
        for (const auto& p : points) {
            out << std::left << std::setw(8) << p.population << std::setw(14) << num(p.speedup) << std::setw(14)
                << num(p.speedup_se) << std::setw(14) << num(p.mean_rate) << std::setw(14)
                << num(100.0 * p.mean_utilization) + " %" << '\n';
        }
    }

    if (!s.fit.empty()) {
        CapacitySeries series;
        for (const auto& p : points) series.push_back({static_cast<double>(p.population), p.speedup});
        if (common.format != "csv") out << '\n';
        if (s.fit == "linear") {
            const LinearFit lf = fit_linear(series);
            row(out, "fit", "linear regression");
            row(out, "slope", num(lf.slope));
            row(out, "intercept", num(lf.intercept));
            row(out, "r_squared", lf.r_squared ? num(*lf.r_squared) : "undefined");
        } else {
            const FitResult fit = s.fit == "amdahl" ? fit_amdahl(series) : fit_usl(series);
            print_fit(out, Common{"table", ""}, fit, kDefaultClassThreshold);
        }
    }
    return kOk;
}

int cmd_zones(const Common& common, const ZonesArgs& a, std::ostream& out) {
    const Dataset data = load_dataset(a.data, a.baseline);
    const FitResult fit = fit_dataset(data, ModelFamily::Usl, a.three_param);
    ZoneBounds bounds = compute_bounds(fit);

    CapacitySeries series;
    for (const auto& p : data.points()) series.push_back({p.n, p.x / fit.scale});
    if (a.independent_amdahl) {
        const FitResult amdahl = fit_amdahl(series);
        bounds.middle_alpha = std::get<Amdahl>(amdahl.model).alpha();
    }
    const ZoneReport report = build_zone_report(series, bounds, a.eps, a.tau);

    if (!a.out.empty()) {
        std::ofstream file(a.out);
        if (!file) throw ValidationError("cannot open output file '" + a.out + "'");
        write_plot_series(file, zone_series(report));
    }

    if (common.format == "csv") {
        write_plot_series(out, zone_series(report));
        return kOk;
    }
    row(out, "alpha", num(bounds.alpha));
    row(out, "beta", num(bounds.beta));
    if (bounds.middle_alpha) row(out, "amdahl alpha", num(*bounds.middle_alpha));
    row(out, "lambda", num(bounds.scale));
    row(out, "r_squared", fit.r_squared ? num(*fit.r_squared) : "undefined");
    row(out, "app_class", std::string(report.app.letter) + " (" + std::string(report.app.description) + ")");
    out << '\n'
        << std::left << std::setw(8) << "n" << std::setw(12) << "capacity" << std::setw(13) << "zone" << std::setw(12)
        << "d_linear" << std::setw(12) << "d_amdahl" << std::setw(12) << "d_usl" << '\n';
    for (const auto& p : report.points) {
        out << std::left << std::setw(8) << num(p.n) << std::setw(12) << num(p.capacity) << std::setw(13)
            << to_string(p.label) << std::setw(12) << num(p.to_upper) << std::setw(12) << num(p.to_middle)
            << std::setw(12) << num(p.to_lower) << '\n';
    }
    out << "\ntransitions: " << report.transitions.size() << '\n';
    for (const auto& t : report.transitions) {
        out << "  " << num(t.n_from) << " -> " << num(t.n_to) << ": " << to_string(t.from) << " -> "
            << to_string(t.to) << '\n';
    }
    return kOk;
}

int cmd_curve(const Common& common, const CurveArgs& a, std::ostream& out) {
    const PlotSeries series = curve_series(a.alpha, a.beta, a.nmax, a.gustafson);
    if (!a.out.empty()) {
        std::ofstream file(a.out);
        if (!file) throw ValidationError("cannot open output file '" + a.out + "'");
        write_plot_series(file, series);
    }
    if (common.format == "csv") {
        write_plot_series(out, series);
        return kOk;
    }
    out << std::left << std::setw(8) << "n" << std::setw(12) << "linear" << std::setw(12) << "amdahl"
        << std::setw(12) << "usl" << (a.gustafson ? "gustafson" : "") << '\n';
    for (const auto& r : series) {
        out << std::left << std::setw(8) << num(r.n) << std::setw(12) << num(r.c_linear) << std::setw(12)
            << num(r.c_amdahl) << std::setw(12) << num(r.c_usl) << (r.c_gustafson ? num(*r.c_gustafson) : "")
            << '\n';
    }
    return kOk;
}

}  // namespace

std::vector<int> parse_population_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw ValidationError("bad population list '" + text + "'");
        }
        if (used != s.size()) throw ValidationError("bad population list '" + text + "'");
        return v;
    };
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
            continue;
        }
        const int lo = to_int(item.substr(0, dots));
        std::string rest = item.substr(dots + 2);
        int step = 1;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            step = to_int(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const int hi = to_int(rest);
        if (step < 1 || hi < lo) throw ValidationError("bad population range '" + item + "'");
        for (int n = lo; n <= hi; n += step) out.push_back(n);
    }
    if (out.empty()) throw ValidationError("empty population list");
    for (int n : out) {
        if (n < 1) throw ValidationError("populations must be >= 1");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"scalazone: scalability-law fitting, repairman simulation and scalability zones", "scalazone"};
    app.require_subcommand(1);

    Common common;
    FitArgs fit_args;
    SimArgs sim_args;
    SweepArgs sweep_args;
    ZonesArgs zones_args;
    CurveArgs curve_args;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", common.format, "table | csv")->check(CLI::IsMember({"table", "csv"}));
        sub->add_option("--config", common.config, "flat key = value file; flags win");
    };

    auto* fit = app.add_subcommand("fit", "fit a capacity model to an n,x dataset");
    fit->add_option("data", fit_args.data, "CSV with columns n,x")->required();
    fit->add_option("--model", fit_args.model, "usl | amdahl | linear")
        ->check(CLI::IsMember({"usl", "amdahl", "linear"}));
    fit->add_option("--baseline", fit_args.baseline, "throughput at N = 1 when not measured");
    fit->add_flag("--three-param", fit_args.three_param, "fit the baseline as a free parameter");
    fit->add_option("--tau", fit_args.tau, "application-class threshold");
    add_common(fit);

    auto* simulate = app.add_subcommand("simulate", "run one repairman simulation");
    simulate->add_option("--n", sim_args.n, "population (requests)");
    simulate->add_option("--trace", sim_args.trace, "write a tab-separated event trace");
    add_sim_options(simulate, sim_args);
    add_common(simulate);

    auto* sweep_cmd = app.add_subcommand("sweep", "simulate a range of populations and normalize");
    sweep_cmd->add_option("--n", sweep_args.populations, "populations: 1,2,5 or 1..100 or 1..100:10")->required();
    sweep_cmd->add_option("--reps", sweep_args.reps, "replications per population");
    sweep_cmd->add_option("--metric", sweep_args.metric, "completions | work")
        ->check(CLI::IsMember({"completions", "work"}));
    sweep_cmd->add_option("--seed-policy", sweep_args.seed_policy, "common | per-point")
        ->check(CLI::IsMember({"common", "per-point"}));
    sweep_cmd->add_option("--threads", sweep_args.threads, "worker threads (0 = all cores)");
    sweep_cmd->add_option("--fit", sweep_args.fit, "fit the speedup curve: usl | amdahl | linear")
        ->check(CLI::IsMember({"usl", "amdahl", "linear"}));
    add_sim_options(sweep_cmd, sim_args);
    add_common(sweep_cmd);

    auto* zones = app.add_subcommand("zones", "label measurements by scalability zone");
    zones->add_option("data", zones_args.data, "CSV with columns n,x")->required();
    zones->add_option("--baseline", zones_args.baseline, "throughput at N = 1 when not measured");
    zones->add_flag("--three-param", zones_args.three_param, "fit the baseline as a free parameter");
    zones->add_option("--eps", zones_args.eps, "relative tolerance above the linear bound");
    zones->add_option("--tau", zones_args.tau, "application-class threshold");
    zones->add_flag("--independent-amdahl", zones_args.independent_amdahl,
                    "draw the middle curve from a separate Amdahl fit");
    zones->add_option("--out", zones_args.out, "write the plot series CSV here");
    add_common(zones);

    auto* curve = app.add_subcommand("curve", "tabulate the linear, Amdahl and USL curves");
    curve->add_option("--alpha", curve_args.alpha, "contention coefficient")->required();
    curve->add_option("--beta", curve_args.beta, "coherency coefficient");
    curve->add_option("--nmax", curve_args.nmax, "largest N");
    curve->add_flag("--gustafson", curve_args.gustafson, "add a Gustafson column");
    curve->add_option("--out", curve_args.out, "write the plot series CSV here");
    add_common(curve);

    try {
        std::vector<std::string> merged = merge_config(args, app);
        std::reverse(merged.begin(), merged.end());
        app.parse(merged);

        if (*fit) return cmd_fit(common, fit_args, out);
        if (*simulate) return cmd_simulate(common, sim_args, out);
        if (*sweep_cmd) return cmd_sweep(common, sim_args, sweep_args, out);
        if (*zones) return cmd_zones(common, zones_args, out);
        if (*curve) return cmd_curve(common, curve_args, out);
        return kUsageError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const FitNotConverged& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

}  // namespace scalazone::cli
