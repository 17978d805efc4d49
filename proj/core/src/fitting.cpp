#include "scalazone/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "scalazone/error.hpp"

namespace scalazone {

namespace {

constexpr double kBaselineAgreement = 1e-9;
constexpr int kBaselineMaxIterations = 100;
constexpr double kBaselineTolerance = 1e-9;

struct Coefficients {
    double alpha = 0.0;
    double beta = 0.0;
};

double usl_value(double n, Coefficients k) {
    return n / (1.0 + k.alpha * (n - 1.0) + k.beta * n * (n - 1.0));
}

CapacitySeries sorted_copy(const CapacitySeries& series) {
    CapacitySeries out = series;
    std::sort(out.begin(), out.end(),
              [](const CapacityPoint& a, const CapacityPoint& b) { return a.n < b.n; });
    return out;
}

void check_series(const CapacitySeries& series, std::size_t min_points, const char* what) {
    if (series.size() < min_points) {
        std::ostringstream msg;
        msg << what << " needs at least " << min_points << " points, got " << series.size();
        throw ValidationError(msg.str());
    }
    std::set<double> distinct;
    for (const auto& p : series) {
        if (!(p.c > 0.0) || !std::isfinite(p.c)) throw ValidationError("capacity values must be positive");
        if (!(p.n > 0.0) || !std::isfinite(p.n)) throw ValidationError("loads must be positive");
        distinct.insert(p.n);
    }
    if (distinct.size() < min_points) {
        throw NumericError(std::string(what) + ": degenerate series (too few distinct loads)");
    }
}

// Least squares without intercept on the given columns of the linearized
// USL. Columns: 0 -> (N - 1), 1 -> N (N - 1). A disabled column is fixed at
// zero; nonnegativity (and alpha <= 1) is enforced by clamp-and-refit.
Coefficients linearized_fit(const CapacitySeries& s, bool use_alpha, bool use_beta) {
    const auto rows = static_cast<Eigen::Index>(s.size());
    Eigen::VectorXd y(rows);
    Eigen::MatrixXd a_col(rows, 1), b_col(rows, 1);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double n = s[static_cast<std::size_t>(i)].n;
        y(i) = n / s[static_cast<std::size_t>(i)].c - 1.0;
        a_col(i, 0) = n - 1.0;
        b_col(i, 0) = n * (n - 1.0);
    }

    auto solve_one = [&](const Eigen::MatrixXd& col, const Eigen::VectorXd& rhs) {
        const double denom = col.col(0).squaredNorm();
        return denom > 0.0 ? col.col(0).dot(rhs) / denom : 0.0;
    };

    Coefficients k;
    if (use_alpha && use_beta) {
        Eigen::MatrixXd design(rows, 2);
        design << a_col, b_col;
        const Eigen::Vector2d sol = design.colPivHouseholderQr().solve(y);
        k = {sol(0), sol(1)};
        if (k.alpha >= 0.0 && k.alpha <= 1.0 && k.beta >= 0.0) return k;
        if (k.beta < 0.0) return linearized_fit(s, true, false);
        // alpha out of range: pin it to the nearest bound and refit beta.
        k.alpha = std::clamp(k.alpha, 0.0, 1.0);
        k.beta = std::max(0.0, solve_one(b_col, y - k.alpha * a_col.col(0)));
        return k;
    }
    if (use_alpha) k.alpha = std::clamp(solve_one(a_col, y), 0.0, 1.0);
    if (use_beta) k.beta = std::max(0.0, solve_one(b_col, y));
    return k;
}

double capacity_ssr(const CapacitySeries& s, Coefficients k) {
    double ssr = 0.0;
    for (const auto& p : s) {
        const double r = p.c - usl_value(p.n, k);
        ssr += r * r;
    }
    return ssr;
}

// Projected Levenberg-Marquardt on the capacity-space residuals, box
// constrained to alpha in [0, 1], beta >= 0. Only accepts strict decreases,
// so the result is never worse than the start.
Coefficients polish(const CapacitySeries& s, Coefficients start, bool use_beta) {
    Coefficients best = start;
    double best_ssr = capacity_ssr(s, best);
    double damping = 1e-3;
    for (int iter = 0; iter < 200 && best_ssr > 0.0; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (const auto& p : s) {
            const double n = p.n;
            const double d = 1.0 + best.alpha * (n - 1.0) + best.beta * n * (n - 1.0);
            const double f = n / d;
            Eigen::Vector2d grad(-n * (n - 1.0) / (d * d), use_beta ? -n * n * (n - 1.0) / (d * d) : 0.0);
            jtj += grad * grad.transpose();
            jtr += grad * (p.c - f);
        }
        if (!use_beta) jtj(1, 1) = 1.0;

        bool improved = false;
        while (damping < 1e12) {
            Eigen::Matrix2d lhs = jtj;
            lhs.diagonal() += damping * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::Vector2d step = lhs.ldlt().solve(jtr);
            Coefficients trial{std::clamp(best.alpha + step(0), 0.0, 1.0),
                               use_beta ? std::max(0.0, best.beta + step(1)) : 0.0};
            const double trial_ssr = capacity_ssr(s, trial);
            if (trial_ssr < best_ssr) {
                const double gain = (best_ssr - trial_ssr) / best_ssr;
                best = trial;
                best_ssr = trial_ssr;
                damping = std::max(damping * 0.1, 1e-12);
                improved = gain > 1e-15;
                break;
            }
            damping *= 10.0;
        }
        if (!improved) break;
    }
    return best;
}

FitResult make_result(const CapacitySeries& s, CapacityModel model, double scale) {
    FitResult out;
    out.model = std::move(model);
    out.scale = scale;
    std::vector<double> observed, predicted;
    observed.reserve(s.size());
    predicted.reserve(s.size());
    for (const auto& p : s) {
        observed.push_back(p.c);
        predicted.push_back(eval_capacity(out.model, p.n));
        out.residuals.push_back(p.c - predicted.back());
    }
    out.r_squared = r_squared(observed, predicted);
    return out;
}

Coefficients best_of(const CapacitySeries& s, std::initializer_list<Coefficients> candidates) {
    Coefficients best = *candidates.begin();
    double best_ssr = capacity_ssr(s, best);
    for (const auto& c : candidates) {
        const double ssr = capacity_ssr(s, c);
        if (ssr < best_ssr) {
            best = c;
            best_ssr = ssr;
        }
    }
    return best;
}

Coefficients fit_amdahl_coefficients(const CapacitySeries& s) {
    const Coefficients lin = linearized_fit(s, true, false);
    return best_of(s, {polish(s, lin, false), lin, Coefficients{}});
}

}  // namespace

Dataset::Dataset(std::vector<Measurement> points, std::optional<double> baseline)
    : points_(std::move(points)), baseline_(baseline) {
    std::sort(points_.begin(), points_.end(),
              [](const Measurement& a, const Measurement& b) { return a.n < b.n; });
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!(p.n >= 1.0) || !std::isfinite(p.n)) {
            throw ValidationError("load n must be >= 1, got " + std::to_string(p.n));
        }
        if (!(p.x > 0.0) || !std::isfinite(p.x)) {
            throw ValidationError("throughput must be > 0 at n = " + std::to_string(p.n));
        }
        if (i > 0 && points_[i - 1].n == p.n) {
            throw ValidationError("duplicate load n = " + std::to_string(p.n));
        }
    }
    if (baseline_ && !(*baseline_ > 0.0)) throw ValidationError("baseline throughput must be > 0");
}

bool Dataset::has_unit_load() const noexcept {
    return !points_.empty() && points_.front().n == 1.0;
}

double resolve_baseline(const Dataset& dataset) {
    const auto explicit_x1 = dataset.explicit_baseline();
    if (dataset.has_unit_load()) {
        const double measured = dataset.points().front().x;
        if (explicit_x1 && std::abs(*explicit_x1 - measured) > kBaselineAgreement * measured) {
            throw ValidationError("explicit baseline disagrees with the measured N = 1 throughput");
        }
        return measured;
    }
    if (explicit_x1) return *explicit_x1;
    throw ValidationError(
        "no baseline: dataset has no N = 1 point; pass --baseline <x1> or use --three-param");
}

CapacitySeries normalize(const Dataset& dataset) {
    const double x1 = resolve_baseline(dataset);
    CapacitySeries out;
    out.reserve(dataset.size());
    for (const auto& p : dataset.points()) out.push_back({p.n, p.x / x1});
    return out;
}

std::optional<double> r_squared(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size()) throw ValidationError("r_squared: length mismatch");
    if (observed.size() < 2) throw ValidationError("r_squared: need at least 2 values");
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / observed.size();
    double ssr = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ssr += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        sst += (observed[i] - mean) * (observed[i] - mean);
    }
    if (sst <= 0.0) return std::nullopt;
    return 1.0 - ssr / sst;
}

FitResult fit_usl(const CapacitySeries& series) {
    check_series(series, 3, "USL fit");
    const CapacitySeries s = sorted_copy(series);
    const Coefficients lin = linearized_fit(s, true, true);
    const Coefficients k =
        best_of(s, {polish(s, lin, true), lin, fit_amdahl_coefficients(s), Coefficients{}});
    return make_result(s, Usl(k.alpha, k.beta), 1.0);
}

FitResult fit_amdahl(const CapacitySeries& series) {
    check_series(series, 2, "Amdahl fit");
    const CapacitySeries s = sorted_copy(series);
    return make_result(s, Amdahl(fit_amdahl_coefficients(s).alpha), 1.0);
}

LinearFit fit_linear(const CapacitySeries& series) {
    if (series.size() < 2) throw ValidationError("linear fit needs at least 2 points");
    const CapacitySeries s = sorted_copy(series);
    const double count = static_cast<double>(s.size());
    double mean_n = 0.0, mean_c = 0.0;
    for (const auto& p : s) {
        mean_n += p.n;
        mean_c += p.c;
    }
    mean_n /= count;
    mean_c /= count;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : s) {
        sxx += (p.n - mean_n) * (p.n - mean_n);
        sxy += (p.n - mean_n) * (p.c - mean_c);
    }
    if (sxx <= 0.0) throw NumericError("linear fit: degenerate series (all loads equal)");
    LinearFit out;
    out.slope = sxy / sxx;
    out.intercept = mean_c - out.slope * mean_n;
    std::vector<double> observed, predicted;
    for (const auto& p : s) {
        observed.push_back(p.c);
        predicted.push_back(out.slope * p.n + out.intercept);
    }
    out.r_squared = r_squared(observed, predicted);
    return out;
}

std::optional<double> linear_r_squared(const CapacitySeries& series) {
    std::vector<double> observed, predicted;
    for (const auto& p : sorted_copy(series)) {
        observed.push_back(p.c);
        predicted.push_back(p.n);
    }
    return r_squared(observed, predicted);
}

FitResult fit_with_baseline(const Dataset& dataset, ModelFamily family) {
    const bool usl = family == ModelFamily::Usl;
    if (dataset.has_unit_load() || dataset.explicit_baseline()) {
        const double x1 = resolve_baseline(dataset);
        const CapacitySeries series = normalize(dataset);
        FitResult out = usl ? fit_usl(series) : fit_amdahl(series);
        out.scale = x1;
        return out;
    }

    const std::size_t min_points = usl ? 4 : 3;
    if (dataset.size() < min_points) {
        std::ostringstream msg;
        msg << "three-parameter " << (usl ? "USL" : "Amdahl") << " fit needs at least " << min_points
            << " points, got " << dataset.size();
        throw ValidationError(msg.str());
    }

    const auto& pts = dataset.points();
    const auto rows = static_cast<Eigen::Index>(pts.size());

    // N / X = (1/lambda) (1 + alpha (N - 1) + beta N (N - 1)) is linear in
    // (1/lambda, alpha/lambda, beta/lambda); that solution seeds the
    // alternating refinement below.
    auto joint = [&](bool with_alpha, bool with_beta) {
        const int cols = 1 + (with_alpha ? 1 : 0) + (with_beta ? 1 : 0);
        Eigen::MatrixXd design(rows, cols);
        Eigen::VectorXd y(rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double n = pts[static_cast<std::size_t>(i)].n;
            y(i) = n / pts[static_cast<std::size_t>(i)].x;
            int c = 0;
            design(i, c++) = 1.0;
            if (with_alpha) design(i, c++) = n - 1.0;
            if (with_beta) design(i, c++) = n * (n - 1.0);
        }
        const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(y);
        int c = 1;
        const double inv_scale = sol(0);
        const double a = with_alpha ? sol(c++) : 0.0;
        const double b = with_beta ? sol(c++) : 0.0;
        return std::array<double, 3>{inv_scale, a, b};
    };

    auto coeffs = joint(true, usl);
    if (coeffs[1] < 0.0 && coeffs[2] < 0.0) coeffs = joint(false, false);
    else if (coeffs[2] < 0.0) coeffs = joint(true, false);
    else if (coeffs[1] < 0.0) coeffs = joint(false, usl);
    if (!(coeffs[0] > 0.0)) throw NumericError("three-parameter fit: non-positive baseline estimate");

    double scale = 1.0 / coeffs[0];
    Coefficients k{std::clamp(coeffs[1] / coeffs[0], 0.0, 1.0), std::max(0.0, coeffs[2] / coeffs[0])};

    auto as_series = [&](double lambda) {
        CapacitySeries s;
        s.reserve(pts.size());
        for (const auto& p : pts) s.push_back({p.n, p.x / lambda});
        return s;
    };

    bool converged = false;
    for (int iter = 0; iter < kBaselineMaxIterations; ++iter) {
        // Closed-form 1/lambda for the current shape.
        double num = 0.0, den = 0.0;
        for (const auto& p : pts) {
            const double d = p.n / usl_value(p.n, k);
            num += (p.n / p.x) * d;
            den += d * d;
        }
        const double next_scale = den / num;
        const Coefficients next_k = linearized_fit(as_series(next_scale), true, usl);
        const double change = std::max({std::abs(next_scale - scale) / scale, std::abs(next_k.alpha - k.alpha),
                                        std::abs(next_k.beta - k.beta)});
        scale = next_scale;
        k = next_k;
        if (change < kBaselineTolerance) {
            converged = true;
            break;
        }
    }

    const CapacitySeries s = as_series(scale);
    FitResult out = usl ? make_result(s, Usl(k.alpha, k.beta), scale) : make_result(s, Amdahl(k.alpha), scale);
    if (!converged) {
        throw FitNotConverged("three-parameter fit did not converge within 100 iterations", std::move(out));
    }
    return out;
}

}  // namespace scalazone
