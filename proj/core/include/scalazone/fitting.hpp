#pragma once

/**
 * @file fitting.hpp
 * @brief Normalization of throughput measurements and regression of the
 *        capacity models.
 *
 * The USL and Amdahl fits start from the exact linearization
 *
 *     N / C(N) - 1 = alpha (N - 1) + beta N (N - 1)
 *
 * solved by linear least squares with nonnegativity enforced by
 * clamp-and-refit. On noiseless data this is already the answer. The
 * estimate then seeds a projected Gauss-Newton polish in capacity space,
 * which is where R^2 is reported.
 */

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalazone/capacity_models.hpp"

namespace scalazone {

struct Measurement {
    double n = 0.0;  ///< load, >= 1
    double x = 0.0;  ///< throughput, > 0
};

/// Measured throughput series. Sorted ascending by n with distinct n.
class Dataset {
public:
    Dataset() = default;
    /// Sorts the points and validates them. Throws ValidationError on
    /// duplicate n, n < 1 or x <= 0.
    explicit Dataset(std::vector<Measurement> points, std::optional<double> baseline = std::nullopt);

    const std::vector<Measurement>& points() const noexcept { return points_; }
    std::optional<double> explicit_baseline() const noexcept { return baseline_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool has_unit_load() const noexcept;

private:
    std::vector<Measurement> points_;
    std::optional<double> baseline_;
};

struct CapacityPoint {
    double n = 0.0;
    double c = 0.0;
};

using CapacitySeries = std::vector<CapacityPoint>;

/// Resolves the baseline throughput: measured N = 1 first, then the explicit
/// baseline. Both present and disagreeing by more than 1e-9 relative is an
/// error; neither present is an error naming the remedies.
double resolve_baseline(const Dataset& dataset);

/// C(n) = x(n) / x(1).
CapacitySeries normalize(const Dataset& dataset);

struct FitResult {
    CapacityModel model = Linear{};
    double scale = 1.0;               ///< baseline throughput lambda
    std::optional<double> r_squared;  ///< empty when the data have zero variance
    std::vector<double> residuals;    ///< observed - predicted, capacity space
};

/// Coefficient of determination 1 - SSR/SST. Empty when the observed values
/// have zero variance.
std::optional<double> r_squared(std::span<const double> observed, std::span<const double> predicted);

FitResult fit_usl(const CapacitySeries& series);
FitResult fit_amdahl(const CapacitySeries& series);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::optional<double> r_squared;
};

/// Ordinary least squares C = slope N + intercept.
LinearFit fit_linear(const CapacitySeries& series);

enum class ModelFamily { Usl, Amdahl };

/// Error carrying the last iterate when the baseline refinement stalls.
class FitNotConverged : public std::runtime_error {
public:
    FitNotConverged(const std::string& what, FitResult last)
        : std::runtime_error(what), last_iterate(std::move(last)) {}
    FitResult last_iterate;
};

/// Fits X(N) = lambda C(N; alpha, beta) with lambda free. When the dataset
/// has an N = 1 point lambda is pinned to x(1) and this reduces to
/// normalize + fit_usl (or fit_amdahl).
FitResult fit_with_baseline(const Dataset& dataset, ModelFamily family = ModelFamily::Usl);

/// Capacity-space R^2 of the ideal linear model C = N on the series.
std::optional<double> linear_r_squared(const CapacitySeries& series);

}  // namespace scalazone
