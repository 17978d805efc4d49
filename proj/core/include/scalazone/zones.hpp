#pragma once

/**
 * @file zones.hpp
 * @brief Scalability zones bounded by the linear, Amdahl and USL curves.
 *
 * Zone A lies between linear scaling and the Amdahl curve, zone B between
 * the Amdahl and USL curves, zone C on or below the USL curve. Each zone
 * includes its lower boundary. A zone whose lower boundary collapses onto
 * the one above it (alpha or beta fitted as zero) does not exist, and points
 * fall into the zone above.
 */

#include <optional>
#include <string_view>
#include <vector>

#include "scalazone/capacity_models.hpp"
#include "scalazone/fitting.hpp"

namespace scalazone {

inline constexpr double kDefaultZoneEps = 0.02;
inline constexpr double kDefaultClassThreshold = 1e-4;

struct ZoneBounds {
    double alpha = 0.0;
    double beta = 0.0;
    double scale = 1.0;
    /// Contention coefficient of the middle curve when it comes from an
    /// independent Amdahl fit instead of the USL fit.
    std::optional<double> middle_alpha;

    ZoneBounds() = default;
    ZoneBounds(double alpha, double beta, double scale = 1.0);

    double upper(double n) const { return n; }
    double middle_contention() const { return middle_alpha.value_or(alpha); }
    double middle(double n) const;
    double lower(double n) const;
};

enum class ZoneLabel { Superlinear, A, B, C };

std::string_view to_string(ZoneLabel label);

/// Bounds from a USL fit. An Amdahl fit is accepted and gives beta = 0.
ZoneBounds compute_bounds(const FitResult& fit);

/// Labels one normalized point. eps widens the linear ceiling only, so noise
/// just above N still counts as zone A.
ZoneLabel classify_point(double n, double c, const ZoneBounds& bounds, double eps = kDefaultZoneEps);

struct Transition {
    double n_from = 0.0;
    double n_to = 0.0;
    ZoneLabel from = ZoneLabel::A;
    ZoneLabel to = ZoneLabel::A;
};

struct LabeledPoint {
    double n = 0.0;
    ZoneLabel label = ZoneLabel::A;
};

/// One entry per adjacent pair with differing labels, in input order.
std::vector<Transition> detect_transitions(const std::vector<LabeledPoint>& labels);

enum class AppClass { A, B, C, D };

struct AppClassInfo {
    AppClass cls;
    std::string_view letter;
    std::string_view description;
};

/// Application class from the fitted coefficients: contention and coherency
/// each count as present when they exceed the threshold.
AppClassInfo app_class(double alpha, double beta, double threshold = kDefaultClassThreshold);

struct ZonePoint {
    double n = 0.0;
    double capacity = 0.0;
    ZoneLabel label = ZoneLabel::A;
    double to_upper = 0.0;   ///< c - upper(n)
    double to_middle = 0.0;  ///< c - middle(n)
    double to_lower = 0.0;   ///< c - lower(n)
};

struct ZoneReport {
    ZoneBounds bounds;
    std::vector<ZonePoint> points;
    std::vector<Transition> transitions;
    AppClassInfo app;
};

/// Labels a normalized series against the bounds and collects transitions.
ZoneReport build_zone_report(const CapacitySeries& series, const ZoneBounds& bounds,
                             double eps = kDefaultZoneEps, double threshold = kDefaultClassThreshold);

}  // namespace scalazone
