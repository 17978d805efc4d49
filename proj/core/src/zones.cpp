#include "scalazone/zones.hpp"

#include <algorithm>

#include "scalazone/error.hpp"

namespace scalazone {

namespace {

// Relative slack for "exactly on a curve"; absorbs rounding only.
constexpr double kOnCurve = 1e-9;

}  // namespace

ZoneBounds::ZoneBounds(double a, double b, double s) : alpha(a), beta(b), scale(s) {
    UslParams check(a, b);
    (void)check;
    if (!(s > 0.0)) throw ValidationError("zone bounds scale must be > 0");
}

double ZoneBounds::middle(double n) const { return eval_capacity(Amdahl(middle_contention()), n); }

double ZoneBounds::lower(double n) const { return eval_capacity(Usl(alpha, beta), n); }

std::string_view to_string(ZoneLabel label) {
    switch (label) {
        case ZoneLabel::Superlinear: return "superlinear";
        case ZoneLabel::A: return "A";
        case ZoneLabel::B: return "B";
        case ZoneLabel::C: return "C";
    }
    return "?";
}

ZoneBounds compute_bounds(const FitResult& fit) {
    if (const auto* usl = std::get_if<Usl>(&fit.model)) return {usl->alpha(), usl->beta(), fit.scale};
    if (const auto* amdahl = std::get_if<Amdahl>(&fit.model)) return {amdahl->alpha(), 0.0, fit.scale};
    if (std::holds_alternative<Linear>(fit.model)) return {0.0, 0.0, fit.scale};
    throw ValidationError("zone bounds need a USL or Amdahl fit");
}

ZoneLabel classify_point(double n, double c, const ZoneBounds& bounds, double eps) {
    if (!(n >= 1.0)) throw ValidationError("classify_point: n must be >= 1");
    if (!(c > 0.0)) throw ValidationError("classify_point: capacity must be > 0");
    if (c > bounds.upper(n) * (1.0 + eps)) return ZoneLabel::Superlinear;
    const bool has_c = bounds.beta > kPositivityTolerance;
    const bool has_b = bounds.middle_contention() > kPositivityTolerance;
    if (has_c && c <= bounds.lower(n) * (1.0 + kOnCurve)) return ZoneLabel::C;
    if (has_b && c <= bounds.middle(n) * (1.0 + kOnCurve)) return ZoneLabel::B;
    // alpha = 0: the Amdahl curve is the line itself, so zone B spans
    // everything strictly between the USL curve and the line.
    if (!has_b && has_c && c < bounds.middle(n) * (1.0 - kOnCurve)) return ZoneLabel::B;
    return ZoneLabel::A;
}

std::vector<Transition> detect_transitions(const std::vector<LabeledPoint>& labels) {
    std::vector<Transition> out;
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (labels[i].label != labels[i - 1].label) {
            out.push_back({labels[i - 1].n, labels[i].n, labels[i - 1].label, labels[i].label});
        }
    }
    return out;
}

AppClassInfo app_class(double alpha, double beta, double threshold) {
    const bool contention = alpha > threshold;
    const bool coherency = beta > threshold;
    if (!contention && !coherency) return {AppClass::A, "A", "Ideal concurrency"};
    if (contention && !coherency) return {AppClass::B, "B", "Contention-limited"};
    if (!contention && coherency) return {AppClass::C, "C", "Coherency-limited"};
    return {AppClass::D, "D", "Worst case"};
}

ZoneReport build_zone_report(const CapacitySeries& series, const ZoneBounds& bounds, double eps, double threshold) {
    ZoneReport report;
    report.bounds = bounds;
    CapacitySeries sorted = series;
    std::sort(sorted.begin(), sorted.end(), [](const CapacityPoint& a, const CapacityPoint& b) { return a.n < b.n; });
    std::vector<LabeledPoint> labels;
    for (const auto& p : sorted) {
        ZonePoint z;
        z.n = p.n;
        z.capacity = p.c;
        z.label = classify_point(p.n, p.c, bounds, eps);
        z.to_upper = p.c - bounds.upper(p.n);
        z.to_middle = p.c - bounds.middle(p.n);
        z.to_lower = p.c - bounds.lower(p.n);
        report.points.push_back(z);
        labels.push_back({p.n, z.label});
    }
    report.transitions = detect_transitions(labels);
    report.app = app_class(bounds.alpha, bounds.beta, threshold);
    return report;
}

}  // namespace scalazone
