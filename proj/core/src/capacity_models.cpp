#include "scalazone/capacity_models.hpp"

#include <cmath>
#include <string>

#include "scalazone/error.hpp"

namespace scalazone {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double horner(const std::vector<double>& coeffs, double n) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * n + *it;
    return acc;
}

// Degree after dropping trailing coefficients that are zero within tau.
int effective_degree(const std::vector<double>& coeffs, double tau) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg >= 0 && std::abs(coeffs[static_cast<std::size_t>(deg)]) <= tau) --deg;
    return deg;
}

double coeff(const std::vector<double>& coeffs, std::size_t i) {
    return i < coeffs.size() ? coeffs[i] : 0.0;
}

}  // namespace

UslParams::UslParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    check_alpha(alpha);
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw ValidationError("beta must be non-negative, got " + std::to_string(beta));
    }
}

Amdahl::Amdahl(double alpha) : alpha_(alpha) { check_alpha(alpha); }

Gustafson::Gustafson(double alpha) : alpha_(alpha) { check_alpha(alpha); }

std::string_view model_name(const CapacityModel& model) {
    return std::visit(overloaded{[](const Linear&) { return std::string_view{"linear"}; },
                                 [](const Amdahl&) { return std::string_view{"amdahl"}; },
                                 [](const Gustafson&) { return std::string_view{"gustafson"}; },
                                 [](const Usl&) { return std::string_view{"usl"}; }},
                      model);
}

double eval_capacity(const CapacityModel& model, double n) {
    return std::visit(
        overloaded{[n](const Linear&) { return n; },
                   [n](const Amdahl& m) { return n / (1.0 + m.alpha() * (n - 1.0)); },
                   [n](const Gustafson& m) { return (1.0 - m.alpha()) * n + m.alpha(); },
                   [n](const Usl& m) {
                       return n / (1.0 + m.alpha() * (n - 1.0) + m.beta() * n * (n - 1.0));
                   }},
        model);
}

std::optional<double> usl_peak(const UslParams& params) {
    if (params.beta() <= 0.0) return std::nullopt;
    return std::sqrt((1.0 - params.alpha()) / params.beta());
}

RationalForm::RationalForm(std::vector<double> p, std::vector<double> q)
    : p_coeffs(std::move(p)), q_coeffs(std::move(q)) {
    bool all_zero = true;
    for (double c : q_coeffs) all_zero = all_zero && c == 0.0;
    if (all_zero) throw ValidationError("rational form denominator is identically zero");
}

double RationalForm::eval(double n) const { return horner(p_coeffs, n) / horner(q_coeffs, n); }

RationalForm to_rational(const CapacityModel& model) {
    return std::visit(
        overloaded{[](const Linear&) { return RationalForm{{0.0, 1.0}, {1.0}}; },
                   [](const Amdahl& m) {
                       return RationalForm{{0.0, 1.0}, {1.0 - m.alpha(), m.alpha()}};
                   },
                   [](const Gustafson& m) {
                       return RationalForm{{m.alpha(), 1.0 - m.alpha()}, {1.0}};
                   },
                   // 1 + a(N-1) + bN(N-1) = (1 - a) + (a - b) N + b N^2
                   [](const Usl& m) {
                       return RationalForm{{0.0, 1.0},
                                           {1.0 - m.alpha(), m.alpha() - m.beta(), m.beta()}};
                   }},
        model);
}

std::string_view to_string(RationalClass cls) {
    switch (cls) {
        case RationalClass::Universal: return "universal";
        case RationalClass::AmdahlClass: return "amdahl";
        case RationalClass::GustafsonClass: return "gustafson";
        case RationalClass::LinearClass: return "linear";
        case RationalClass::Other: return "other";
    }
    return "other";
}

RationalClass classify_rational(const RationalForm& form, double tau) {
    const auto& p = form.p_coeffs;
    const auto& q = form.q_coeffs;
    const int p_deg = effective_degree(p, tau);
    const int q_deg = effective_degree(q, tau);

    const bool p_is_n = p_deg == 1 && std::abs(coeff(p, 0)) <= tau && std::abs(coeff(p, 1) - 1.0) <= tau;
    const bool q_is_one = q_deg == 0 && std::abs(coeff(q, 0) - 1.0) <= tau;

    if (p_is_n && q_is_one) return RationalClass::LinearClass;
    if (p_is_n && q_deg == 2 && coeff(q, 0) > tau && coeff(q, 1) > tau && coeff(q, 2) > tau) {
        return RationalClass::Universal;
    }
    if (p_is_n && q_deg == 1 && coeff(q, 0) > tau && coeff(q, 1) > tau) {
        return RationalClass::AmdahlClass;
    }
    if (q_is_one && p_deg == 1 && coeff(p, 0) > tau && coeff(p, 1) > tau) {
        return RationalClass::GustafsonClass;
    }
    return RationalClass::Other;
}

}  // namespace scalazone
