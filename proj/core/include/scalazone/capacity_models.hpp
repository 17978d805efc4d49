#pragma once

/**
 * @file capacity_models.hpp
 * @brief Parametric scalability models: linear, Amdahl, Gustafson and the
 *        universal scalability law (USL).
 *
 * Every model maps a load N to a relative capacity C(N) with C(1) = 1. All
 * functions are pure and safe to call concurrently.
 */

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace scalazone {

/// Strict-positivity tolerance used when classifying rational forms.
/// Coefficients in (-tau, tau] count as zero.
inline constexpr double kPositivityTolerance = 1e-8;

/// Contention (alpha) and coherency (beta) coefficients of the USL.
/// Invariants: 0 <= alpha <= 1, beta >= 0. Enforced at construction.
class UslParams {
public:
    UslParams(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    friend bool operator==(const UslParams&, const UslParams&) = default;

private:
    double alpha_;
    double beta_;
};

struct Linear {
    friend bool operator==(const Linear&, const Linear&) = default;
};

/// C(N) = N / (1 + alpha (N - 1)).
class Amdahl {
public:
    explicit Amdahl(double alpha);
    double alpha() const noexcept { return alpha_; }
    friend bool operator==(const Amdahl&, const Amdahl&) = default;

private:
    double alpha_;
};

/// C(N) = (1 - alpha) N + alpha. Non-zero at N = 0.
class Gustafson {
public:
    explicit Gustafson(double alpha);
    double alpha() const noexcept { return alpha_; }
    friend bool operator==(const Gustafson&, const Gustafson&) = default;

private:
    double alpha_;
};

/// C(N) = N / (1 + alpha (N - 1) + beta N (N - 1)).
class Usl {
public:
    explicit Usl(UslParams params) : params_(params) {}
    Usl(double alpha, double beta) : params_(alpha, beta) {}
    const UslParams& params() const noexcept { return params_; }
    double alpha() const noexcept { return params_.alpha(); }
    double beta() const noexcept { return params_.beta(); }
    friend bool operator==(const Usl&, const Usl&) = default;

private:
    UslParams params_;
};

using CapacityModel = std::variant<Linear, Amdahl, Gustafson, Usl>;

std::string_view model_name(const CapacityModel& model);

/// Relative capacity at load n (n >= 0, non-integer allowed).
double eval_capacity(const CapacityModel& model, double n);

/// Load at which the USL curve peaks, sqrt((1 - alpha) / beta).
/// Empty when beta == 0: the curve is monotone and has no finite peak.
std::optional<double> usl_peak(const UslParams& params);

/// C(N) = P(N) / Q(N) with polynomial coefficients stored constant term first.
/// For a quadratic Q the coefficients are (c, b, a).
struct RationalForm {
    std::vector<double> p_coeffs;
    std::vector<double> q_coeffs;

    RationalForm(std::vector<double> p, std::vector<double> q);

    double eval(double n) const;
};

RationalForm to_rational(const CapacityModel& model);

enum class RationalClass { Universal, AmdahlClass, GustafsonClass, LinearClass, Other };

std::string_view to_string(RationalClass cls);

/// Structural classification of a rational capacity function. A coefficient
/// counts as positive only if it exceeds tau.
RationalClass classify_rational(const RationalForm& form, double tau = kPositivityTolerance);

}  // namespace scalazone
