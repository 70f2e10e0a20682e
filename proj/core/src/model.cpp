#include "ltb/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ltb {

namespace {

double pow_int(double x, int p) {
    double out = 1.0;
    for (int i = 0; i < p; ++i) out *= x;
    return out;
}

}  // namespace

Model::Model(ModelParams params) : params_(std::move(params)) {
    if (params_.n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (!(params_.a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
    if (!(params_.r_max > 0.0) || !std::isfinite(params_.r_max))
        throw std::invalid_argument("ModelParams: r_max must be positive and finite");
    for (const auto& term : params_.gamma) {
        if (term.power < params_.n + 1)
            throw std::invalid_argument("ModelParams: gamma power " + std::to_string(term.power) +
                                        " must be >= n + 1 = " + std::to_string(params_.n + 1));
        if (!std::isfinite(term.coeff))
            throw std::invalid_argument("ModelParams: gamma coefficient must be finite");
    }
    // Positivity of k on [0, r_max]: endpoints plus dense sampling.
    constexpr int kSamples = 10000;
    for (int i = 0; i <= kSamples; ++i) {
        const double r = params_.r_max * static_cast<double>(i) / kSamples;
        if (!(k(r) > 0.0))
            throw std::invalid_argument("ModelParams: k(r) <= 0 at r = " + std::to_string(r));
    }
}

void Model::check_radius(double r) const {
    if (r < 0.0 || r > params_.r_max || !std::isfinite(r))
        throw std::domain_error("radius " + std::to_string(r) + " outside [0, r_max]");
}

double Model::k(double r) const {
    check_radius(r);
    double value = 1.0 - params_.a * pow_int(r, params_.n);
    for (const auto& term : params_.gamma) value += term.coeff * pow_int(r, term.power);
    return value;
}

double Model::k_prime(double r) const {
    check_radius(r);
    double value = -params_.n * params_.a * pow_int(r, params_.n - 1);
    for (const auto& term : params_.gamma)
        value += term.power * term.coeff * pow_int(r, term.power - 1);
    return value;
}

double Model::singularity_time(double r) const {
    const double kr = k(r);
    if (!(kr > 0.0)) throw std::domain_error("singularity_time: k(r) <= 0");
    return 1.0 / kr;
}

double Model::horizon_time(double r) const {
    const double kr = k(r);
    if (!(kr > 0.0)) throw std::domain_error("horizon_time: k(r) <= 0");
    return 1.0 / kr - (8.0 / 27.0) * kr * kr * r * r * r;
}

double Model::mass_function(double r) const {
    const double kr = k(r);
    return (2.0 / 9.0) * kr * kr * r * r * r;
}

double Model::mass_function_deriv(double r) const {
    const double kr = k(r);
    const double kp = k_prime(r);
    return (2.0 / 9.0) * kr * r * r * (2.0 * kp * r + 3.0 * kr);
}

double Model::one_minus_kt(double r, double t) const { return 1.0 - k(r) * t; }

double Model::one_minus_k(double r) const {
    check_radius(r);
    double value = params_.a * pow_int(r, params_.n);
    for (const auto& term : params_.gamma) value -= term.coeff * pow_int(r, term.power);
    return value;
}

double Model::area_radius(SpacetimePoint p) const {
    const double delta = one_minus_kt(p.r, p.t);
    if (delta < -singular_floor)
        throw std::domain_error("area_radius: post-singular point (1 - k t < 0)");
    if (delta <= singular_floor) return 0.0;
    return p.r * std::cbrt(delta * delta);
}

double Model::area_radius_rderiv(SpacetimePoint p) const {
    const double delta = one_minus_kt(p.r, p.t);
    if (delta < -singular_floor)
        throw std::domain_error("area_radius_rderiv: post-singular point (1 - k t < 0)");
    if (delta <= singular_floor) {
        // Singular-derivative signal: the (1 - k t)^(-1/3) term diverges.
        const double diverging = -p.r * k_prime(p.r) * p.t;
        return diverging >= 0.0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
    }
    const double cbrt_delta = std::cbrt(delta);
    return cbrt_delta * cbrt_delta - (2.0 / 3.0) * p.r * k_prime(p.r) * p.t / cbrt_delta;
}

double Model::energy_density(SpacetimePoint p) const {
    const double radius = area_radius(p);
    if (radius == 0.0) throw ShellFocusingError("energy_density: R = 0 (shell focusing)");
    const double rderiv = area_radius_rderiv(p);
    if (std::abs(rderiv) < crossing_floor)
        throw ShellCrossingError("energy_density: R' = 0 with R > 0 (shell crossing)");
    return mass_function_deriv(p.r) / (4.0 * std::numbers::pi * radius * radius * rderiv);
}

}  // namespace ltb
