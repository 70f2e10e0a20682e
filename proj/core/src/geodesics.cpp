#include "ltb/geodesics.hpp"

#include <cmath>
#include <functional>

#include <json.hpp>

#include "ltb/roots.hpp"
#include "detail/format.hpp"

namespace ltb {

namespace {

double pre_singular_delta(const Model& model, double r, double t, const char* who) {
    const double delta = model.one_minus_kt(r, t);
    if (delta <= Model::singular_floor)
        throw std::domain_error(std::string(who) + ": point at or beyond the singularity (1 - k t <= floor)");
    return delta;
}

}  // namespace

double phi(const Model& model, double r, double t) {
    const double delta = pre_singular_delta(model, r, t, "phi");
    const double numerator = delta - (2.0 / 3.0) * r * model.k_prime(r) * t;
    return numerator / std::cbrt(delta);
}

double dphi_dt(const Model& model, double r, double t) {
    const double delta = pre_singular_delta(model, r, t, "dphi_dt");
    const double k = model.k(r);
    const double kp = model.k_prime(r);
    const double numerator = k * delta + r * kp * (1.0 - (2.0 / 3.0) * k * t);
    const double cbrt_delta = std::cbrt(delta);
    return -(2.0 / 3.0) * numerator / (delta * cbrt_delta);
}

double phi_on_horizon(const Model& model, double r) {
    const double k = model.k(r);
    const double kp = model.k_prime(r);
    const double delta = (8.0 / 27.0) * k * k * k * r * r * r;  // 1 - k t_h, exact
    const double t_h = (1.0 - delta) / k;
    return (delta - (2.0 / 3.0) * r * kp * t_h) / std::cbrt(delta);
}

double dphi_dt_on_horizon(const Model& model, double r) {
    const double k = model.k(r);
    const double kp = model.k_prime(r);
    const double delta = (8.0 / 27.0) * k * k * k * r * r * r;
    // 1 - (2/3) k t_h = 1/3 + (2/3) delta, exact on the horizon.
    const double numerator = k * delta + r * kp * (1.0 / 3.0 + (2.0 / 3.0) * delta);
    const double cbrt_delta = std::cbrt(delta);
    return -(2.0 / 3.0) * numerator / (delta * cbrt_delta);
}

double horizon_time_deriv(const Model& model, double r) {
    const double k = model.k(r);
    const double kp = model.k_prime(r);
    return -kp / (k * k) - (8.0 / 27.0) * (2.0 * k * kp * r * r * r + 3.0 * k * k * r * r);
}

std::optional<SingularStart> singular_start(const Model& model, RootChoice choice) {
    const int n = model.n();
    const double a = model.a();
    if (n == 1 || n == 2) {
        return SingularStart{1.0 + 2.0 * n / 3.0, std::cbrt(a * a), 1e-6};
    }
    if (n == 3) {
        const RootReport report = solve_roots(a);
        std::vector<double> launchable;
        for (double x : report.admissible)
            if (x > 0.0 && x < a) launchable.push_back(x);
        if (launchable.empty()) return std::nullopt;
        const double x0 =
            choice == RootChoice::Smallest ? launchable.front() : launchable.back();
        return SingularStart{3.0, x0, 1e-6};
    }
    return std::nullopt;  // n >= 4: no naked start
}

namespace {

// 1 - k t for the ansatz t = 1 + x r^alpha, assembled as (1 - k) - k x r^alpha.
// The direct 1 - k*t loses all digits once the margin drops below ~1e-16 of t,
// which happens along every n = 3 path near the start; this form keeps full
// relative accuracy at any scale.
double ansatz_delta(const Model& model, double alpha, double r, double x) {
    return model.one_minus_k(r) - model.k(r) * x * std::pow(r, alpha);
}

// Relative singular floor for the transformed equation: the ansatz margin is
// compared against the local scale 1 - k instead of the absolute t-space
// floor (which n = 3 paths legitimately undercut near r = 0).
bool ansatz_singular(const Model& model, double r, double delta) {
    return delta <= Model::singular_floor * model.one_minus_k(r);
}

// The singular locus attracts trapped rays with unbounded slope, so the step
// controller underflows a little before 1 - k t reaches the hard floor. An
// underflow inside a vanishing neighbourhood of the locus is the singularity
// hit; anywhere else it is a genuine failure.
Termination termination_from(const ode::Result& run,
                             const std::function<bool(double, double)>& near_singularity) {
    const double r_last = run.nodes.back().x;
    switch (run.status) {
        case ode::Status::ReachedEnd:
            return {TerminationKind::ReachedRMax, r_last};
        case ode::Status::EventHit:
            return {run.event_index == 0 ? TerminationKind::CrossedHorizon
                                         : TerminationKind::HitSingularity,
                    run.event_x};
        default:
            if (near_singularity(r_last, run.nodes.back().y))
                return {TerminationKind::HitSingularity, r_last};
            return {TerminationKind::StepFailure, r_last};
    }
}

constexpr double kSingularProximity = 1e-6;  // relative to the local scale 1 - k

}  // namespace

double transformed_rhs(const Model& model, double alpha, double r, double x) {
    if (!(r > 0.0)) throw std::domain_error("transformed_rhs: r must be positive");
    const double delta = ansatz_delta(model, alpha, r, x);
    if (ansatz_singular(model, r, delta))
        throw std::domain_error("transformed_rhs: ansatz point at or beyond the singularity");
    const double r_alpha = std::pow(r, alpha);
    const double t = 1.0 + x * r_alpha;
    const double phi_value =
        (delta - (2.0 / 3.0) * r * model.k_prime(r) * t) / std::cbrt(delta);
    return (phi_value - alpha * x * r_alpha / r) / r_alpha;
}

namespace {

GeodesicPath run_x_form(const Model& model, double alpha, double r0, double x0, double r_end,
                        const IntegrationSettings& settings) {
    ode::Rk45 solver(
        [&](double r, double x) { return transformed_rhs(model, alpha, r, x); }, settings);
    // Event 0: horizon crossing, t - t_h >= 0, assembled in complement form
    // (x r^alpha and t_h - 1 both scale like r^n near the centre).
    solver.add_event([&](double r, double x) {
        const double k = model.k(r);
        return x * std::pow(r, alpha) - model.one_minus_k(r) / k +
               (8.0 / 27.0) * k * k * r * r * r;
    });
    // Event 1: singularity proximity (relative floor).
    solver.add_event([&](double r, double x) {
        return Model::singular_floor * model.one_minus_k(r) -
               ansatz_delta(model, alpha, r, x);
    });

    const ode::Result run = solver.integrate(r0, x0, r_end);

    GeodesicPath path;
    path.alpha = alpha;
    path.start_r = r0;
    path.start_t = 1.0 + x0 * std::pow(r0, alpha);
    path.samples.reserve(run.nodes.size());
    path.x.reserve(run.nodes.size());
    for (const auto& node : run.nodes) {
        path.samples.push_back({node.x, 1.0 + node.y * std::pow(node.x, alpha)});
        path.x.push_back(node.y);
    }
    path.termination = termination_from(run, [&](double r, double x) {
        return ansatz_delta(model, alpha, r, x) <= kSingularProximity * model.one_minus_k(r);
    });
    return path;
}

}  // namespace

GeodesicPath integrate_from_singularity(const Model& model, const SingularStart& start,
                                        double r_max, const IntegrationSettings& settings) {
    if (!(start.epsilon > 0.0) || !(start.epsilon < r_max))
        throw std::invalid_argument("integrate_from_singularity: need 0 < epsilon < r_max");
    GeodesicPath path = run_x_form(model, start.alpha, start.epsilon, start.x0, r_max, settings);
    path.start = start;
    return path;
}

GeodesicPath integrate_x_from(const Model& model, double alpha, double r0, double x0,
                              double r_max, const IntegrationSettings& settings) {
    return run_x_form(model, alpha, r0, x0, r_max, settings);
}

GeodesicPath integrate_from_point(const Model& model, double r0, double t0, double r_max,
                                  const IntegrationSettings& settings) {
    ode::Rk45 solver([&](double r, double t) { return phi(model, r, t); }, settings);
    solver.add_event([&](double r, double t) { return t - model.horizon_time(r); });
    solver.add_event(
        [&](double r, double t) { return Model::singular_floor - model.one_minus_kt(r, t); });
    const ode::Result run = solver.integrate(r0, t0, r_max);

    GeodesicPath path;
    path.start_r = r0;
    path.start_t = t0;
    for (const auto& node : run.nodes) path.samples.push_back({node.x, node.y});
    path.termination = termination_from(run, [&](double r, double t) {
        return model.one_minus_kt(r, t) <= kSingularProximity * model.one_minus_k(r);
    });
    return path;
}

double backward_probe(const Model& model, double r1, double t1, double r_floor,
                      const IntegrationSettings& settings) {
    if (!(r_floor > 0.0) || !(r_floor < r1))
        throw std::invalid_argument("backward_probe: need 0 < r_floor < r1");
    if (!(t1 < model.horizon_time(r1)))
        throw std::domain_error("backward_probe: anchor must sit below the horizon");
    if (model.one_minus_kt(r1, t1) <= Model::singular_floor)
        throw std::domain_error("backward_probe: anchor is post-singular");

    ode::Rk45 solver([&](double r, double t) { return phi(model, r, t); }, settings);
    const ode::Result run = solver.integrate(r1, t1, r_floor);
    if (run.status != ode::Status::ReachedEnd)
        throw std::domain_error("backward_probe: backward path left the pre-singular region");
    return run.nodes.back().y;
}

std::string to_string(TerminationKind kind) {
    switch (kind) {
        case TerminationKind::ReachedRMax: return "ReachedRMax";
        case TerminationKind::CrossedHorizon: return "CrossedHorizon";
        case TerminationKind::HitSingularity: return "HitSingularity";
        case TerminationKind::StepFailure: return "StepFailure";
    }
    return "Unknown";
}

namespace {

double sample_delta(const Model& model, const GeodesicPath& path, std::size_t i) {
    if (!path.x.empty())
        return ansatz_delta(model, path.alpha, path.samples[i].r, path.x[i]);
    return model.one_minus_kt(path.samples[i].r, path.samples[i].t);
}

}  // namespace

std::string path_to_csv(const Model& model, const GeodesicPath& path) {
    std::string out = "r,t,t_h,t_s,one_minus_kt\n";
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        const auto& s = path.samples[i];
        out += detail::format_double(s.r);
        out += ',';
        out += detail::format_double(s.t);
        out += ',';
        out += detail::format_double(model.horizon_time(s.r));
        out += ',';
        out += detail::format_double(model.singularity_time(s.r));
        out += ',';
        out += detail::format_double(sample_delta(model, path, i));
        out += '\n';
    }
    return out;
}

std::string path_to_json(const Model& model, const GeodesicPath& path) {
    nlohmann::ordered_json j;
    if (path.start) {
        j["start"] = {{"type", "singular"},
                      {"alpha", path.start->alpha},
                      {"x0", path.start->x0},
                      {"epsilon", path.start->epsilon}};
    } else {
        j["start"] = {{"type", "regular"}, {"r", path.start_r}, {"t", path.start_t}};
    }
    j["termination"] = {{"kind", to_string(path.termination.kind)},
                        {"r", path.termination.r}};
    auto samples = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        const auto& s = path.samples[i];
        samples.push_back({{"r", s.r},
                           {"t", s.t},
                           {"t_h", model.horizon_time(s.r)},
                           {"t_s", model.singularity_time(s.r)},
                           {"one_minus_kt", sample_delta(model, path, i)}});
    }
    j["samples"] = std::move(samples);
    return j.dump(2);
}

}  // namespace ltb
