#include "ltb/classify.hpp"

#include <cmath>

#include "ltb/roots.hpp"

namespace ltb {

std::string to_string(Verdict v) { return v == Verdict::Naked ? "Naked" : "BlackHole"; }

std::string to_string(Rule r) {
    switch (r) {
        case Rule::T41: return "T4.1";
        case Rule::T31: return "T3.1";
        case Rule::P51: return "P5.1";
        case Rule::P52: return "P5.2";
        case Rule::P53: return "P5.3";
    }
    return "?";
}

std::string to_string(NumericVerdict v) {
    switch (v) {
        case NumericVerdict::Naked: return "Naked";
        case NumericVerdict::BlackHole: return "BlackHole";
        case NumericVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

AnalyticResult classify_analytic(int n, double a) {
    if (n < 1 || !(a > 0.0))
        throw std::domain_error("classify_analytic: need n >= 1 and a > 0");
    if (n <= 2) return {Verdict::Naked, Rule::T41};
    if (n >= 4) return {Verdict::BlackHole, Rule::T31};
    const CriticalConstants c = critical_constants();
    if (a <= c.horizon_threshold) return {Verdict::BlackHole, Rule::P51};
    if (a >= c.a_c) return {Verdict::Naked, Rule::P52};
    return {Verdict::BlackHole, Rule::P53};
}

NumericResult classify_numeric(const Model& model, const ClassifySettings& settings) {
    NumericResult out;
    out.evidence.start = singular_start(model, settings.root_choice);

    if (model.n() == 3) {
        const double r_diag = std::min(1e-4, 0.1 * model.r_max());
        out.evidence.horizon_slope = dphi_dt_on_horizon(model, r_diag);
    }

    if (out.evidence.start) {
        out.evidence.start->epsilon = settings.start_epsilon;
        const GeodesicPath path = integrate_from_singularity(model, *out.evidence.start,
                                                             model.r_max(), settings.integration);
        out.evidence.termination = path.termination;
        out.evidence.r_escape = path.termination.r;
        const bool reached = path.termination.kind == TerminationKind::ReachedRMax;
        // A horizon crossing far from the start still certifies a ray that
        // escaped the singularity; visibility is only claimed locally.
        const bool escaped_locally =
            path.termination.kind == TerminationKind::CrossedHorizon &&
            path.termination.r >= settings.min_escape_radius;
        if (reached || escaped_locally) {
            out.verdict = NumericVerdict::Naked;
            if (escaped_locally)
                out.note = "ray escaped to r = " + std::to_string(path.termination.r) +
                           " before the apparent horizon overtook it";
        } else {
            out.verdict = NumericVerdict::Inconclusive;
            out.note = "singular start exists but the forward shot ended with " +
                       to_string(path.termination.kind);
        }
        return out;
    }

    bool all_below = true;
    for (const double r1 : settings.probe_radii) {
        if (r1 >= model.r_max()) continue;  // anchors must lie inside the domain
        const double t1 = model.horizon_time(r1) * (1.0 - settings.probe_depth);
        const double limit =
            backward_probe(model, r1, t1, settings.probe_r_floor, settings.integration);
        out.evidence.probes.push_back({r1, t1, limit});
        all_below = all_below && limit < 1.0 - settings.probe_margin;
    }
    if (all_below && !out.evidence.probes.empty()) {
        out.verdict = NumericVerdict::BlackHole;
    } else {
        out.verdict = NumericVerdict::Inconclusive;
        out.note = "no singular start, but probe limits do not clear the margin";
    }
    return out;
}

ClassificationReport classify(const Model& model, const ClassifySettings& settings) {
    ClassificationReport report;
    report.params = model.params();
    report.analytic = classify_analytic(model.n(), model.a());
    report.numeric = classify_numeric(model, settings);
    report.marginal =
        model.n() == 3 &&
        std::abs(model.a() - critical_constants().a_c) <= settings.marginal_width;
    const bool numeric_naked = report.numeric.verdict == NumericVerdict::Naked;
    const bool numeric_bh = report.numeric.verdict == NumericVerdict::BlackHole;
    report.agree = (report.analytic.verdict == Verdict::Naked && numeric_naked) ||
                   (report.analytic.verdict == Verdict::BlackHole && numeric_bh);
    return report;
}

}  // namespace ltb
