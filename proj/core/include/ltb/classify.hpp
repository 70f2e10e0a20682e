#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltb/geodesics.hpp"
#include "ltb/model.hpp"

namespace ltb {

enum class Verdict { Naked, BlackHole };

/// Which result of the theory decides the analytic verdict:
///   T4.1  n = 1, 2            -> naked
///   T3.1  n >= 4              -> black hole
///   P5.1  n = 3, a <= 8/27    -> black hole
///   P5.2  n = 3, a >= a_c     -> naked
///   P5.3  n = 3, 8/27 < a < a_c -> black hole (necessity)
enum class Rule { T41, T31, P51, P52, P53 };

std::string to_string(Verdict v);
std::string to_string(Rule r);

struct AnalyticResult {
    Verdict verdict;
    Rule rule;
};

/// Exact rule-table lookup; total over n >= 1, a > 0.
AnalyticResult classify_analytic(int n, double a);

enum class NumericVerdict { Naked, BlackHole, Inconclusive };

std::string to_string(NumericVerdict v);

struct ProbeEvidence {
    double r1 = 0.0;
    double t1 = 0.0;
    double limit = 0.0;  // t(r_floor)
};

/// Everything the numeric side observed for one model.
struct NumericEvidence {
    std::optional<SingularStart> start;
    std::optional<Termination> termination;  // of the forward shot
    double r_escape = 0.0;                   // r reached by the forward shot
    std::vector<ProbeEvidence> probes;
    /// dphi/dt on the horizon at small r; records the horizon-slope
    /// diagnostic for the n = 3 gap.
    std::optional<double> horizon_slope;
};

struct ClassifySettings {
    /// Anchor radii for the backward probes.
    std::vector<double> probe_radii = {0.01, 0.02, 0.03, 0.04, 0.05};
    /// Anchors sit at t1 = t_h(r1) * (1 - probe_depth), just below the horizon.
    double probe_depth = 1e-2;
    /// Probe limits below 1 - probe_margin count as regular-centre evidence.
    double probe_margin = 1e-3;
    double probe_r_floor = 1e-7;
    /// |a - a_c| below this flags the n = 3 verdict as marginal.
    double marginal_width = 1e-6;
    /// A forward shot counts as escaped once it has travelled this far from
    /// the centre below the horizon. Visibility here is local: for n = 2 at
    /// small a the apparent horizon overtakes the ray at r ~ a, well inside
    /// r_max, without negating the escape.
    double min_escape_radius = 1e-3;
    /// Start radius for forward shots from the singularity.
    double start_epsilon = 1e-6;
    RootChoice root_choice = RootChoice::Smallest;
    IntegrationSettings integration;
};

struct NumericResult {
    NumericVerdict verdict = NumericVerdict::Inconclusive;
    NumericEvidence evidence;
    std::string note;  // reason when inconclusive
};

/// Independent numeric verdict: Naked when a singular start exists and the
/// forward shot leaves the singularity below the horizon, either reaching
/// r_max or travelling at least min_escape_radius before the horizon
/// overtakes it; BlackHole when no start exists and every backward probe
/// limit sits below 1 - probe_margin; Inconclusive otherwise (never coerced).
NumericResult classify_numeric(const Model& model, const ClassifySettings& settings = {});

struct ClassificationReport {
    ModelParams params;
    AnalyticResult analytic;
    NumericResult numeric;
    bool agree = false;
    bool marginal = false;
};

/// Runs both classifiers and reports agreement.
ClassificationReport classify(const Model& model, const ClassifySettings& settings = {});

}  // namespace ltb
