#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltb/model.hpp"
#include "ltb/ode.hpp"

namespace ltb {

/// Right-hand side of the outgoing radial null geodesic equation
///   dt/dr = phi(r, t) = (1 - k t - (2/3) r k' t) / (1 - k t)^(1/3).
/// Identical to Model::area_radius_rderiv on the pre-singular domain.
/// Throws std::domain_error when 1 - k t <= singular_floor.
double phi(const Model& model, double r, double t);

/// d(phi)/dt = -(2/3) [k (1 - k t) + r k' (1 - (2/3) k t)] / (1 - k t)^(4/3).
double dphi_dt(const Model& model, double r, double t);

/// phi evaluated on the apparent horizon using the exact relation
/// 1 - k t_h = (8/27) k^3 r^3 (avoids the cancellation in forming t_h first).
double phi_on_horizon(const Model& model, double r);

/// dphi/dt on the apparent horizon, same exact substitution.
double dphi_dt_on_horizon(const Model& model, double r);

/// Exact derivative of the horizon curve,
///   dt_h/dr = -k'/k^2 - (8/27) (2 k k' r^3 + 3 k^2 r^2).
double horizon_time_deriv(const Model& model, double r);

/// Ansatz data for a geodesic leaving the central singularity:
/// t(r) = 1 + x(r) r^alpha with x(epsilon) = x0.
struct SingularStart {
    double alpha = 0.0;
    double x0 = 0.0;
    double epsilon = 1e-6;
};

/// Which admissible root seeds the n = 3 start.
enum class RootChoice { Smallest, Largest };

/// Singular initial data for the central null geodesic:
///   n = 1, 2 : alpha = 1 + 2n/3, x0 = a^(2/3)
///   n = 3    : alpha = 3, x0 = an admissible root x of the critical root
///              equation with 0 < x < a (requires a >= a_c)
/// Returns nullopt when no such start exists (n >= 4, or n = 3 without a
/// launchable root); that absence is the "no naked start" outcome consumed
/// by the classifier.
std::optional<SingularStart> singular_start(const Model& model,
                                            RootChoice choice = RootChoice::Smallest);

/// x'(r) for the transformed unknown x = (t - 1)/r^alpha, obtained by exact
/// substitution into the geodesic equation:
///   x' = [phi(r, 1 + x r^alpha) - alpha x r^(alpha - 1)] / r^alpha.
double transformed_rhs(const Model& model, double alpha, double r, double x);

enum class TerminationKind { ReachedRMax, CrossedHorizon, HitSingularity, StepFailure };

struct Termination {
    TerminationKind kind = TerminationKind::ReachedRMax;
    double r = 0.0;
};

std::string to_string(TerminationKind kind);

struct PathSample {
    double r = 0.0;
    double t = 0.0;
};

/// A sampled solution t(r) of the geodesic equation with strictly increasing
/// r. When produced by the x-form integrator, x holds the transformed samples
/// and alpha the ansatz exponent; every sample except a HitSingularity
/// endpoint satisfies 1 - k t > Model::singular_floor.
struct GeodesicPath {
    std::vector<PathSample> samples;
    std::vector<double> x;  // transformed samples, empty for t-form runs
    double alpha = 0.0;
    std::optional<SingularStart> start;  // set for singular starts
    double start_r = 0.0;
    double start_t = 0.0;
    Termination termination;
};

/// Integrates the transformed ODE from r = start.epsilon with
/// x(epsilon) = start.x0, watching for horizon crossing (t >= t_h) and
/// singularity proximity. The singular locus has unbounded slope, so a step
/// underflow within a vanishing neighbourhood of it (1 - k t below 1e-6 of
/// the local scale 1 - k) also reports HitSingularity. Samples record every
/// accepted step.
GeodesicPath integrate_from_singularity(const Model& model, const SingularStart& start,
                                        double r_max, const IntegrationSettings& settings = {});

/// Same integration in the transformed variable from a regular interior
/// start x(r0) = x0; used for comparison-envelope experiments.
GeodesicPath integrate_x_from(const Model& model, double alpha, double r0, double x0,
                              double r_max, const IntegrationSettings& settings = {});

/// Integrates dt/dr = phi forward from a regular point (r0, t0).
GeodesicPath integrate_from_point(const Model& model, double r0, double t0, double r_max,
                                  const IntegrationSettings& settings = {});

/// Integrates dt/dr = phi backward from (r1, t1) down to r_floor and returns
/// t(r_floor). With t1 below the horizon this is monotone decreasing toward
/// the centre, so the returned value bounds the emission time from below.
/// Preconditions: 0 < r_floor < r1, t1 < t_h(r1), point pre-singular.
double backward_probe(const Model& model, double r1, double t1, double r_floor,
                      const IntegrationSettings& settings = {});

/// CSV export with header r,t,t_h,t_s,one_minus_kt, one row per sample.
std::string path_to_csv(const Model& model, const GeodesicPath& path);

/// JSON export including start metadata and termination reason.
std::string path_to_json(const Model& model, const GeodesicPath& path);

}  // namespace ltb
