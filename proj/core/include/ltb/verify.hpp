#pragma once

#include <span>
#include <string>
#include <vector>

#include "ltb/geodesics.hpp"
#include "ltb/model.hpp"

namespace ltb {

/// Result of one closed-form identity check over an r grid.
struct IdentityCheckResult {
    std::string name;
    std::vector<double> grid;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Compares dt_h/dr - phi(r, t_h(r)) computed two ways: (i) the exact horizon
/// derivative minus phi evaluated on the horizon, in extended precision, and
/// (ii) the closed form -(4/3) k r^2 ((2/3) k' r + k). Also asserts the
/// margin is negative on the grid (the horizon is a subsolution).
IdentityCheckResult check_subsolution_margin(const Model& model, std::span<const double> r_grid,
                                             double tolerance = 1e-10);

/// Compares phi(r, t_h(r)) against -k'/k^2 + (4/9) k^2 r^2 + (8/27) k k' r^3.
IdentityCheckResult check_phi_on_horizon(const Model& model, std::span<const double> r_grid,
                                         double tolerance = 1e-10);

/// Checks dphi/dt on the horizon against the leading-order form
/// -(2/3)^(-3) [(8/27) r^(-1) - (n a / 3) r^(n-4)]: the relative deviation
/// must shrink under r refinement (asymptotic claim, not an equality), and
/// the exact values must carry the expected sign.
struct DphidtHorizonResult {
    IdentityCheckResult convergence;   // deviation at the two finest radii
    std::vector<double> exact_values;  // dphi/dt(t_h) on the grid
};
DphidtHorizonResult check_dphidt_on_horizon(const Model& model, std::span<const double> r_grid);

/// Numerically reconstructed coefficient bounds of the reduced equation
/// r y' = A(r, y) y + B(r, y) r^beta, y = x - a^(2/3), beta = 1 - n/3,
/// sampled on [0, r_star] x [-band, band]. A must be uniformly negative and
/// B uniformly one-signed; the induced power-law envelopes are
///   z_lo(r) = c_lo r^beta <= y(r) <= c_hi(r) = c_hi r^beta
/// with the coefficient pair chosen sign-correctly from {B_i / (beta - A_j)}.
struct EnvelopeBounds {
    double beta = 0.0;
    double A0 = 0.0, A1 = 0.0;  // A0 <= A(r,y) <= A1 < 0
    double B0 = 0.0, B1 = 0.0;  // B0 <= B(r,y) <= B1, single sign
    double c_lo = 0.0, c_hi = 0.0;
    double A_center = 0.0;  // A(0, 0) estimate at the smallest sampled r
    double B_center = 0.0;
    double r_star = 0.0;
    double band = 0.0;

    double z_lo(double r) const;
    double z_hi(double r) const;
};

/// Reconstructs A and B from the unexpanded transformed ODE: A by centred
/// finite differences of r x'(r, y) in y, B from the residual over r^beta.
/// Requires n in {1, 2}. Throws std::runtime_error when the sampled A is not
/// uniformly negative or B changes sign on the window (shrink the window).
EnvelopeBounds estimate_envelope(const Model& model, double r_star, double epsilon_band);

/// Shoots the transformed equation from an in-band start at r = epsilon and
/// asserts z_lo(r) <= x(r) - a^(2/3) <= z_hi(r) up to r_star. The worst
/// signed margin is reported through max_rel_err (negative margin = pass).
IdentityCheckResult check_envelope_containment(const Model& model, const GeodesicPath& path,
                                               const EnvelopeBounds& bounds);

/// Least-squares slope of log(t - 1) against log r over [r_lo, r_hi].
/// Throws std::runtime_error when fewer than 10 samples fall in the window.
double fit_exponent(const GeodesicPath& path, double r_lo, double r_hi);

}  // namespace ltb
