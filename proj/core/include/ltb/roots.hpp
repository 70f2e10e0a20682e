#pragma once

#include <array>
#include <complex>
#include <vector>

namespace ltb {

/// Closed-form constants of the n = 3 critical case.
struct CriticalConstants {
    double a_c;                // 2 (26 + 15 sqrt(3)) / 27
    double a_0;                // (2/27) (26 + 15 sqrt(3))^(-1)
    double horizon_threshold;  // 8/27
};

CriticalConstants critical_constants();

/// Coefficients of the expanded critical root equation
///   27 x^3 (a - x) - (3a - x)^3 = 0
/// returned degree-4 first: {-27, 27a + 1, -9a, 27a^2, -27a^3}.
std::array<double, 5> quartic_coefficients(double a);

/// Direct evaluation of 27 x^3 (a - x) - (3a - x)^3.
double root_equation(double a, double x);

/// Q(a, x) = (3a - x)/(a - x)^(1/3) - 3x, the unreduced form of the root
/// equation. Domain: x < a. Throws std::domain_error at x >= a.
double Q(double a, double x);

/// All roots of the critical quartic for a given amplitude a.
///
/// admissible holds the real positive roots, each verified against the
/// odd-cube-root extension of Q to filter cube-induced spurious solutions
/// and deduplicated at 1e-6 relative (double roots appear once). The set is
/// nonempty exactly for a <= a_0 or a >= a_c. Roots with x < a are the ones
/// that seed geodesics below the apparent horizon (only the a >= a_c branch);
/// for a <= a_0 the roots satisfy x > 3a and no sub-horizon start exists.
struct RootReport {
    double a = 0.0;
    std::array<double, 5> quartic_coeffs{};
    std::vector<std::complex<double>> all_roots;  // exactly 4, with multiplicity
    std::vector<double> admissible;               // sorted ascending
    bool double_root = false;                     // admissible entries merged
};

/// Companion-matrix eigenvalues for the full root set, plus a critical-point
/// bracketing pass (Newton-polished bisection between the stationary points
/// of the quartic) that keeps the real-root count exact through the
/// double-root boundaries at a_0 and a_c.
RootReport solve_roots(double a);

/// Recovers a_c by bisecting "solve_roots(a).admissible nonempty" over
/// [1, 10] to 1e-10. Throws std::runtime_error if the bracket endpoints do
/// not straddle the transition.
double find_critical_a_numeric();

/// Same scheme on the lower branch: bisects over [1e-5, 0.1] for the
/// supremum a_0 of the low-amplitude root region, to 1e-12.
double find_a0_numeric();

}  // namespace ltb
