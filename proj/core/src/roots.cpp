#include "ltb/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace ltb {

CriticalConstants critical_constants() {
    const double s = 26.0 + 15.0 * std::sqrt(3.0);
    return {2.0 * s / 27.0, 2.0 / (27.0 * s), 8.0 / 27.0};
}

std::array<double, 5> quartic_coefficients(double a) {
    if (!(a > 0.0)) throw std::domain_error("quartic_coefficients: a must be > 0");
    return {-27.0, 27.0 * a + 1.0, -9.0 * a, 27.0 * a * a, -27.0 * a * a * a};
}

double root_equation(double a, double x) {
    const double u = 3.0 * a - x;
    return 27.0 * x * x * x * (a - x) - u * u * u;
}

double Q(double a, double x) {
    if (x >= a) throw std::domain_error("Q: requires x < a");
    return (3.0 * a - x) / std::cbrt(a - x) - 3.0 * x;
}

namespace {

// Odd-cube-root extension of Q; valid on both sides of x = a and zero exactly
// at the sign-consistent roots of the quartic.
double q_residual(double a, double x) {
    const double d = a - x;
    if (d == 0.0) return std::numeric_limits<double>::infinity();  // never a root there
    return (3.0 * a - x) / std::cbrt(d) - 3.0 * x;
}

struct Poly4 {
    std::array<long double, 5> c;  // degree 4 down to 0

    long double eval(long double x) const {
        return (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
    }
    long double scale(long double x) const {
        const long double ax = std::abs(x);
        return ((((std::abs(c[0]) * ax + std::abs(c[1])) * ax + std::abs(c[2])) * ax +
                 std::abs(c[3])) *
                    ax +
                std::abs(c[4]));
    }
    long double zero_tol(long double x) const {
        return 64.0L * std::numeric_limits<long double>::epsilon() * scale(x);
    }
};

long double bisect(const auto& f, long double lo, long double hi) {
    long double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (mid == lo || mid == hi) break;
        const long double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5L * (lo + hi);
}

// Real roots of a quadratic, ascending; empty when the discriminant is negative.
std::vector<long double> quadratic_roots(long double a, long double b, long double c) {
    if (a == 0.0L) {
        if (b == 0.0L) return {};
        return {-c / b};
    }
    const long double disc = b * b - 4.0L * a * c;
    if (disc < 0.0L) return {};
    const long double sq = std::sqrt(disc);
    const long double q = -0.5L * (b + (b >= 0 ? sq : -sq));
    std::vector<long double> out;
    out.push_back(q / a);
    if (q != 0.0L) out.push_back(c / q);
    std::sort(out.begin(), out.end());
    return out;
}

// Real roots of a cubic by bisection between its stationary points.
std::vector<long double> cubic_real_roots(long double c3, long double c2, long double c1,
                                          long double c0, long double lo, long double hi) {
    const auto f = [&](long double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
    std::vector<long double> nodes = {lo};
    for (long double q : quadratic_roots(3.0L * c3, 2.0L * c2, c1))
        if (q > lo && q < hi) nodes.push_back(q);
    nodes.push_back(hi);
    std::vector<long double> roots;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const long double fu = f(nodes[i]), fv = f(nodes[i + 1]);
        if (fu == 0.0L) roots.push_back(nodes[i]);
        if ((fu < 0) != (fv < 0)) roots.push_back(bisect(f, nodes[i], nodes[i + 1]));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

struct RealRoots {
    std::vector<double> roots;  // ascending
    bool double_root = false;
};

// All real roots of the critical quartic, found by bisection between its
// stationary points. Stays exact through the double-root boundaries: a
// stationary value within rounding noise of zero is accepted as a double
// root, which keeps the "admissible nonempty" predicate sharp enough for
// the 1e-10 bisections on a.
RealRoots real_quartic_roots(double a) {
    const auto cd = quartic_coefficients(a);
    Poly4 p{{cd[0], cd[1], cd[2], cd[3], cd[4]}};

    long double bound = 0.0L;
    for (int i = 1; i < 5; ++i) bound = std::max(bound, std::abs(p.c[i] / p.c[0]));
    bound += 1.0L;

    const std::vector<long double> crit =
        cubic_real_roots(4.0L * p.c[0], 3.0L * p.c[1], 2.0L * p.c[2], p.c[3], -bound, bound);

    std::vector<long double> nodes = {-bound};
    nodes.insert(nodes.end(), crit.begin(), crit.end());
    nodes.push_back(bound);

    std::vector<long double> found;
    const auto f = [&](long double x) { return p.eval(x); };
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const long double fu = f(nodes[i]), fv = f(nodes[i + 1]);
        if (std::abs(fu) <= p.zero_tol(nodes[i]) || std::abs(fv) <= p.zero_tol(nodes[i + 1]))
            continue;  // handled by the stationary-value pass below
        if ((fu < 0) != (fv < 0)) found.push_back(bisect(f, nodes[i], nodes[i + 1]));
    }
    for (long double c : crit)
        if (std::abs(f(c)) <= p.zero_tol(c)) found.push_back(c);

    std::sort(found.begin(), found.end());
    RealRoots out;
    for (long double x : found) {
        const double xd = static_cast<double>(x);
        if (!out.roots.empty() &&
            std::abs(xd - out.roots.back()) < 1e-6 * std::max(1.0, std::abs(xd))) {
            // Merge to the pair midpoint, the best double-root estimate.
            out.roots.back() = 0.5 * (out.roots.back() + xd);
            out.double_root = true;
            continue;
        }
        out.roots.push_back(xd);
    }
    return out;
}

std::vector<double> admissible_roots(double a, bool* double_root = nullptr) {
    const RealRoots real = real_quartic_roots(a);
    if (double_root) *double_root = real.double_root;
    std::vector<double> out;
    for (double x : real.roots) {
        if (!(x > 1e-12)) continue;
        const double q = q_residual(a, x);
        if (std::abs(q) <= 1e-10 * std::max(1.0, std::abs(x))) out.push_back(x);
    }
    return out;
}

}  // namespace

RootReport solve_roots(double a) {
    if (!(a > 0.0)) throw std::domain_error("solve_roots: a must be > 0");
    RootReport report;
    report.a = a;
    report.quartic_coeffs = quartic_coefficients(a);

    // Companion matrix of the monic quartic, eigenvalues = all roots.
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 3; ++i) companion(i + 1, i) = 1.0;
    for (int i = 0; i < 4; ++i)
        companion(i, 3) = -report.quartic_coeffs[4 - i] / report.quartic_coeffs[0];
    Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, /*computeEigenvectors=*/false);
    for (int i = 0; i < 4; ++i) report.all_roots.push_back(solver.eigenvalues()(i));

    report.admissible = admissible_roots(a, &report.double_root);

    // Snap near-real eigenvalues onto the polished real roots so the full
    // spectrum and the admissible set agree.
    std::array<bool, 4> snapped{};
    const auto snap_to = [&](double x) {
        int best = -1;
        double best_dist = 1e-3 * std::max(1.0, std::abs(x));
        for (int i = 0; i < 4; ++i) {
            if (snapped[i]) continue;
            const double dist = std::abs(report.all_roots[i] - std::complex<double>(x, 0.0));
            if (dist < best_dist) {
                best_dist = dist;
                best = i;
            }
        }
        if (best >= 0) {
            report.all_roots[best] = {x, 0.0};
            snapped[best] = true;
        }
    };
    for (double x : report.admissible) snap_to(x);
    if (report.double_root && report.admissible.size() == 1)
        snap_to(report.admissible.front());  // the merged pair occupies two slots
    std::sort(report.all_roots.begin(), report.all_roots.end(),
              [](const std::complex<double>& u, const std::complex<double>& v) {
                  if (u.real() != v.real()) return u.real() < v.real();
                  return u.imag() < v.imag();
              });
    return report;
}

namespace {

double bisect_on_predicate(double lo, double hi, bool value_at_lo, double width,
                           const char* what) {
    const auto pred = [](double a) { return !admissible_roots(a).empty(); };
    if (pred(lo) != value_at_lo || pred(hi) != !value_at_lo)
        throw std::runtime_error(std::string(what) +
                                 ": predicate is not monotone on the bracket");
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid) == value_at_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double find_critical_a_numeric() {
    // Roots absent in the gap at a = 1, present from a_c on.
    return bisect_on_predicate(1.0, 10.0, false, 1e-10, "find_critical_a_numeric");
}

double find_a0_numeric() {
    // Roots present on the low branch at a = 1e-5, absent above a_0.
    return bisect_on_predicate(1e-5, 0.1, true, 1e-12, "find_a0_numeric");
}

}  // namespace ltb
