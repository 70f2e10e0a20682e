#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ltb {

/// Raised when the energy density is evaluated on the shell-focusing locus (R = 0).
struct ShellFocusingError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised when the energy density is evaluated at a shell crossing (R' = 0, R > 0).
struct ShellCrossingError : std::domain_error {
    using std::domain_error::domain_error;
};

/// One term of the higher-order correction gamma(r) = sum c_p r^p.
struct GammaTerm {
    int power = 0;
    double coeff = 0.0;
};

/// Collapse model parameters. The velocity profile is
///   k(r) = 1 - a r^n + gamma(r),
/// normalised so that k(0) = 1. Every gamma power must be >= n + 1 and k must
/// stay positive on [0, r_max].
struct ModelParams {
    int n = 1;
    double a = 1.0;
    std::vector<GammaTerm> gamma;
    double r_max = 0.1;
};

/// A comoving-coordinate event (r, t). Pre-singular while 1 - k(r) t > 0.
struct SpacetimePoint {
    double r = 0.0;
    double t = 0.0;
};

/// Marginally bound dust cloud background. All closed-form quantities of the
/// collapse geometry live here: the velocity profile k, the singularity curve
/// t_s = 1/k, the apparent horizon t_h, the area radius R = r (1 - k t)^(2/3)
/// and its radial derivative, the Misner-Sharp mass F = (2/9) k^2 r^3 and the
/// energy density F' / (4 pi R^2 R').
///
/// All member functions are pure; a Model is safe to share across threads.
class Model {
  public:
    /// Validates the parameters: n >= 1, a > 0, gamma powers >= n + 1,
    /// r_max > 0 and k > 0 on [0, r_max] (dense sampling plus endpoints;
    /// cheap, not a rigorous positivity proof).
    /// Throws std::invalid_argument on violation.
    explicit Model(ModelParams params);

    const ModelParams& params() const { return params_; }
    int n() const { return params_.n; }
    double a() const { return params_.a; }
    double r_max() const { return params_.r_max; }

    /// k(r) = 1 - a r^n + gamma(r). Domain: 0 <= r <= r_max.
    double k(double r) const;

    /// Exact polynomial derivative k'(r) = -n a r^(n-1) + gamma'(r).
    double k_prime(double r) const;

    /// Singularity curve t_s(r) = 1/k(r); the comoving time at which shell r
    /// becomes singular.
    double singularity_time(double r) const;

    /// Apparent horizon t_h(r) = t_s(r) - (8/27) k(r)^2 r^3.
    /// Satisfies t_h(r) < t_s(r) for every r > 0.
    double horizon_time(double r) const;

    /// Misner-Sharp mass F(r) = (2/9) k(r)^2 r^3.
    double mass_function(double r) const;

    /// F'(r) = (2/9) k r^2 (2 k' r + 3 k).
    double mass_function_deriv(double r) const;

    /// Area radius R = r (1 - k t)^(2/3). Values of 1 - k t within
    /// singular_floor of zero snap to the singular locus and return 0.
    /// Throws std::domain_error for post-singular points.
    double area_radius(SpacetimePoint p) const;

    /// dR/dr = (1 - k t)^(2/3) - (2/3) r k' t (1 - k t)^(-1/3).
    /// Returns +/-infinity as the singular-derivative signal when the point
    /// sits on the singular locus (|1 - k t| <= singular_floor).
    double area_radius_rderiv(SpacetimePoint p) const;

    /// Energy density F' / (4 pi R^2 R').
    /// Throws ShellFocusingError at R = 0 and ShellCrossingError when
    /// |R'| < crossing_floor with R > 0.
    double energy_density(SpacetimePoint p) const;

    /// 1 - k(r) t, the pre-singularity margin.
    double one_minus_kt(double r, double t) const;

    /// 1 - k(r) = a r^n - gamma(r), evaluated in complement form. Unlike
    /// 1 - k(r)*1, this keeps full relative accuracy as r -> 0, which the
    /// transformed geodesic equation needs (1 - k t scales like r^n there).
    double one_minus_k(double r) const;

    /// Values of 1 - k t at or below this count as singular.
    static constexpr double singular_floor = 1e-14;
    /// |R'| below this counts as a shell crossing.
    static constexpr double crossing_floor = 1e-12;

  private:
    void check_radius(double r) const;

    ModelParams params_;
};

}  // namespace ltb
