#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace ltb {

/// Tolerances and guards for the adaptive integrators.
struct IntegrationSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double min_step = 1e-14;
    /// Steps are capped at step_fraction * r so the sampled path stays dense
    /// in log r near the singular start.
    double step_fraction = 0.5;
    std::size_t max_steps = 2'000'000;
};

namespace ode {

/// Outcome of one adaptive run.
enum class Status { ReachedEnd, EventHit, StepUnderflow, MaxSteps };

struct StepRecord {
    double x;
    double y;
    double dy;  // f(x, y) at the node
};

/// Result of integrate(): accepted nodes (including the initial one) and,
/// when an event fired, the refined event location.
struct Result {
    Status status = Status::ReachedEnd;
    std::vector<StepRecord> nodes;
    int event_index = -1;   // which event fired
    double event_x = 0.0;   // refined abscissa
    double event_y = 0.0;   // Hermite-interpolated state at event_x
};

/// Cubic Hermite interpolation of y on [x0, x1] given endpoint values and slopes.
inline double hermite(double x, double x0, double y0, double f0, double x1, double y1, double f1) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * f1;
}

/// Dormand-Prince 5(4) embedded pair for a scalar ODE y' = f(x, y), with
/// sign(x1 - x0) giving the direction. Events are scalar functions g(x, y);
/// a sign change of g across an accepted step stops the run and the crossing
/// is refined by bisection on the Hermite interpolant to |dx| <= x_refine.
///
/// f may throw; the step is then rejected and retried with a smaller h, so
/// mild domain excursions of trial stages do not abort the run.
class Rk45 {
  public:
    using Rhs = std::function<double(double, double)>;
    using Event = std::function<double(double, double)>;

    Rk45(Rhs f, IntegrationSettings settings) : f_(std::move(f)), s_(settings) {}

    void add_event(Event g) { events_.push_back(std::move(g)); }

    Result integrate(double x0, double y0, double x1, double x_refine = 1e-12) const {
        Result res;
        const double dir = x1 >= x0 ? 1.0 : -1.0;
        double x = x0;
        double y = y0;
        double fx = f_(x, y);
        res.nodes.push_back({x, y, fx});
        std::vector<double> gprev(events_.size());
        for (std::size_t i = 0; i < events_.size(); ++i) gprev[i] = events_[i](x, y);

        double h = dir * std::min(1e-2 * std::abs(x0) + 1e-12, std::abs(x1 - x0));
        const double end_snap =
            4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x0), std::abs(x1));
        for (std::size_t step = 0; step < s_.max_steps; ++step) {
            if (dir * (x - x1) >= 0.0 || std::abs(x1 - x) <= end_snap) {
                res.status = Status::ReachedEnd;
                return res;
            }
            h = cap_step(h, x, x1, dir);
            double y_new, err, f_new;
            bool ok;
            try {
                ok = attempt(x, y, fx, h, y_new, err, f_new);
            } catch (const std::exception&) {
                ok = false;
                err = 100.0;
            }
            if (!ok || err > 1.0) {
                const double shrink = ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
                h *= shrink;
                if (std::abs(h) < s_.min_step) {
                    res.status = Status::StepUnderflow;
                    return res;
                }
                continue;
            }
            const double x_new = x + h;
            // Event scan on the accepted step.
            for (std::size_t i = 0; i < events_.size(); ++i) {
                const double gnew = events_[i](x_new, y_new);
                if (gprev[i] < 0.0 && gnew >= 0.0) {
                    refine_event(res, static_cast<int>(i), x, y, fx, x_new, y_new, f_new,
                                 x_refine);
                    res.nodes.push_back({res.event_x, res.event_y, f_(res.event_x, res.event_y)});
                    res.status = Status::EventHit;
                    return res;
                }
                gprev[i] = gnew;
            }
            x = x_new;
            y = y_new;
            fx = f_new;
            res.nodes.push_back({x, y, fx});
            const double grow = std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
            h *= grow;
        }
        res.status = Status::MaxSteps;
        return res;
    }

  private:
    double cap_step(double h, double x, double x1, double dir) const {
        double mag = std::abs(h);
        mag = std::min(mag, s_.step_fraction * std::abs(x) + 1e-13);
        mag = std::min(mag, std::abs(x1 - x));
        return dir * mag;
    }

    bool attempt(double x, double y, double k1, double h, double& y_new, double& err_norm,
                 double& k7) const {
        const double k2 = f_(x + h * (1.0 / 5), y + h * (1.0 / 5) * k1);
        const double k3 = f_(x + h * (3.0 / 10), y + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2));
        const double k4 = f_(x + h * (4.0 / 5),
                             y + h * ((44.0 / 45) * k1 - (56.0 / 15) * k2 + (32.0 / 9) * k3));
        const double k5 =
            f_(x + h * (8.0 / 9), y + h * ((19372.0 / 6561) * k1 - (25360.0 / 2187) * k2 +
                                           (64448.0 / 6561) * k3 - (212.0 / 729) * k4));
        const double k6 = f_(x + h, y + h * ((9017.0 / 3168) * k1 - (355.0 / 33) * k2 +
                                             (46732.0 / 5247) * k3 + (49.0 / 176) * k4 -
                                             (5103.0 / 18656) * k5));
        y_new = y + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 + (125.0 / 192) * k4 -
                         (2187.0 / 6784) * k5 + (11.0 / 84) * k6);
        k7 = f_(x + h, y_new);
        const double err = h * ((71.0 / 57600) * k1 - (71.0 / 16695) * k3 + (71.0 / 1920) * k4 -
                                (17253.0 / 339200) * k5 + (22.0 / 525) * k6 - (1.0 / 40) * k7);
        const double scale = s_.abs_tol + s_.rel_tol * std::max(std::abs(y), std::abs(y_new));
        err_norm = std::abs(err) / scale;
        return std::isfinite(y_new) && std::isfinite(err_norm);
    }

    void refine_event(Result& res, int index, double x0, double y0, double f0, double x1,
                      double y1, double f1, double x_refine) const {
        const auto& g = events_[index];
        double lo = x0, hi = x1;
        auto eval = [&](double x) {
            const double y = hermite(x, x0, y0, f0, x1, y1, f1);
            return g(x, y);
        };
        for (int i = 0; i < 200 && std::abs(hi - lo) > x_refine; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        res.event_index = index;
        res.event_x = hi;
        res.event_y = hermite(hi, x0, y0, f0, x1, y1, f1);
    }

    Rhs f_;
    IntegrationSettings s_;
    std::vector<Event> events_;
};

}  // namespace ode
}  // namespace ltb
