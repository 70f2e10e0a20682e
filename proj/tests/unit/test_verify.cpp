#include <cmath>
#include <vector>

#include <doctest.h>

#include "ltb/geodesics.hpp"
#include "ltb/verify.hpp"

using namespace ltb;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return grid;
}

}  // namespace

TEST_CASE("subsolution margin of the apparent horizon") {
    const auto grid = log_grid(1e-4, 0.1, 40);
    for (auto [n, a] : {std::pair{1, 1.0}, {2, 0.5}, {3, 4.0}, {4, 1.0}}) {
        const Model m({n, a, {}, 0.1});
        const auto result = check_subsolution_margin(m, grid);
        CAPTURE(n);
        CAPTURE(a);
        CHECK(result.pass);
        CHECK(result.max_rel_err < 1e-10);
    }

    // Leading behaviour near the centre: margin ~ -(4/3) r^2.
    const Model m({1, 1.0, {}, 0.1});
    const double r = 1e-4;
    const double margin = -(4.0 / 3.0) * m.k(r) * r * r * ((2.0 / 3.0) * m.k_prime(r) * r + m.k(r));
    CHECK(margin == doctest::Approx(-(4.0 / 3.0) * r * r).epsilon(5e-4));
}

TEST_CASE("phi on the horizon matches the expanded closed form") {
    const auto grid = log_grid(1e-4, 0.05, 30);
    for (auto [n, a] : {std::pair{1, 1.0}, {2, 0.5}, {3, 4.0}, {4, 1.0}}) {
        const Model m({n, a, {}, 0.1});
        const auto result = check_phi_on_horizon(m, grid);
        CAPTURE(n);
        CHECK(result.pass);
        CHECK(result.max_rel_err < 1e-10);
    }

    // Single-point example at machine accuracy.
    const Model m2({2, 0.5, {}, 0.1});
    const std::vector<double> single{0.01};
    CHECK(check_phi_on_horizon(m2, single).max_rel_err < 1e-12);

    // The a -> 0 limit collapses both sides to (4/9) r^2.
    const Model tiny({1, 1e-12, {}, 0.1});
    const double r = 0.01;
    CHECK(phi_on_horizon(tiny, r) == doctest::Approx((4.0 / 9.0) * r * r).epsilon(1e-6));
}

TEST_CASE("dphi/dt on the horizon: sign structure and leading order") {
    const auto grid = log_grid(1e-4, 0.05, 25);

    SUBCASE("n = 4: strictly negative, leading order converges") {
        const Model m({4, 1.0, {}, 0.1});
        const auto result = check_dphidt_on_horizon(m, grid);
        CHECK(result.convergence.pass);
        for (const double v : result.exact_values) CHECK(v < 0.0);
    }
    SUBCASE("n = 3 below 8/27: negative, leading order converges") {
        const Model m({3, 0.2, {}, 0.1});
        const auto result = check_dphidt_on_horizon(m, grid);
        CHECK(result.convergence.pass);
        for (const double v : result.exact_values) CHECK(v < 0.0);
    }
    SUBCASE("n = 1, 2: leading order converges") {
        CHECK(check_dphidt_on_horizon(Model({1, 1.0, {}, 0.1}), grid).convergence.pass);
        CHECK(check_dphidt_on_horizon(Model({2, 0.5, {}, 0.1}), grid).convergence.pass);
    }
    SUBCASE("n = 3 above 8/27: positive at small r") {
        const Model m({3, 0.4, {}, 0.1});
        CHECK(dphi_dt_on_horizon(m, 1e-5) > 0.0);
    }
    SUBCASE("deviation shrinks under refinement") {
        const Model m({4, 1.0, {}, 0.1});
        const std::vector<double> coarse{1e-3};
        const std::vector<double> fine{1e-4};
        const auto dev = [&](const std::vector<double>& g) {
            const auto res = check_dphidt_on_horizon(m, g);
            const double exact = res.exact_values[0];
            const double leading = -std::pow(2.0 / 3.0, -3.0) *
                                   ((8.0 / 27.0) / g[0] - (4.0 / 3.0) * 1.0);
            return std::abs(exact - leading) / std::abs(leading);
        };
        CHECK(dev(coarse) < 0.05);
        CHECK(dev(fine) < 0.005);
        CHECK(dev(fine) < dev(coarse));
    }
}

TEST_CASE("envelope reconstruction for the reduced equation") {
    SUBCASE("n = 1: A(0,0) = -5/3 within 1%, beta = 2/3") {
        const Model m({1, 1.0, {}, 0.1});
        const auto bounds = estimate_envelope(m, 1e-2, 0.02);
        CHECK(bounds.beta == doctest::Approx(2.0 / 3.0));
        CHECK(bounds.A_center == doctest::Approx(-(5.0 / 3.0)).epsilon(0.01));
        CHECK(bounds.A1 < 0.0);
        CHECK(bounds.A0 <= bounds.A1);
        CHECK(bounds.B0 <= bounds.B1);
        CHECK(bounds.B0 * bounds.B1 > 0.0);
        // The sampled B is negative: the transformed solution approaches
        // a^(2/3) from below, so the envelopes sit below zero.
        CHECK(bounds.B1 < 0.0);
        CHECK(bounds.B_center == doctest::Approx(-4.0 / 9.0).epsilon(0.01));
        for (const double r : {1e-5, 1e-3, 1e-2}) CHECK(bounds.z_lo(r) < bounds.z_hi(r));
    }
    SUBCASE("n = 2: A(0,0) = -7/3, beta = 1/3") {
        const Model m({2, 8.0, {}, 0.1});
        const auto bounds = estimate_envelope(m, 1e-2, 0.08);
        CHECK(bounds.beta == doctest::Approx(1.0 / 3.0));
        CHECK(bounds.A_center == doctest::Approx(-(7.0 / 3.0)).epsilon(0.01));
    }
    SUBCASE("bounds are stable under halving the band") {
        const Model m({1, 1.0, {}, 0.1});
        const auto wide = estimate_envelope(m, 1e-2, 0.02);
        const auto narrow = estimate_envelope(m, 1e-2, 0.01);
        CHECK(std::abs(narrow.A0 - wide.A0) / std::abs(wide.A0) < 0.1);
        CHECK(std::abs(narrow.A1 - wide.A1) / std::abs(wide.A1) < 0.1);
        CHECK(std::abs(narrow.B0 - wide.B0) / std::abs(wide.B0) < 0.1);
        CHECK(std::abs(narrow.B1 - wide.B1) / std::abs(wide.B1) < 0.1);
    }
    SUBCASE("rejected outside n = 1, 2") {
        CHECK_THROWS_AS(estimate_envelope(Model({3, 4.0, {}, 0.1}), 1e-2, 0.02),
                        std::runtime_error);
    }
}

TEST_CASE("envelope containment of in-band shots") {
    for (auto [n, a, band] : {std::tuple{1, 1.0, 0.02}, {2, 8.0, 0.08}}) {
        const Model m({n, a, {}, 0.1});
        const auto bounds = estimate_envelope(m, 1e-2, band);
        const double alpha = 1.0 + 2.0 * n / 3.0;
        const double eps = 1e-6;
        const double mid = 0.5 * (bounds.c_lo + bounds.c_hi);
        const double x0 = std::cbrt(a * a) + mid * std::pow(eps, bounds.beta);
        const auto path = integrate_x_from(m, alpha, eps, x0, 1e-2);
        const auto result = check_envelope_containment(m, path, bounds);
        CAPTURE(n);
        CHECK(result.pass);
        CHECK(result.max_rel_err <= 1e-12);

        // Widening the bounds keeps containment (monotone in the bounds).
        EnvelopeBounds widened = bounds;
        widened.c_lo = 2.0 * bounds.c_lo - bounds.c_hi;
        widened.c_hi = 2.0 * bounds.c_hi - bounds.c_lo;
        CHECK(check_envelope_containment(m, path, widened).pass);
    }
}

TEST_CASE("exact-start shots contract into the envelope band") {
    // Starting exactly on x = a^(2/3) puts y(eps) = 0 outside the one-signed
    // band; the contraction pulls the path inside within a couple of decades.
    const Model m({1, 1.0, {}, 0.1});
    const auto bounds = estimate_envelope(m, 1e-2, 0.02);
    const auto path = integrate_from_singularity(m, *singular_start(m), 0.1);
    const double x_eq = std::cbrt(1.0);
    bool checked = false;
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        const double r = path.samples[i].r;
        if (r < 1e-4 || r > 1e-2) continue;
        const double y = path.x[i] - x_eq;
        CHECK(y >= bounds.z_lo(r));
        CHECK(y <= bounds.z_hi(r));
        checked = true;
    }
    CHECK(checked);
}

TEST_CASE("fitted exponents recover alpha") {
    for (auto [n, a, alpha] :
         {std::tuple{1, 1.0, 5.0 / 3.0}, {2, 1.0, 7.0 / 3.0}, {3, 4.0, 3.0}}) {
        const Model m({n, a, {}, 0.1});
        const auto path = integrate_from_singularity(m, *singular_start(m), 0.1);
        const double slope = fit_exponent(path, 1e-6, 1e-4);
        CAPTURE(n);
        CHECK(slope == doctest::Approx(alpha).epsilon(0.02));

        // Subsampling by 2 moves the fit by less than 0.5%.
        GeodesicPath half = path;
        half.samples.clear();
        half.x.clear();
        for (std::size_t i = 0; i < path.samples.size(); i += 2) {
            half.samples.push_back(path.samples[i]);
            half.x.push_back(path.x[i]);
        }
        std::size_t in_window = 0;
        for (const auto& s : half.samples)
            if (s.r >= 1e-6 && s.r <= 1e-4) ++in_window;
        if (in_window >= 10) {
            const double slope_half = fit_exponent(half, 1e-6, 1e-4);
            CHECK(std::abs(slope_half - slope) / slope < 0.005);
        }
    }

    // Degenerate window.
    const Model m({1, 1.0, {}, 0.1});
    const auto path = integrate_from_singularity(m, *singular_start(m), 0.1);
    CHECK_THROWS_AS(fit_exponent(path, 0.099, 0.1), std::runtime_error);
}
