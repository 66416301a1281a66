#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gps/phase.hpp"
#include "gps/special.hpp"

using namespace gps;

TEST_CASE("flat boundary: no transition for the gamma-ratio family") {
    ScanParams sp;
    sp.h_lo = 0.05;
    sp.h_hi = 6.0;
    sp.grid = 128;
    auto recs = scan_transitions(fixed_family(Kernel::gamma_ratio(1.5)), 2.2, sp);
    CHECK(recs.empty());
}

TEST_CASE("site-3 override: exactly two transitions at gamma = 2.2") {
    ScanParams sp;
    sp.h_lo = 0.02;
    sp.h_hi = 6.0;
    sp.grid = 256;
    auto fam = fixed_family(make_k2(1.5, 0.01));
    auto recs = scan_transitions(fam, 2.2, sp);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].kind == TransitionKind::CramerEntry);
    CHECK(recs[1].kind == TransitionKind::CramerExit);
    CHECK(recs[0].bracket_hi - recs[0].bracket_lo <= sp.tol_h);
    // located points satisfy |gamma_c(h*) - gamma| within the slope-scaled tol
    for (const auto& r : recs) {
        TiltState st = family_tilt(fam, r.h_star);
        CHECK(std::abs(*st.gamma_c - 2.2) <=
              10.0 * sp.tol_h * std::max(1.0, std::abs(r.gamma_c_slope)));
        // slope sign matches a finite difference of gamma_c
        TiltState sp1 = family_tilt(fam, r.h_star + 1e-4);
        TiltState sm1 = family_tilt(fam, r.h_star - 1e-4);
        const double fd = (*sp1.gamma_c - *sm1.gamma_c) / 2e-4;
        CHECK(fd * r.gamma_c_slope > 0.0);
        CHECK(std::abs(fd - r.gamma_c_slope) < 5e-3 * std::max(1.0, std::abs(fd)));
        // third order or more: the second moment diverges at alpha = 1.5
        auto rc = classify_order(fam, r);
        CHECK(rc.order == TransitionOrder::ThirdOrMore);
    }
}

TEST_CASE("site-2 override at alpha = 2.5: one second-order transition at gamma = 1.5") {
    ScanParams sp;
    sp.h_lo = 0.05;
    sp.h_hi = 6.0;
    sp.grid = 256;
    auto fam = fixed_family(make_k3(2.5, 0.02));
    auto recs = scan_transitions(fam, 1.5, sp);
    REQUIRE(recs.size() == 1);
    auto rc = classify_order(fam, recs[0]);
    CHECK(rc.order == TransitionOrder::Second);
    CHECK(rc.jump < 0.0);  // the Cramer branch has the smaller curvature
    CHECK(rc.gamma_c_slope > 0.0);

    // jump vs one-sided finite differences of dF/dh across h*
    auto k = *fam.fixed;
    auto df = [&](double h, double gamma) {
        TiltState st = solve_tilt(k, h);
        RateResult r = rate_and_free_energy(k, st, gamma);
        return free_energy_derivative(k, st, r).dF_dh;
    };
    const double h0 = rc.h_star, d = 2e-4;
    // Cramer side is h > h0 here (gamma_c increasing through gamma)
    const double above = (-3.0 * df(h0 + 1e-9, 1.5) + 4.0 * df(h0 + d, 1.5) -
                          df(h0 + 2.0 * d, 1.5)) /
                         (2.0 * d);
    const double below = (3.0 * df(h0 - 1e-9, 1.5) - 4.0 * df(h0 - d, 1.5) +
                          df(h0 - 2.0 * d, 1.5)) /
                         (2.0 * d);
    const double fd_jump = above - below;
    CHECK(std::abs(fd_jump - rc.jump) / std::abs(rc.jump) < 0.05);
}

TEST_CASE("site-2 override: no transition once gamma exceeds gamma_c(infinity)") {
    auto k = make_k3(2.5, 0.02);
    const double gamma0 = 1.0 / k.tail_moment(0, 2);  // = 2.2727...
    CHECK(gamma0 == doctest::Approx(1.0 / 0.44).epsilon(1e-10));
    ScanParams sp;
    sp.h_lo = 0.05;
    sp.h_hi = 8.0;
    sp.grid = 128;
    auto recs = scan_transitions(fixed_family(k), gamma0 + 0.05, sp);
    CHECK(recs.empty());
}

TEST_CASE("biophysics family: unique transition at 1.676") {
    ScanParams sp;
    sp.h_lo = 0.05;
    sp.h_hi = 6.0;
    sp.grid = 128;
    sp.tol_h = 1e-6;
    auto fam = biophysics_family(2.15, 6.0, 3.0);
    auto recs = scan_transitions(fam, 1.15, sp);
    REQUIRE(recs.size() == 1);
    CHECK(std::abs(recs[0].h_star - 1.676) <= 0.01);
    CHECK(recs[0].kind == TransitionKind::CramerExit);
    auto rc = classify_order(fam, recs[0]);
    CHECK(rc.order == TransitionOrder::ThirdOrMore);  // alpha = 1.15 < 2
}

TEST_CASE("small-h exponents: finite-variance kernel has slope 1 and the moment constant") {
    auto k = make_k3(2.5, 0.02);
    auto rep = small_h_exponent(k, 1.5, {1e-2, 3e-3, 1e-3, 3e-4, 1e-4});
    CHECK(rep.second_moment_finite);
    CHECK(std::abs(rep.fitted_exponent - 1.0) < 0.02);
    CHECK(std::abs(rep.linear_ratio - rep.moment_constant) / rep.moment_constant < 0.02);
}

TEST_CASE("small-h exponents: gamma-ratio slope 2 and the non-Cramer ratio 1.125") {
    auto k = Kernel::gamma_ratio(1.5);
    auto rep1 = small_h_exponent(k, 1.0, {1e-2, 1e-3, 1e-4, 1e-5});
    CHECK(std::abs(rep1.fitted_exponent - 2.0) < 0.1);
    auto rep3 = small_h_exponent(k, 3.0, {1e-2, 1e-3, 1e-4});
    CHECK(std::abs(rep3.fitted_c_alpha_gamma - std::pow(1.5, 2.0) / 2.0) < 0.02);
    CHECK(!rep3.second_moment_finite);
    // short grid flag
    CHECK(small_h_exponent(k, 1.0, {1e-2, 1e-3}).ill_conditioned);
}

TEST_CASE("limit Lagrange system: corner cases, bounds, and the stationarity identity") {
    CHECK(limit_c_alpha_gamma(1.5, 1.0) == 1.0);
    CHECK(limit_c_alpha_gamma(1.5, 1.0 + 1e-4) == doctest::Approx(1.0).epsilon(1e-3));
    for (double gm : {1.2, 1.5, 1.9}) {
        const double c = limit_c_alpha_gamma(1.5, gm);
        CHECK(c > 1.0);
        CHECK(c < 0.5 * std::min(std::pow(1.5, 2.0), 1.0 + gm));
    }
    CHECK_THROWS_AS(limit_c_alpha_gamma(1.5, 2.5), std::domain_error);
    CHECK_THROWS_AS(limit_c_alpha_gamma(2.5, 1.2), std::domain_error);
    // independent grid minimization over the constraint curve recovers the
    // value, and the eliminated multiplier equation
    // a2^{a-1} = 1 - gamma (a1^{a-1} - 1) holds at the grid argmin
    const double alpha = 1.5, gm = 1.5;
    const double c = limit_c_alpha_gamma(alpha, gm);
    const double a1max = std::pow(alpha, 1.0 / (alpha - 1.0));
    auto a2_of = [&](double a1) {
        double l2 = 0.0, h2 = 1.0;
        for (int j = 0; j < 90; ++j) {
            const double a2 = 0.5 * (l2 + h2);
            (b_alpha(alpha, a1, a2) < alpha ? l2 : h2) = a2;
        }
        return 0.5 * (l2 + h2);
    };
    double best = kInf, best_a1 = 1.0, best_a2 = 1.0;
    const int grid = 20000;
    for (int i = 0; i <= grid; ++i) {
        const double a1 = 1.0 + (a1max - 1.0) * i / grid;
        const double a2 = a2_of(a1);
        const double val = 0.5 * (a1 + gm * a2);
        if (val < best) {
            best = val;
            best_a1 = a1;
            best_a2 = a2;
        }
    }
    CHECK(std::abs(best - c) < 1e-7);
    CHECK(std::abs(std::pow(best_a2, alpha - 1.0) -
                   (1.0 - gm * (std::pow(best_a1, alpha - 1.0) - 1.0))) < 1e-3);
}

TEST_CASE("fitted small-h ratio matches the Lagrange limit within 3%") {
    auto k = Kernel::gamma_ratio(1.5);
    auto rep = small_h_exponent(k, 1.5, {1e-3, 3e-4, 1e-4});
    const double lagrange = limit_c_alpha_gamma(1.5, 1.5);
    CHECK(std::abs(rep.fitted_c_alpha_gamma - lagrange) / lagrange < 0.03);
}

TEST_CASE("scan parameter validation") {
    ScanParams sp;
    sp.h_lo = -1.0;
    CHECK_THROWS_AS(scan_transitions(fixed_family(Kernel::gamma_ratio(1.5)), 2.0, sp),
                    std::domain_error);
}
