#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gps/ldp.hpp"
#include "oracles.hpp"

using namespace gps;

namespace {
Kernel k1() { return Kernel::gamma_ratio(1.5); }
}  // namespace

TEST_CASE("gamma = 1: D = 0 and F = 2g") {
    auto k = k1();
    for (double h : {0.3, 1.0, 3.0}) {
        TiltState st = solve_tilt(k, h);
        RateResult r = rate_and_free_energy(k, st, 1.0);
        CHECK(r.D == 0.0);
        CHECK(r.free_energy == doctest::Approx(2.0 * st.g).epsilon(1e-14));
        CHECK(r.regime == Regime::Cramer);
    }
}

TEST_CASE("h <= 0: free energy vanishes") {
    auto k = k1();
    TiltState st = solve_tilt(k, -1.0);
    RateResult r = rate_and_free_energy(k, st, 1.5);
    CHECK(r.free_energy == 0.0);
}

TEST_CASE("Cramer rate equals the dense boundary-scan maximization to 1e-8") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    RateResult r = rate_and_free_energy(k, st, 1.5);
    CHECK(r.regime == Regime::Cramer);
    double best = -1e300;
    const int pts = 10000;
    for (int i = 1; i < pts; ++i) {
        const double l1 = *st.lambda1_bar * (1.0 - static_cast<double>(i) / pts);
        BoundaryPoint bp = boundary_curve(k, st, l1);
        best = std::max(best, bp.lambda1 + 1.5 * bp.lambda2);
    }
    CHECK(std::abs(best - r.D) < 1e-8);
}

TEST_CASE("outside the Cramer region the free energy is g - lambda1_bar, independent of gamma") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);  // gamma_c = 2
    RateResult r3 = rate_and_free_energy(k, st, 3.0);
    RateResult r5 = rate_and_free_energy(k, st, 5.0);
    CHECK(r3.regime == Regime::NonCramer);
    CHECK(r3.free_energy == doctest::Approx(st.g - *st.lambda1_bar).epsilon(1e-14));
    CHECK(r3.free_energy == r5.free_energy);
}

TEST_CASE("free-energy bounds 2g <= F <= (1+gamma) g") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    for (double gm : {1.0, 1.3, 1.9, 2.5, 4.0}) {
        RateResult r = rate_and_free_energy(k, st, gm);
        CHECK(r.free_energy >= 2.0 * st.g - 1e-12);
        CHECK(r.free_energy <= (1.0 + gm) * st.g + 1e-12);
        CHECK(r.D >= -1e-13);
    }
}

TEST_CASE("plateau identity: F(gamma >= gamma_c) = g + |lambda1_bar|") {
    auto k = k1();
    TiltState st = solve_tilt(k, 0.8);
    const double plateau = st.g + std::abs(*st.lambda1_bar);
    for (double gm : {2.0, 2.5, 3.0, 6.0}) {
        RateResult r = rate_and_free_energy(k, st, gm);
        CHECK(r.free_energy == doctest::Approx(plateau).epsilon(1e-12));
    }
}

TEST_CASE("derivatives: plateau in gamma, finite differences in h, and gamma") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    RateResult rn = rate_and_free_energy(k, st, 3.0);
    FreeEnergyDerivative dn = free_energy_derivative(k, st, rn);
    CHECK(dn.dF_dgamma == 0.0);

    RateResult rc = rate_and_free_energy(k, st, 1.5);
    FreeEnergyDerivative dc = free_energy_derivative(k, st, rc);
    const double dh = 1e-5;
    TiltState sp = solve_tilt(k, 1.0 + dh), sm = solve_tilt(k, 1.0 - dh);
    const double fd_h = (rate_and_free_energy(k, sp, 1.5).free_energy -
                         rate_and_free_energy(k, sm, 1.5).free_energy) /
                        (2.0 * dh);
    CHECK(std::abs(dc.dF_dh - fd_h) / std::abs(fd_h) < 1e-6);
    const double dg = 1e-5;
    const double fd_g = (rate_and_free_energy(k, st, 1.5 + dg).free_energy -
                         rate_and_free_energy(k, st, 1.5 - dg).free_energy) /
                        (2.0 * dg);
    CHECK(std::abs(dc.dF_dgamma - fd_g) / std::abs(fd_g) < 1e-6);
    // non-Cramer branch against finite differences as well
    const double fd_hn = (rate_and_free_energy(k, sp, 3.0).free_energy -
                          rate_and_free_energy(k, sm, 3.0).free_energy) /
                         (2.0 * dh);
    FreeEnergyDerivative dnn = free_energy_derivative(k, st, rn);
    CHECK(std::abs(dnn.dF_dh - fd_hn) / std::abs(fd_hn) < 1e-6);
}

TEST_CASE("both derivative formulas agree where gamma_c(h0) = gamma") {
    // K2 has gamma_c crossing 2.2; locate the upper crossing and compare the
    // Cramer and non-Cramer closed forms for dF/dh there
    auto k = make_k2(1.5, 0.01);
    const double gamma = 2.2;
    double lo = 2.0, hi = 4.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        TiltState st = solve_tilt(k, mid);
        ((*st.gamma_c - gamma) > 0.0 ? lo : hi) = mid;
    }
    const double h0 = 0.5 * (lo + hi);
    TiltState st = solve_tilt(k, h0);
    RateResult rn = rate_and_free_energy(k, st, gamma);
    rn.regime = Regime::NonCramer;  // evaluate the analytic-branch formula
    const double d_non = free_energy_derivative(k, st, rn).dF_dh;

    RateResult rc = rn;
    rc.regime = Regime::Cramer;
    rc.lambda1_hat = *st.lambda1_bar;  // Cramer formula at the corner optimizer
    rc.lambda2_hat = st.g;
    const double d_cram = free_energy_derivative(k, st, rc).dF_dh;
    CHECK(std::abs(d_non - d_cram) < 1e-8 * std::max(1.0, std::abs(d_non)));
}

TEST_CASE("D-properties report: symmetry, convexity, affinity, subadditivity") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    PropertyReport rep = d_properties_check(k, st, {1.2, 1.5, 1.8, 2.5, 3.0});
    for (const auto& row : rep.rows) {
        INFO(row.name, ": ", row.lhs, " vs ", row.rhs);
        CHECK(row.pass);
    }
    CHECK(rep.pass);
}

TEST_CASE("free energy is strictly concave inside the Cramer interval") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);  // Cramer interval (0.5, 2)
    std::vector<double> gs, Fs;
    for (int i = 0; i <= 24; ++i) {
        const double gm = 0.7 + (1.9 - 0.7) * i / 24.0;
        gs.push_back(gm);
        Fs.push_back(rate_and_free_energy(k, st, gm).free_energy);
    }
    for (std::size_t i = 1; i + 1 < Fs.size(); ++i) {
        const double dd = Fs[i + 1] - 2.0 * Fs[i] + Fs[i - 1];
        CHECK(dd < 0.0);  // strictly negative curvature at interior midpoints
    }
}

TEST_CASE("gamma <-> 1/gamma reduction is consistent with the direct solve") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    for (double gm : {1.3, 1.7, 2.5}) {
        RateResult direct = rate_direct(k, st, 1.0 / gm);
        RateResult reduced = rate_and_free_energy(k, st, 1.0 / gm);
        CHECK(std::abs(direct.D - reduced.D) < 1e-9 * std::max(1.0, direct.D));
        CHECK(std::abs(direct.free_energy - reduced.free_energy) < 1e-9);
    }
}

TEST_CASE("Lagrange condition holds at the solved optimizer") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    RateResult r = rate_and_free_energy(k, st, 1.5);
    BoundaryPoint bp = boundary_curve(k, st, r.lambda1_hat);
    CHECK(std::abs(bp.dlambda2 + 1.0 / 1.5) < 1e-9);
}

TEST_CASE("limit inter-arrival law is a probability distribution") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    RateResult r = rate_and_free_energy(k, st, 1.5);
    FreeEnergyDerivative d = free_energy_derivative(k, st, r);
    CHECK(std::abs(limit_interarrival_total(k, st, r, d) - 1.0) <= 1e-10);
    // both exponents positive in the Cramer regime
    CHECK(r.free_energy - r.gamma * d.dF_dgamma > 0.0);
    CHECK(d.dF_dgamma > 0.0);
}

TEST_CASE("boundary regime at gamma = gamma_c is flagged and consistent") {
    auto k = k1();
    TiltState st = solve_tilt(k, 1.0);
    RateResult r = rate_and_free_energy(k, st, *st.gamma_c);
    CHECK(r.regime == Regime::Boundary);
    CHECK(r.c_hat.has_value());
    CHECK(*r.c_hat == doctest::Approx(r.c_of_h).epsilon(1e-12));
}
