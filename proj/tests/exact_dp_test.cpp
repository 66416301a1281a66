#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gps/exact_dp.hpp"
#include "gps/ldp.hpp"
#include "gps/tilt.hpp"
#include "oracles.hpp"

using namespace gps;

TEST_CASE("single-step cells") {
    auto k = Kernel::gamma_ratio(1.5);
    const double h = 0.7;
    CHECK(build_constrained(k, 1, 1, h).corner() == doctest::Approx(h + k.log_value(2)).epsilon(1e-15));
    CHECK(build_constrained(k, 2, 1, h).corner() == doctest::Approx(h + k.log_value(3)).epsilon(1e-15));
}

TEST_CASE("composition-enumeration oracle at (8,8): three kernels, three h values") {
    std::vector<Kernel> kernels = {Kernel::gamma_ratio(1.5), make_k2(1.5, 0.01),
                                   make_k3(2.5, 0.02)};
    for (const auto& k : kernels)
        for (double h : {-0.5, 0.0, 0.7}) {
            PartitionTable tab = build_constrained(k, 8, 8, h);
            for (long long n = 1; n <= 8; ++n)
                for (long long m = 1; m <= 8; ++m) {
                    const double oracle =
                        static_cast<double>(logl(oracles::enumerate_zc(k, n, m, h)));
                    const double rel =
                        std::abs(tab.at(n, m) - oracle) / std::max(1.0, std::abs(oracle));
                    CHECK(rel <= 1e-12);
                }
        }
}

TEST_CASE("unreachable cells and the base cell") {
    auto k = Kernel::gamma_ratio(1.5);
    PartitionTable tab = build_constrained(k, 5, 5, 0.3);
    CHECK(tab.at(0, 0) == 0.0);
    for (long long i = 1; i <= 5; ++i) {
        CHECK(tab.at(0, i) == kNegInf);
        CHECK(tab.at(i, 0) == kNegInf);
    }
}

TEST_CASE("square-grid symmetry is bit-exact") {
    auto k = make_k2(1.5, 0.01);
    PartitionTable tab = build_constrained(k, 60, 60, 0.9);
    for (long long n = 0; n <= 60; ++n)
        for (long long m = 0; m <= 60; ++m) CHECK(tab.at(n, m) == tab.at(m, n));
}

TEST_CASE("h <= 0 keeps every cell at Z <= 1") {
    auto k = Kernel::gamma_ratio(1.5);
    for (double h : {-0.5, 0.0}) {
        PartitionTable tab = build_constrained(k, 40, 60, h);
        for (long long n = 0; n <= 40; ++n)
            for (long long m = 0; m <= 60; ++m) CHECK(tab.at(n, m) <= 1e-12);
    }
}

TEST_CASE("tilt identity: Z^c = e^{(N+M)g} P((N,M) in tilted renewal)") {
    auto k = Kernel::gamma_ratio(1.5);
    TiltState st = solve_tilt(k, 1.0);
    PartitionTable plain = build_constrained(k, 64, 64, 1.0);
    PartitionTable tilted = build_constrained_weights(
        [&](long long t) { return 1.0 + k.log_value(t) - static_cast<double>(t) * st.g; }, 64, 64);
    CHECK(std::abs(plain.corner() - (128.0 * st.g + tilted.corner())) < 1e-10);
}

TEST_CASE("free model: lower bound, degenerate free end, convolution oracle") {
    auto k = Kernel::gamma_ratio(1.5);
    PartitionTable tab = build_constrained(k, 8, 8, 0.4);
    auto kf = FreeEndKernel::power_law(2.0);
    FreeResult fr = build_free(kf, tab);
    CHECK(fr.log_zf >= tab.corner());  // K_f(0) = 1 makes Z^f >= Z^c
    // a free-end weight that suppresses every positive length reduces to Z^c
    auto kf_delta = FreeEndKernel::shifted_power_law(5000.0);
    CHECK(build_free(kf_delta, tab).log_zf == doctest::Approx(tab.corner()).epsilon(1e-15));
    // direct convolution from independently built smaller tables
    long double direct = 0.0L;
    for (long long i = 0; i <= 8; ++i)
        for (long long j = 0; j <= 8; ++j) {
            long double zc = (i == 0 && j == 0) ? 1.0L
                             : (i == 0 || j == 0)
                                 ? 0.0L
                                 : expl(static_cast<long double>(
                                       build_constrained(k, i, j, 0.4).corner()));
            direct += expl(static_cast<long double>(kf.log_value(8 - i) + kf.log_value(8 - j))) * zc;
        }
    CHECK(std::abs(fr.log_zf - static_cast<double>(logl(direct))) < 1e-12);
}

TEST_CASE("two-strand recursion: base value and monotonicity in the binding weight") {
    const double c = 2.15, Eb = 6.0, El = 3.0, cbar = 0.1;
    CHECK(biophysics_partition(c, Eb, El, 0.3, 1, 1, cbar) == 0.0);
    const double z1 = biophysics_partition(c, Eb, El, 0.2, 6, 7, cbar);
    const double z2 = biophysics_partition(c, Eb, El, 0.3, 6, 7, cbar);
    CHECK(z2 > z1);
}

TEST_CASE("two-strand recursion matches the renewal model under the step matching") {
    const double c = 2.15, Eb = 6.0, El = 3.0, cbar = 0.1, beta = 0.25;
    auto [k, h_offset] = Kernel::biophysics_matching(c, Eb, El, beta);
    auto kf = FreeEndKernel::shifted_power_law(cbar);
    for (long long N = 1; N <= 8; ++N)
        for (long long M = 1; M <= 8; ++M) {
            PartitionTable tab = build_constrained(k, N, M, h_offset);
            FreeResult fr = build_free(kf, tab);
            const double strand = biophysics_partition(c, Eb, El, beta, N + 1, M + 1, cbar);
            CHECK(std::abs(fr.log_zf - strand) / std::max(1.0, std::abs(strand)) <= 1e-10);
        }
}

TEST_CASE("finite-size estimates approach the analytic free energy") {
    auto k = Kernel::gamma_ratio(1.5);
    auto kf = FreeEndKernel::power_law(2.0);
    TiltState st = solve_tilt(k, 1.0);
    // gamma = 1: extrapolated estimate within 1e-3 of 2g at N = 400
    FiniteSizeReport r1 = finite_size_free_energy(k, kf, 1.0, 1.0, {100, 200, 400});
    CHECK(std::abs(r1.extrapolated_fc - 2.0 * st.g) <= 1e-3);
    CHECK(std::abs(r1.extrapolated_ff - 2.0 * st.g) <= 1e-3);
    // gamma = 1.5: within 2e-3 of the rate-function value
    RateResult res = rate_and_free_energy(k, st, 1.5);
    FiniteSizeReport r2 = finite_size_free_energy(k, kf, 1.0, 1.5, {100, 200, 400});
    CHECK(std::abs(r2.extrapolated_fc - res.free_energy) <= 2e-3);
    // constrained and free growth rates agree in the limit
    CHECK(r2.gap_largest < 0.05);
    CHECK(std::abs(r2.extrapolated_ff - res.free_energy) <= 2e-3);
}

TEST_CASE("delocalized side: finite-size estimates decrease toward zero") {
    auto k = Kernel::gamma_ratio(1.5);
    auto kf = FreeEndKernel::power_law(2.0);
    FiniteSizeReport r = finite_size_free_energy(k, kf, -0.5, 1.0, {50, 100, 200});
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        CHECK(std::abs(r.rows[i].fc_raw) < std::abs(r.rows[i - 1].fc_raw));
}

TEST_CASE("memory guard reports the required bytes") {
    auto k = Kernel::gamma_ratio(1.5);
    CHECK_THROWS_AS(build_constrained(k, 40000, 40000, 0.5), std::length_error);
    CHECK_THROWS_AS(biophysics_partition(2.15, 6.0, 3.0, 0.2, 500, 500, 0.1), std::length_error);
}

TEST_CASE("table dump round-trips bit-exactly through the binary format") {
    auto k = make_k2(1.5, 0.01);
    PartitionTable tab = build_constrained(k, 17, 23, 0.6);
    const std::string path = "/tmp/gpsm_table_test.bin";
    save_table(tab, path);
    PartitionTable back = load_table(path);
    CHECK(back.N == tab.N);
    CHECK(back.M == tab.M);
    CHECK(back.h == tab.h);
    CHECK(back.kernel_hash == tab.kernel_hash);
    REQUIRE(back.log_z.size() == tab.log_z.size());
    for (std::size_t i = 0; i < tab.log_z.size(); ++i) {
        const bool same = back.log_z[i] == tab.log_z[i] ||
                          (std::isinf(back.log_z[i]) && std::isinf(tab.log_z[i]));
        CHECK(same);
    }
    CHECK_THROWS(load_table("/tmp/gpsm_no_such_table.bin"));
}

TEST_CASE("asymmetric tables: off-ray cells agree with the enumeration oracle") {
    auto k = Kernel::gamma_ratio(1.5);
    PartitionTable tab = build_constrained(k, 6, 12, 0.5);
    for (long long n : {1LL, 3LL, 6LL})
        for (long long m : {2LL, 7LL, 12LL}) {
            const double oracle = static_cast<double>(logl(oracles::enumerate_zc(k, n, m, 0.5)));
            CHECK(std::abs(tab.at(n, m) - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
        }
}
