#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "gps/kernel.hpp"
#include "gps/series.hpp"
#include "gps/special.hpp"
#include "oracles.hpp"

using namespace gps;

TEST_CASE("gamma-ratio kernel: normalization identity at horizon 1e6 plus tail bound") {
    auto k = Kernel::gamma_ratio(1.5);
    // independent numerical summation; the remainder past 1e6 comes from the
    // second-order asymptotic tail, so the identity closes to 1e-12
    long double s = 0.0L;
    for (long long t = 2; t <= 1000000; ++t)
        s += (static_cast<long double>(t) - 1.0L) * static_cast<long double>(k.value(t));
    const double rem = k.tail_moment(1, 1000001) - k.tail_moment(0, 1000001);
    CHECK(std::abs(static_cast<double>(s) + rem - 1.0) <= 1e-12);
    CHECK(k.total_moment(1) - k.total_moment(0) == doctest::Approx(1.0).epsilon(1e-14));
    // power-law family obeys the same constraint via the zeta identities
    auto kp = Kernel::power_law(1.3);
    CHECK(kp.total_moment(1) - kp.total_moment(0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("gamma-ratio kernel: K(2) from the recurrence equals direct Gamma evaluation") {
    for (double alpha : {1.2, 1.5, 1.8}) {
        auto k = Kernel::gamma_ratio(alpha);
        CHECK(std::abs(k.value(2) - oracles::k1_direct(alpha, 2)) < 1e-14);
        CHECK(std::abs(k.value(5) - oracles::k1_direct(alpha, 5)) < 1e-14);
    }
}

TEST_CASE("gamma-ratio kernel: Stirling limit K(n) n^{1+alpha} -> 1/|Gamma(-alpha)|") {
    auto k = Kernel::gamma_ratio(1.5);
    const double lim = 1.0 / std::abs(gamma_negative(1.5));
    double prev_gap = kInf;
    for (long long n : {1000, 10000, 100000}) {
        const double ratio = k.value(n) * std::pow(static_cast<double>(n), 2.5);
        const double gap = std::abs(ratio - lim);
        CHECK(gap < prev_gap);  // monotone approach
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-4);
}

TEST_CASE("gamma-ratio kernel: log recurrence matches log-Gamma to 1e-10 for n <= 1e4") {
    auto k = Kernel::gamma_ratio(1.5);
    for (long long n = 2; n <= 10000; n = n < 10 ? n + 1 : n * 3 / 2) {
        const double direct = std::lgamma(static_cast<double>(n) - 1.5) -
                              std::lgamma(static_cast<double>(n) + 1.0) -
                              std::log(gamma_negative(1.5));
        CHECK(std::abs(k.log_value(n) - direct) < 1e-10);
    }
}

TEST_CASE("gamma-ratio kernel: domain errors") {
    CHECK_THROWS_AS(Kernel::gamma_ratio(1.0), std::domain_error);
    CHECK_THROWS_AS(Kernel::gamma_ratio(2.0), std::domain_error);
    CHECK_THROWS_AS(Kernel::gamma_ratio(2.5), std::domain_error);
}

TEST_CASE("modified kernel: the printed renormalization constant") {
    const double alpha = 1.5, kappa = 0.01;
    auto k1 = Kernel::gamma_ratio(alpha);
    auto k2 = make_k2(alpha, kappa);
    const double c_kappa = (1.0 - k1.value(2) - 2.0 * kappa) /
                           (1.0 - k1.value(2) - 2.0 * k1.value(3));
    CHECK(k2.value(2) == doctest::Approx(k1.value(2)).epsilon(1e-15));
    CHECK(k2.value(3) == doctest::Approx(kappa).epsilon(1e-15));
    for (long long n : {4, 7, 100})
        CHECK(k2.value(n) == doctest::Approx(c_kappa * k1.value(n)).epsilon(1e-13));
}

TEST_CASE("modified kernel: kappa = K1(3) is the identity") {
    auto k1 = Kernel::gamma_ratio(1.5);
    auto k2 = make_k2(1.5, k1.value(3));
    for (long long n = 2; n <= 50; ++n)
        CHECK(k2.value(n) == doctest::Approx(k1.value(n)).epsilon(1e-13));
}

TEST_CASE("modified kernel: K3 normalization to 1e-12 by independent summation") {
    auto k3 = make_k3(2.5, 0.02);
    long double s = 0.0L;
    for (long long t = 2; t <= 4000000; ++t)
        s += (static_cast<long double>(t) - 1.0L) * static_cast<long double>(k3.value(t));
    const long double rem = static_cast<long double>(k3.tail().constant) *
                            powl(4.0e6L, -1.5L) / 1.5L;
    CHECK(std::abs(static_cast<double>(s + rem) - 1.0) <= 1e-12);
    CHECK(k3.second_moment_finite());
    // gamma_c(inf) = 1/sum K: the worked example's 2.2727...
    CHECK(1.0 / k3.total_moment(0) == doctest::Approx(1.0 / 0.44).epsilon(1e-12));
}

TEST_CASE("modified kernel: nonpositive renormalization rejected") {
    // a huge override leaves negative mass for the remaining sites
    CHECK_THROWS_AS(Kernel::gamma_ratio_modified(1.5, {{3, 0.6}}), std::domain_error);
    // alpha in (2,3) without overriding site 2 cannot be positive
    CHECK_THROWS_AS(Kernel::gamma_ratio_modified(2.5, {{4, 0.001}}), std::domain_error);
}

TEST_CASE("biophysics scan kernel: E_l = 0 reduces to the pure power law") {
    auto kb = Kernel::biophysics_scan(2.15, 0.0, 0.7);
    auto kp = Kernel::power_law(1.15);
    for (long long n : {2, 3, 10, 1000})
        CHECK(kb.value(n) == doctest::Approx(kp.value(n)).epsilon(1e-12));
}

TEST_CASE("biophysics kernels: bivariate normalization within the tail target") {
    for (auto k : {Kernel::biophysics_scan(2.15, 3.0, 0.9),
                   Kernel::biophysics_matching(2.15, 6.0, 3.0, 0.25).first}) {
        // sum_{n,m} K(n+m) = sum (t-1) K(t) = tot1 - tot0 (exact identities)
        CHECK(k.total_moment(1) - k.total_moment(0) == doctest::Approx(1.0).epsilon(1e-12));
        // direct partial sum plus the zeta-seeded suffix moments closes to 1;
        // the tail at alpha = 1.15 is heavy (about 11% beyond t = 3e5)
        long double s = 0.0L;
        const long long T = 300000;
        for (long long t = 2; t <= T; ++t)
            s += (static_cast<long double>(t) - 1.0L) * static_cast<long double>(k.value(t));
        const double tail = k.tail_moment(1, T + 1) - k.tail_moment(0, T + 1);
        CHECK(static_cast<double>(s) + tail == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(static_cast<double>(s) < 1.0);
    }
}

TEST_CASE("kernel_moment: x = 0 normalization and divergence flags") {
    auto k = Kernel::gamma_ratio(1.5);
    SumResult r = kernel_moment(k, 0, 0.0, MomentWeight::None);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-13));
    // first moment of one coordinate diverges at alpha = 1.5 without damping:
    // p + 2 < 1 + alpha fails for p = 1
    SumResult d = kernel_moment(k, 1, 0.0, MomentWeight::FirstCoordinate);
    CHECK(d.divergent);
    CHECK_THROWS_AS(kernel_moment(k, 0, -0.1, MomentWeight::None), std::domain_error);
}

TEST_CASE("kernel_moment: x -> infinity limit of the damped first-coordinate sum") {
    auto k = Kernel::gamma_ratio(1.5);
    // sum_{n,m} n K(n+m) e^{-xn} -> e^{-x} sum_m K(1+m) as x -> inf
    const double row1 = k.tail_moment(0, 2);  // sum_{m>=1} K(1+m)
    for (double x : {10.0, 14.0, 18.0}) {
        SumResult r = kernel_moment(k, 1, x, MomentWeight::FirstCoordinate);
        const double ratio = r.value / (std::exp(-x) * row1);
        CHECK(std::abs(ratio - 1.0) < 3.0 * std::exp(-x));  // 1 + O(e^{-x})
    }
}

TEST_CASE("anti-diagonal collapse equals the naive double sum to 1e-10 relative") {
    auto k = Kernel::gamma_ratio(1.5);
    const double x = 0.1;
    const long double naive = oracles::naive_sum_2d(k, 0, 0, x, x, 2000);
    SumResult r = kernel_sum_2d(k, 0, 0, x, x);
    CHECK(std::abs((r.value - static_cast<double>(naive)) / static_cast<double>(naive)) < 1e-10);
    // and with mixed coordinate weights
    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}}) {
        const long double nv = oracles::naive_sum_2d(k, a, b, 0.3, 0.15, 1200);
        SumResult s = kernel_sum_2d(k, a, b, 0.3, 0.15);
        CHECK(std::abs((s.value - static_cast<double>(nv)) / static_cast<double>(nv)) < 1e-10);
    }
}

TEST_CASE("kernel spec round-trips losslessly through JSON") {
    std::vector<Kernel> kernels = {Kernel::gamma_ratio(1.5), make_k2(1.5, 0.01),
                                   make_k3(2.5, 0.02), Kernel::power_law(2.2),
                                   Kernel::biophysics_scan(2.15, 3.0, 1.1),
                                   Kernel::tabulated({0.3, 0.1, 0.05}, 1.7, 0.2)};
    for (const auto& k : kernels) {
        Kernel k2 = Kernel::from_json(k.to_json());
        CHECK(k2.hash() == k.hash());
        for (long long t : {2, 3, 5, 17, 1000})
            CHECK(k2.value(t) == k.value(t));  // bit-exact
        CHECK(k2.alpha() == k.alpha());
    }
}

TEST_CASE("free-end kernels: values, sums, regime flag") {
    auto kf_pow = FreeEndKernel::power_law(2.0);
    CHECK(kf_pow.value(0) == 1.0);
    CHECK(kf_pow.value(4) == doctest::Approx(1.0 / 16.0));
    CHECK(kf_pow.sum() == doctest::Approx(1.0 + hurwitz_zeta(2.0, 1.0)).epsilon(1e-14));
    auto kf_shift = FreeEndKernel::shifted_power_law(2.0);
    CHECK(kf_shift.value(0) == 1.0);
    CHECK(kf_shift.value(1) == doctest::Approx(0.25));
    CHECK(kf_shift.sum() == doctest::Approx(hurwitz_zeta(2.0, 1.0)).epsilon(1e-14));
    CHECK(FreeEndKernel::power_law(0.5).sum() == kInf);

    auto k = Kernel::gamma_ratio(1.5);  // (1+alpha)/2 = 1.25
    CHECK(deloc_regime(FreeEndKernel::power_law(0.5), k) == DelocRegime::EndsFree);
    CHECK(deloc_regime(FreeEndKernel::power_law(2.0), k) == DelocRegime::EndsPinned);
    CHECK(deloc_regime(FreeEndKernel::power_law(1.25), k) == DelocRegime::Boundary);
}

TEST_CASE("kernels are safe for concurrent reads") {
    auto k = Kernel::gamma_ratio(1.5);
    std::vector<double> results(4);
    std::vector<std::thread> threads;
    for (int w = 0; w < 4; ++w)
        threads.emplace_back([&, w]() {
            results[static_cast<std::size_t>(w)] =
                kernel_sum_2d(k, 0, 0, 0.5 + 0.1 * w, 0.2).value;
        });
    for (auto& t : threads) t.join();
    for (int w = 0; w < 4; ++w)
        CHECK(results[static_cast<std::size_t>(w)] ==
              kernel_sum_2d(k, 0, 0, 0.5 + 0.1 * w, 0.2).value);
}

TEST_CASE("tabulated kernel: renormalized and consistent with its tail rule") {
    auto k = Kernel::tabulated({0.3, 0.1, 0.05}, 1.7, 0.2);
    CHECK(k.total_moment(1) - k.total_moment(0) == doctest::Approx(1.0).epsilon(1e-12));
    // table ratios preserved by the rescale
    CHECK(k.value(3) / k.value(2) == doctest::Approx(0.1 / 0.3).epsilon(1e-14));
    // exact power law beyond the table
    CHECK(k.value(50) / k.value(25) == doctest::Approx(std::pow(2.0, -2.7)).epsilon(1e-13));
}
