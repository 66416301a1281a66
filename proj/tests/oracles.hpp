#pragma once

// Test-only oracles, kept independent of the library's evaluation paths:
// long-double brute-force sums, plain bisection solvers, direct Gamma-function
// kernel values, and full path/composition enumeration at tiny sizes.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "gps/kernel.hpp"
#include "gps/special.hpp"

namespace oracles {

// K1(n) by direct log-Gamma evaluation (the implementation uses the ratio
// recurrence; this is the independent route)
inline double k1_direct(double alpha, long long n) {
    const double log_gn = std::lgamma(static_cast<double>(n) - alpha);
    const double log_fact = std::lgamma(static_cast<double>(n) + 1.0);
    return std::exp(log_gn - log_fact) / gps::gamma_negative(alpha);
}

// naive truncated double sum over the box n,m <= box
inline long double naive_sum_2d(const gps::Kernel& k, int a, int b, double x1, double x2,
                                long long box) {
    long double s = 0.0L;
    for (long long n = 1; n <= box; ++n)
        for (long long m = 1; m <= box; ++m)
            s += powl(static_cast<long double>(n), a) * powl(static_cast<long double>(m), b) *
                 static_cast<long double>(k.value(n + m)) *
                 expl(-static_cast<long double>(x1) * n - static_cast<long double>(x2) * m);
    return s;
}

// sum_{t=2}^{T} (t-1) K(t) e^{-t g} in long double
inline long double one_d_weighted(const gps::Kernel& k, long double g, long long T) {
    long double s = 0.0L;
    for (long long t = 2; t <= T; ++t)
        s += (static_cast<long double>(t) - 1.0L) * static_cast<long double>(k.value(t)) *
             expl(-g * static_cast<long double>(t));
    return s;
}

// plain long-double bisection for the tilt g(h)
inline long double bisect_g(const gps::Kernel& k, double h, long long T = 2000000,
                            int iters = 120) {
    long double lo = 0.0L, hi = 1.0L;
    const long double target = expl(-static_cast<long double>(h));
    while (one_d_weighted(k, hi, T) > target) hi *= 2.0L;
    for (int i = 0; i < iters; ++i) {
        long double mid = 0.5L * (lo + hi);
        (one_d_weighted(k, mid, T) > target ? lo : hi) = mid;
    }
    return 0.5L * (lo + hi);
}

// q_h(l1, g) in long double via the suffix transform; x2 = 0 exactly
inline long double q_at_g(const gps::Kernel& k, double h, long double g, long double l1,
                          long long mtail = 4000000) {
    // T(j) = sum_{t >= j} K(t) by backward pass
    static thread_local std::vector<long double> tbar;
    static thread_local std::uint64_t cached_kernel = 0;
    if (cached_kernel != k.hash() || tbar.size() != static_cast<std::size_t>(mtail) + 3) {
        tbar.assign(static_cast<std::size_t>(mtail) + 3, 0.0L);
        long double acc = 0.0L;
        // crude power-law seed beyond mtail
        const double C = k.tail().constant;
        const double al = k.alpha();
        acc = static_cast<long double>(C / al * std::pow(static_cast<double>(mtail) + 0.5, -al));
        for (long long t = mtail; t >= 2; --t) {
            acc += static_cast<long double>(k.value(t));
            tbar[static_cast<std::size_t>(t)] = acc;
        }
        cached_kernel = k.hash();
    }
    long double s = 0.0L;
    const long double x1 = g - l1;
    for (long long n = 1; n <= 600; ++n) {
        long double w = expl(-x1 * static_cast<long double>(n));
        if (w < 1e-30L) break;
        s += w * tbar[static_cast<std::size_t>(n + 1)];
    }
    return expl(static_cast<long double>(h)) * s;
}

inline long double bisect_lambda1_bar(const gps::Kernel& k, double h, long double g,
                                      int iters = 150) {
    long double hi = -g, lo = -g - 1.0L;
    while (q_at_g(k, h, g, lo) > 1.0L) lo -= 1.0L;
    for (int i = 0; i < iters; ++i) {
        long double mid = 0.5L * (lo + hi);
        (q_at_g(k, h, g, mid) > 1.0L ? hi : lo) = mid;
    }
    return 0.5L * (lo + hi);
}

// all constrained paths to (N, M) with their exact probabilities
using Path = std::vector<std::pair<long long, long long>>;
inline std::map<Path, double> enumerate_paths(const gps::Kernel& k, long long N, long long M,
                                              double h, double log_z) {
    std::map<Path, double> out;
    Path cur;
    std::function<void(long long, long long, double)> rec = [&](long long n, long long m,
                                                                double lp) {
        if (n == N && m == M) {
            out[cur] = std::exp(lp - log_z);
            return;
        }
        for (long long i = n + 1; i <= N; ++i)
            for (long long j = m + 1; j <= M; ++j) {
                cur.emplace_back(i, j);
                rec(i, j, lp + h + k.log_value((i - n) + (j - m)));
                cur.pop_back();
            }
    };
    rec(0, 0, 0.0);
    return out;
}

// memoized composition-enumeration value of Z^c in long double
inline long double enumerate_zc(const gps::Kernel& k, long long N, long long M, double h) {
    std::vector<std::vector<long double>> memo(static_cast<std::size_t>(N + 1),
                                               std::vector<long double>(static_cast<std::size_t>(M + 1), -1.0L));
    std::function<long double(long long, long long)> rec = [&](long long n,
                                                               long long m) -> long double {
        if (n == 0 && m == 0) return 1.0L;
        if (n == 0 || m == 0) return 0.0L;
        long double& v = memo[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
        if (v >= 0.0L) return v;
        long double s = 0.0L;
        for (long long i = 1; i <= n; ++i)
            for (long long j = 1; j <= m; ++j)
                s += expl(static_cast<long double>(h)) * static_cast<long double>(k.value(i + j)) *
                     rec(n - i, m - j);
        v = s;
        return s;
    };
    return rec(N, M);
}

}  // namespace oracles
