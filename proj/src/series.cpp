#include "gps/series.hpp"

#include <algorithm>
#include <cmath>

#include "gps/special.hpp"

namespace gps {

namespace {

// e^{-x t} falls below 1e-30 * poly slack at x t ~ 70; beyond that a positive
// series truncates at full double accuracy.
constexpr double kDecay = 70.0;
constexpr long long kOuterCap = 4096;  // max outer iterations in the one-sided path

long long direct_horizon(double x, long long cap) {
    if (x <= 0.0) return cap;
    double t = kDecay / x;
    return t >= static_cast<double>(cap) ? cap : std::max<long long>(8, static_cast<long long>(t) + 2);
}

// asymptotic density K_as(t) = C t^{-(1+alpha)} (1 + beta1/t + beta2/t^2)
struct AsymK {
    double C, alpha, beta1, beta2;
    double operator()(double t) const {
        return C * std::pow(t, -(1.0 + alpha)) * (1.0 + beta1 / t + beta2 / (t * t));
    }
};

// integral_{t0}^{inf} t^p K_as(t) e^{-x t} dt
double asym_tail_integral(const AsymK& ka, int p, double x, double t0, bool* finite = nullptr) {
    if (finite) *finite = true;
    if (x <= 0.0) {
        if (ka.alpha <= static_cast<double>(p)) {
            if (finite) *finite = false;
            return kInf;
        }
        double r = ka.C * std::pow(t0, p - ka.alpha) / (ka.alpha - p);
        if (ka.beta1 != 0.0)
            r += ka.C * ka.beta1 * std::pow(t0, p - 1.0 - ka.alpha) / (ka.alpha + 1.0 - p);
        if (ka.beta2 != 0.0)
            r += ka.C * ka.beta2 * std::pow(t0, p - 2.0 - ka.alpha) / (ka.alpha + 2.0 - p);
        return r;
    }
    const double t1 = t0 + (kDecay + 8.0 * (p + 1)) / x;
    auto f = [&](double t) { return std::pow(t, static_cast<double>(p)) * ka(t) * std::exp(-x * t); };
    return integrate_log_axis(f, t0, t1, 1e-10);
}

struct Ctx {
    const Kernel& k;
    AsymK ka;
    long long H;
    explicit Ctx(const Kernel& kk)
        : k(kk),
          ka{kk.tail().constant, kk.alpha(), kk.tail().beta1, kk.tail().beta2},
          H(kk.stored_horizon()) {}
};

// ----- direct anti-diagonal path ------------------------------------------
// I_ab(t) = sum_{n=1}^{t-1} n^a (t-n)^b e^{-x1 n - x2 (t-n)} via the stable
// all-positive recurrence
//   I_ab(t+1) = e^{-x2} [ sum_{j<=b} C(b,j) I_aj(t) + t^a e^{-x1 t} ].
SumResult direct_2d(const Ctx& cx, int a, int b, double x1, double x2, long long T) {
    static const double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
    double I[3][3] = {};
    const double r2 = std::exp(-x2);
    const double e12 = std::exp(-x1 - x2);
    for (int ia = 0; ia <= a; ++ia)
        for (int ib = 0; ib <= b; ++ib) I[ia][ib] = e12;  // t = 2 term (n = 1)
    KahanSum acc;
    double e1t = std::exp(-2.0 * x1);  // e^{-x1 t} maintained at the current t
    double last_term = 0.0;
    for (long long t = 2;; ++t) {
        const double kv = cx.k.value(t);
        last_term = kv * I[a][b];
        acc.add(last_term);
        if (t == T) break;
        const double tp = static_cast<double>(t);
        const double ta[3] = {1.0, tp, tp * tp};
        for (int ia = 0; ia <= a; ++ia) {
            const double newterm = ta[ia] * e1t;
            for (int ib = b; ib >= 0; --ib) {
                double s = newterm;
                for (int j = 0; j <= ib; ++j) s += binom[ib][j] * I[ia][j];
                I[ia][ib] = r2 * s;
            }
        }
        e1t *= std::exp(-x1);
        if ((t & 1023) == 0) e1t = std::exp(-x1 * (tp + 1.0));  // kill drift
    }
    // geometric remainder: terms tau_t <= K_env t^{a+b-alpha} e^{-x2 t} e^{-(x1-x2)}
    SumResult res;
    res.value = acc.value();
    const double Td = static_cast<double>(T);
    const double K_env = cx.k.value(T) * std::pow(Td, 1.0 + cx.ka.alpha) * 1.25;
    const double q = std::exp(-(x2 - (a + b) / Td));
    if (q < 1.0) {
        res.tail_bound = K_env * std::pow(Td, a + b - cx.ka.alpha) * std::exp(-x2 * Td) *
                         std::exp(-(x1 - x2)) * q / (1.0 - q);
        res.certified = true;
    } else {
        res.tail_bound = kInf;
        res.certified = false;
    }
    return res;
}

// ----- one-sided path -------------------------------------------------------
// S = sum_n n^a e^{-x1 n} inner_b(n),  inner_b(n) = sum_m m^b K(n+m) e^{-x2 m}.
// With U_j(n) = sum_{s>n} s^j K(s) e^{-x2 s} (suffix pass),
//   inner_b(n) = e^{x2 n} sum_j C(b,j) (-n)^{b-j} U_j(n).
SumResult one_sided_2d(const Ctx& cx, int a, int b, double x1, double x2, long long n_cap) {
    const long long N1 = direct_horizon(x1, n_cap);
    SumResult res;
    if (x2 == 0.0) {
        // undamped inner moments come straight from the kernel's suffix tables
        KahanSum acc;
        double e1n = std::exp(-x1);
        for (long long n = 1; n <= N1; ++n) {
            const double nd = static_cast<double>(n);
            double inner = 0.0;
            switch (b) {
                case 0: inner = cx.k.tail_moment(0, n + 1); break;
                case 1: inner = cx.k.tail_moment(1, n + 1) - nd * cx.k.tail_moment(0, n + 1); break;
                case 2:
                    inner = cx.k.tail_moment(2, n + 1) - 2.0 * nd * cx.k.tail_moment(1, n + 1) +
                            nd * nd * cx.k.tail_moment(0, n + 1);
                    break;
            }
            if (inner == kInf) {
                res.value = kInf;
                res.divergent = true;
                return res;
            }
            acc.add(std::pow(nd, a) * e1n * std::max(0.0, inner));
            e1n *= std::exp(-x1);
            if ((n & 1023) == 0) e1n = std::exp(-x1 * (nd + 1.0));
        }
        res.value = acc.value();
        const double tail1 = std::exp(-x1 * (N1 + 1.0)) * std::pow(N1 + 1.0, a) *
                             cx.k.tail_moment(b, 2) * 2.0;
        res.tail_bound = std::isfinite(tail1) ? tail1 / std::max(1e-300, -std::expm1(-x1)) : 0.0;
        res.certified = true;
        return res;
    }
    // damped suffix arrays U_j over s = 2..S1, E-M seeded past S1
    const long long S1 = direct_horizon(x2, cx.H);
    std::vector<double> U0(static_cast<std::size_t>(S1) + 2, 0.0), U1, U2;
    if (b >= 1) U1.assign(U0.size(), 0.0);
    if (b >= 2) U2.assign(U0.size(), 0.0);
    double seed0 = asym_tail_integral(cx.ka, 0, x2, S1 + 0.5);
    double seed1 = b >= 1 ? asym_tail_integral(cx.ka, 1, x2, S1 + 0.5) : 0.0;
    double seed2 = b >= 2 ? asym_tail_integral(cx.ka, 2, x2, S1 + 0.5) : 0.0;
    double a0 = seed0, a1 = seed1, a2 = seed2;
    for (long long s = S1; s >= 2; --s) {
        const double sd = static_cast<double>(s);
        const double w = cx.k.value(s) * std::exp(-x2 * sd);
        a0 += w;
        if (b >= 1) a1 += sd * w;
        if (b >= 2) a2 += sd * sd * w;
        U0[static_cast<std::size_t>(s)] = a0;
        if (b >= 1) U1[static_cast<std::size_t>(s)] = a1;
        if (b >= 2) U2[static_cast<std::size_t>(s)] = a2;
    }
    KahanSum acc;
    for (long long n = 1; n <= std::min(N1, S1 - 1); ++n) {
        const double nd = static_cast<double>(n);
        const std::size_t i = static_cast<std::size_t>(n + 1);
        double inner = 0.0;
        switch (b) {
            case 0: inner = U0[i]; break;
            case 1: inner = U1[i] - nd * U0[i]; break;
            case 2: inner = U2[i] - 2.0 * nd * U1[i] + nd * nd * U0[i]; break;
        }
        inner = std::max(0.0, inner) * std::exp(x2 * nd);
        acc.add(std::pow(nd, a) * std::exp(-x1 * nd) * inner);
    }
    SumResult res2;
    res2.value = acc.value();
    res2.tail_bound = std::exp(-x1 * (N1 + 1.0)) * std::pow(N1 + 1.0, a) * U0[2] * 4.0 /
                      std::max(1e-300, -std::expm1(-(x1 - x2)));
    res2.certified = false;  // E-M seed in the suffix arrays
    return res2;
}

// ----- continuum tail for the both-weak path --------------------------------
// Integrand on t of K_as(t) * Itilde_ab(t), where Itilde is the midpoint
// continuum version of the inner anti-diagonal sum.
double itilde(int a, int b, double x1, double x2, double t) {
    static const double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
    const double d = x1 - x2;
    double s = 0.0;
    for (int j = 0; j <= b; ++j) {
        const double pe = poly_exp_integral(a + j, d, 0.5, t - 0.5);
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        s += binom[b][j] * sign * std::pow(t, b - j) * pe;
    }
    return std::exp(-x2 * t) * s;
}

SumResult both_weak_2d(const Ctx& cx, int a, int b, double x1, double x2) {
    SumResult res = direct_2d(cx, a, b, x1, x2, cx.H);
    const double T = static_cast<double>(cx.H) + 0.5;
    double tail = 0.0;
    bool finite = true;
    if (x2 > 0.0) {
        const double t1 = T + (kDecay + 40.0) / x2;
        auto f = [&](double t) { return cx.ka(t) * itilde(a, b, x1, x2, t); };
        tail = integrate_log_axis(f, T, t1, 1e-9);
    } else if (x1 > 0.0) {
        // split: integral over v in (1/2, inf) minus the remainder past t-1/2
        static const double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
        for (int j = 0; j <= b && finite; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const double vfull = poly_exp_integral_tail(a + j, x1, 0.5);
            bool fin = true;
            const double power_piece = asym_tail_integral(cx.ka, b - j, 0.0, T, &fin);
            if (!fin) {
                finite = false;
                break;
            }
            tail += binom[b][j] * sign * vfull * power_piece;
            const double t1 = T + (kDecay + 40.0) / x1;
            auto g = [&](double t) {
                return cx.ka(t) * std::pow(t, b - j) * poly_exp_integral_tail(a + j, x1, t - 0.5);
            };
            tail -= binom[b][j] * sign * integrate_log_axis(g, T, t1, 1e-9);
        }
    } else {
        // fully undamped: closed power form, finite iff a + b + 1 < alpha
        bool fin = true;
        double v = 0.0;
        // integral over the wedge of n^a m^b K_as(n+m): collapse over t gives
        // Beta(a+1,b+1) t^{a+b+1} K_as(t)
        const double beta_ab = std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
        v = beta_ab * asym_tail_integral(cx.ka, a + b + 1, 0.0, T, &fin);
        if (!fin) finite = false;
        tail = v;
    }
    if (!finite) {
        res.value = kInf;
        res.divergent = true;
        return res;
    }
    res.value += tail;
    // first-order E-M / asymptotics slack estimate
    const double slack = (x1 * x1 + x2 * x2) / 24.0 + 4.0 * (1.0 + cx.ka.alpha) * (1.0 + cx.ka.alpha) / (T * T);
    res.tail_bound = std::abs(tail) * slack + std::abs(tail) * 1e-9;
    res.certified = false;
    return res;
}

}  // namespace

SumResult kernel_sum_1d(const Kernel& k, int p, double x) {
    if (p < 0 || p > 2) throw std::domain_error("kernel_sum_1d: p in {0,1,2}");
    if (x < 0.0) throw std::domain_error("kernel_sum_1d: x >= 0 required");
    Ctx cx(k);
    if (x == 0.0) {
        SumResult r;
        r.value = k.total_moment(p);
        r.divergent = !std::isfinite(r.value);
        r.tail_bound = 0.0;
        return r;
    }
    const long long T = direct_horizon(x, cx.H);
    KahanSum acc;
    double ext = std::exp(-2.0 * x);
    for (long long t = 2; t <= T; ++t) {
        const double td = static_cast<double>(t);
        acc.add(std::pow(td, p) * k.value(t) * ext);
        ext *= std::exp(-x);
        if ((t & 1023) == 0) ext = std::exp(-x * (td + 1.0));
    }
    SumResult r;
    r.value = acc.value();
    if (x * static_cast<double>(T) >= kDecay) {
        const double Td = static_cast<double>(T);
        const double q = std::exp(-(x - p / Td));
        r.tail_bound = k.value(T) * std::pow(Td, p) * std::exp(-x * Td) * q / std::max(1e-300, 1.0 - q);
        r.certified = true;
    } else {
        const double tail = asym_tail_integral(cx.ka, p, x, static_cast<double>(T) + 0.5);
        r.value += tail;
        r.tail_bound = tail * (x * x / 24.0 + 8.0 / (static_cast<double>(T) * static_cast<double>(T)));
        r.certified = false;
    }
    return r;
}

SumResult kernel_sum_2d(const Kernel& k, int a, int b, double x1, double x2) {
    if (a < 0 || a > 2 || b < 0 || b > 2) throw std::domain_error("kernel_sum_2d: a,b in {0,1,2}");
    if (x1 < 0.0 || x2 < 0.0) throw std::domain_error("kernel_sum_2d: dampings must be >= 0");
    if (x1 < x2) {
        std::swap(a, b);
        std::swap(x1, x2);
    }
    // x1 >= x2 from here on
    Ctx cx(k);
    if (x2 < 1e-13) x2 = 0.0;
    if (x1 < 1e-13 && x2 == 0.0) {
        // fully undamped sums from the exact moment identities where they close
        SumResult r;
        r.tail_bound = 0.0;
        if (a == 0 && b == 0) {
            r.value = k.total_moment(1) - k.total_moment(0);  // sum (t-1) K(t)
            return r;
        }
        if (a + b == 1) {
            // sum_{n,m} n K(n+m) = sum_t t(t-1)/2 K(t)
            r.value = 0.5 * (k.total_moment(2) - k.total_moment(1));
            r.divergent = !std::isfinite(r.value);
            return r;
        }
        // higher moments need sum t^3 K and beyond: divergent for alpha <= 3
        if (k.alpha() <= a + b + 1.0) {
            r.value = kInf;
            r.divergent = true;
            return r;
        }
        x1 = 0.0;  // finite heavy cases fall through to the numeric path
    }
    if (x2 > 0.0 && direct_horizon(x2, cx.H) < cx.H)
        return direct_2d(cx, a, b, x1, x2, direct_horizon(x2, cx.H));
    if (direct_horizon(x1, kOuterCap + 1) <= kOuterCap)
        return one_sided_2d(cx, a, b, x1, x2, kOuterCap);
    if (x2 == 0.0 && direct_horizon(x1, cx.H) < cx.H)
        return one_sided_2d(cx, a, b, x1, x2, cx.H);
    return both_weak_2d(cx, a, b, x1, x2);
}

SumResult kernel_moment(const Kernel& k, int p, double x, MomentWeight w) {
    if (x < 0.0) throw std::domain_error("kernel_moment: damping x must be >= 0");
    if (p < 0) throw std::domain_error("kernel_moment: power must be >= 0");
    switch (w) {
        case MomentWeight::None: {
            // sum_{n,m} K(n+m) e^{-x n} = S_00(x, 0)
            return kernel_sum_2d(k, 0, 0, x, 0.0);
        }
        case MomentWeight::FirstCoordinate:
            return kernel_sum_2d(k, p, 0, x, 0.0);
        case MomentWeight::SecondCoordinate:
            return kernel_sum_2d(k, 0, p, x, 0.0);
    }
    throw std::logic_error("kernel_moment: bad weight");
}

}  // namespace gps
