#pragma once

// Small special-function and quadrature toolbox used by the series engine.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace gps {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Compensated (Kahan) accumulator for long positive-term sums.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// Hurwitz zeta  zeta(s, a) = sum_{k>=0} (k+a)^{-s},  s > 1, a > 0.
// Euler-Maclaurin with a short direct head; accurate to ~1e-15 for s in (1, 40).
inline double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw std::domain_error("hurwitz_zeta: need s>1, a>0");
    const int head = a < 24.0 ? static_cast<int>(24.0 - a) + 1 : 1;
    double sum = 0.0;
    for (int k = 0; k < head; ++k) sum += std::pow(k + a, -s);
    const double b = a + head;
    double acc = std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s);
    // B_{2j}/(2j)! for j = 1..6
    static const double coef[6] = {1.0 / 12.0,      -1.0 / 720.0,      1.0 / 30240.0,
                                   -1.0 / 1209600.0, 1.0 / 47900160.0, -691.0 / 1307674368000.0};
    double rising = s;                      // (s)_{2j-1} built incrementally
    double power = std::pow(b, -s - 1.0);
    for (int j = 1; j <= 6; ++j) {
        acc += coef[j - 1] * rising * power;
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        power /= b * b;
    }
    return sum + acc;
}

// Gamma(-alpha) for non-integer alpha > 0, via the reflection formula.
inline double gamma_negative(double alpha) {
    double ip;
    if (std::modf(alpha, &ip) == 0.0) throw std::domain_error("gamma_negative: integer alpha");
    // Gamma(-a) Gamma(1+a) = -pi / sin(pi a)
    return -M_PI / (std::sin(M_PI * alpha) * std::tgamma(1.0 + alpha));
}

// integral_{lo}^{hi} v^p e^{-d v} dv for p in {0..5}, d >= 0, 0 < lo < hi.
// Stable for d*hi small (series) and large (explicit antiderivative).
inline double poly_exp_integral(int p, double d, double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (d * hi < 1e-4) {
        // expand e^{-dv}: sum_k (-d)^k/k! * (hi^{p+k+1}-lo^{p+k+1})/(p+k+1)
        double sum = 0.0, dk = 1.0;
        for (int k = 0; k <= 6; ++k) {
            double momentum = (std::pow(hi, p + k + 1) - std::pow(lo, p + k + 1)) / (p + k + 1);
            sum += dk * momentum;
            dk *= -d / (k + 1);
        }
        return sum;
    }
    // F(v) = e^{-dv} * sum_{i=0..p} p!/(p-i)! * v^{p-i} / d^{i+1};  integral = F(lo) - F(hi)
    auto F = [&](double v) {
        double fact = 1.0, term = 0.0, dp = d;
        double vp = std::pow(v, p);
        for (int i = 0; i <= p; ++i) {
            term += fact * vp / dp;
            fact *= (p - i);
            vp = (v > 0.0) ? vp / v : 0.0;
            dp *= d;
        }
        return std::exp(-d * v) * term;
    };
    return F(lo) - F(hi);
}

// integral_{v0}^{inf} v^p e^{-x v} dv, x > 0 (all-positive antiderivative form).
inline double poly_exp_integral_tail(int p, double x, double v0) {
    if (!(x > 0.0)) throw std::domain_error("poly_exp_integral_tail: need x>0");
    double fact = 1.0, term = 0.0, xp = x;
    double vp = std::pow(v0, p);
    for (int i = 0; i <= p; ++i) {
        term += fact * vp / xp;
        fact *= (p - i);
        vp = (v0 > 0.0) ? vp / v0 : 0.0;
        xp *= x;
    }
    return std::exp(-x * v0) * term;
}

namespace detail {
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson on [a,b]; abs_tol is an absolute tolerance on the result.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int depth = 42) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, depth);
}

// integral_{t0}^{t1} g(t) dt computed on a logarithmic axis (integrand smooth in log t).
// Splits into per-decade panels so the adaptive rule sees the scale structure.
inline double integrate_log_axis(const std::function<double(double)>& g, double t0, double t1,
                                 double rel_tol) {
    if (t1 <= t0) return 0.0;
    const double u0 = std::log(t0), u1 = std::log(t1);
    auto h = [&](double u) {
        double t = std::exp(u);
        return g(t) * t;
    };
    // coarse scan for scale
    double scale = 0.0;
    const int ns = 33;
    for (int i = 0; i < ns; ++i) {
        double u = u0 + (u1 - u0) * i / (ns - 1.0);
        scale = std::max(scale, std::abs(h(u)));
    }
    if (scale == 0.0) return 0.0;
    const double abs_tol = scale * (u1 - u0) * rel_tol;
    double total = 0.0;
    const int panels = std::max(1, static_cast<int>((u1 - u0) / 1.5) + 1);
    for (int i = 0; i < panels; ++i) {
        double a = u0 + (u1 - u0) * i / panels;
        double b = u0 + (u1 - u0) * (i + 1) / panels;
        total += adaptive_simpson(h, a, b, abs_tol / panels);
    }
    return total;
}

}  // namespace gps
