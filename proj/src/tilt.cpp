#include "gps/tilt.hpp"

#include <cmath>

#include "gps/roots.hpp"
#include "gps/special.hpp"

namespace gps {

TiltState solve_g(const Kernel& k, double h, double tol_root) {
    if (!(tol_root > 0.0)) throw std::domain_error("solve_g: tol_root must be positive");
    TiltState st;
    st.h = h;
    if (h <= 0.0) return st;  // g(h) = 0 on the delocalized side
    // residual of sum (t-1) K(t) e^{h - t g} - 1, decreasing in g from e^h - 1
    auto f = [&](double g) {
        SumResult r1 = kernel_sum_1d(k, 1, g);
        SumResult r0 = kernel_sum_1d(k, 0, g);
        return std::exp(h) * (r1.value - r0.value) - 1.0;
    };
    auto df = [&](double g) {
        SumResult r2 = kernel_sum_1d(k, 2, g);
        SumResult r1 = kernel_sum_1d(k, 1, g);
        return -std::exp(h) * (r2.value - r1.value);
    };
    double hi = 1.0, fhi = f(hi);
    double lo = 0.0, flo = std::expm1(h);
    while (fhi > 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
        if (hi > 1e6) throw SolveError("solve_g: no upper bracket", lo, hi, flo, fhi);
    }
    RootResult r = solve_bracketed(f, df, lo, hi, flo, fhi, tol_root);
    st.g = r.x;
    st.residual_g = r.residual;
    return st;
}

SumResult q_h(const Kernel& k, const TiltState& st, double lambda1, double lambda2) {
    SumResult res;
    if (lambda1 > st.g || lambda2 > st.g) {
        res.value = kInf;
        res.divergent = true;
        return res;
    }
    res = kernel_sum_2d(k, 0, 0, st.g - lambda1, st.g - lambda2);
    const double w = std::exp(st.h);
    res.value *= w;
    res.tail_bound *= w;
    return res;
}

double solve_lambda1_bar(const Kernel& k, TiltState& st, double tol_root) {
    if (!(st.h > 0.0)) throw std::domain_error("solve_lambda1_bar: requires h > 0");
    auto f = [&](double l1) { return q_h(k, st, l1, st.g).value - 1.0; };
    auto df = [&](double l1) {
        return std::exp(st.h) * kernel_sum_2d(k, 1, 0, st.g - l1, 0.0).value;
    };
    // q(., g) increases in lambda1; q(-g, g) > 1 by strict concavity of the
    // boundary curve, so the root lies below -g.
    double hi = -st.g, fhi = f(hi);
    if (fhi < 0.0) throw SolveError("solve_lambda1_bar: q(-g, g) < 1", hi, hi, fhi, fhi);
    double step = std::max(1.0, st.g);
    double lo = hi - step, flo = f(lo);
    while (flo > 0.0) {
        hi = lo;
        fhi = flo;
        step *= 2.0;
        lo -= step;
        flo = f(lo);
        if (step > 1e8) throw SolveError("solve_lambda1_bar: no lower bracket", lo, hi, flo, fhi);
    }
    RootResult r = solve_bracketed(f, df, lo, hi, flo, fhi, tol_root);
    st.lambda1_bar = r.x;
    st.residual_l1 = r.residual;
    return r.x;
}

double gamma_c(const Kernel& k, TiltState& st) {
    if (!st.lambda1_bar) solve_lambda1_bar(k, st);
    const double x = st.g - *st.lambda1_bar;
    SumResult num = kernel_sum_2d(k, 0, 1, x, 0.0);
    SumResult den = kernel_sum_2d(k, 1, 0, x, 0.0);
    double gc = num.divergent ? kInf : num.value / den.value;
    st.gamma_c = gc;
    return gc;
}

TiltState solve_tilt(const Kernel& k, double h, double tol_root) {
    TiltState st = solve_g(k, h, tol_root);
    if (h > 0.0) {
        solve_lambda1_bar(k, st, tol_root);
        gamma_c(k, st);
    }
    return st;
}

BoundaryPoint boundary_curve(const Kernel& k, const TiltState& st, double lambda1, double tol_root,
                             bool extended) {
    if (!(st.h > 0.0)) throw std::domain_error("boundary_curve: requires h > 0");
    const double l1b = st.lambda1_bar ? *st.lambda1_bar : kNegInf;
    const double slack = 1e-9 * (1.0 + std::abs(l1b));
    const double upper = extended ? st.g : 0.0;
    if (lambda1 < l1b - slack || lambda1 > upper + slack)
        throw std::domain_error("boundary_curve: lambda1 outside the curve domain");
    lambda1 = std::min(std::max(lambda1, l1b), upper);

    auto f = [&](double l2) { return q_h(k, st, lambda1, l2).value - 1.0; };  // increasing in l2
    double lo = std::min(l1b, -st.g), hi = st.g;
    double flo = f(lo), fhi = f(hi);
    BoundaryPoint out;
    out.lambda1 = lambda1;
    if (fhi <= 0.0) {
        // lambda1 at (or numerically at) lambda1_bar: endpoint lambda2 = g
        out.lambda2 = st.g;
    } else {
        auto df = [&](double l2) {
            return std::exp(st.h) * kernel_sum_2d(k, 0, 1, st.g - lambda1, st.g - l2).value;
        };
        RootResult r = solve_bracketed(f, df, lo, hi, flo, fhi, tol_root);
        out.lambda2 = r.x;
    }
    const double x1 = st.g - lambda1, x2 = st.g - out.lambda2;
    const double d1 = kernel_sum_2d(k, 1, 0, x1, x2).value;
    const double d2 = kernel_sum_2d(k, 0, 1, x1, x2).value;
    out.dlambda2 = -d1 / d2;
    return out;
}

}  // namespace gps
