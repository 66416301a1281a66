#pragma once

// Safeguarded scalar root finding: bisection bracket, Newton (or secant)
// polish. All maps solved in this project are monotone in the unknown, so a
// maintained bracket cannot be lost.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace gps {

struct SolveError : std::runtime_error {
    SolveError(const std::string& what, double lo, double hi, double flo, double fhi)
        : std::runtime_error(what + " [bracket " + std::to_string(lo) + ", " + std::to_string(hi) +
                             "; f = " + std::to_string(flo) + ", " + std::to_string(fhi) + "]"),
          bracket_lo(lo),
          bracket_hi(hi) {}
    double bracket_lo, bracket_hi;
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Root of f on [lo, hi] with f(lo) and f(hi) of opposite sign (either order).
// df may be empty; a secant step is used instead.
inline RootResult solve_bracketed(const std::function<double(double)>& f,
                                  const std::function<double(double)>& df, double lo, double hi,
                                  double flo, double fhi, double tol_f, int max_iter = 200) {
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolveError("root not bracketed", lo, hi, flo, fhi);
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    double x_prev = lo, f_prev = flo;
    RootResult best{x, std::abs(fx), 0};
    for (int it = 1; it <= max_iter; ++it) {
        if (std::abs(fx) < best.residual) best = {x, std::abs(fx), it};
        if (std::abs(fx) <= tol_f) return {x, std::abs(fx), it};
        // shrink bracket
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        double step_x;
        double d = df ? df(x) : (fx - f_prev) / (x - x_prev);
        x_prev = x;
        f_prev = fx;
        if (d != 0.0 && std::isfinite(d)) {
            step_x = x - fx / d;
            if (!(step_x > lo && step_x < hi)) step_x = 0.5 * (lo + hi);
        } else {
            step_x = 0.5 * (lo + hi);
        }
        if (step_x == x || hi - lo <= std::abs(x) * 1e-16 + 1e-300) {
            // bracket exhausted at double resolution
            return {x, std::abs(fx), it};
        }
        x = step_x;
        fx = f(x);
    }
    if (best.residual <= tol_f * 16.0) return best;  // accept near-misses at float resolution
    throw SolveError("root solve did not converge", lo, hi, flo, fhi);
}

}  // namespace gps
