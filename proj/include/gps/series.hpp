#pragma once

// Damped moment sums of a kernel over the lattice:
//
//   S_ab(x1, x2) = sum_{n,m >= 1} n^a m^b K(n+m) exp(-x1 n - x2 m)
//   T_p(x)       = sum_{t >= 2}   t^p K(t) exp(-x t)
//
// with a,b in {0,1,2}. These are the building blocks of the tilt equations,
// the Cramer-boundary curve, and the free-energy derivative formulas. The
// evaluation strategy is chosen from the damping pair:
//  - anti-diagonal recurrence with a certified geometric remainder when the
//    weaker damping still truncates within the stored horizon;
//  - an outer sum over the strongly damped coordinate against suffix moments
//    of K when only one damping is strong;
//  - exact summation to the horizon plus a continuum (midpoint Euler-Maclaurin)
//    tail built on the kernel's asymptotic power law when both dampings are
//    too weak to truncate. The remainder estimate is then first-order E-M and
//    is reported as non-certified.

#include "gps/kernel.hpp"

namespace gps {

struct SumResult {
    double value = 0.0;
    double tail_bound = 0.0;  // bound (or estimate) on the truncation remainder
    bool certified = true;    // true when tail_bound is a rigorous upper bound
    bool divergent = false;   // value is +inf

    operator double() const { return value; }
};

// one-dimensional damped moment, p in {0,1,2}
SumResult kernel_sum_1d(const Kernel& k, int p, double x);

// bivariate damped moment, a,b in {0,1,2}; x1, x2 >= 0
SumResult kernel_sum_2d(const Kernel& k, int a, int b, double x1, double x2);

enum class MomentWeight { None, FirstCoordinate, SecondCoordinate };

// sum_{n,m} w^p K(n+m) e^{-x n} with w = 1, n or m. Divergence is reported in
// the result, not thrown; x < 0 is a domain error.
SumResult kernel_moment(const Kernel& k, int p, double x, MomentWeight w);

}  // namespace gps
