#pragma once

// Scalar implicit equations of the tilted model: the exponential tilt g(h)
// normalizing exp(h - (n+m) g) K(n+m) to a probability, the boundary
// multiplier lambda1_bar(h) on the Cramer set, the boundary curve
// lambda2_tilde(.), and the Cramer-boundary slope gamma_c(h).

#include <optional>

#include "gps/kernel.hpp"
#include "gps/series.hpp"

namespace gps {

struct TiltState {
    double h = 0.0;
    double g = 0.0;                      // tilt g(h); 0 for h <= 0
    std::optional<double> lambda1_bar;   // solved for h > 0 only
    std::optional<double> gamma_c;       // Cramer-boundary slope; +inf at alpha = 1
    double residual_g = 0.0;
    double residual_l1 = 0.0;

    bool localized() const { return h > 0.0; }
};

inline constexpr double kDefaultTolRoot = 1e-12;

// g(h): unique root of sum_{t} (t-1) K(t) e^{h - t g} = 1 for h > 0; 0 otherwise.
TiltState solve_g(const Kernel& k, double h, double tol_root = kDefaultTolRoot);

// q_h(lambda1, lambda2) = sum e^h K(n+m) e^{-(g-l1)n - (g-l2)m}; +inf when
// either argument exceeds g.
SumResult q_h(const Kernel& k, const TiltState& st, double lambda1, double lambda2);

// lambda1_bar: unique lambda1 < -g with q_h(lambda1, g) = 1. Fills the state.
double solve_lambda1_bar(const Kernel& k, TiltState& st, double tol_root = kDefaultTolRoot);

// gamma_c(h) per the damped moment ratio at x = g - lambda1_bar; +inf if the
// numerator diverges (alpha <= 1). Fills the state.
double gamma_c(const Kernel& k, TiltState& st);

// convenience: full solve of (g, lambda1_bar, gamma_c)
TiltState solve_tilt(const Kernel& k, double h, double tol_root = kDefaultTolRoot);

struct BoundaryPoint {
    double lambda1 = 0.0;
    double lambda2 = 0.0;   // lambda2_tilde(lambda1)
    double dlambda2 = 0.0;  // implicit derivative -d1 q / d2 q
};

// Point of the curve q_h(l1, l2) = 1. Public domain is [lambda1_bar, 0]; the
// extended flag admits the full symmetric range [lambda1_bar, g].
BoundaryPoint boundary_curve(const Kernel& k, const TiltState& st, double lambda1,
                             double tol_root = kDefaultTolRoot, bool extended = false);

}  // namespace gps
