#pragma once

// Phase-diagram scans: locate sign changes of gamma_c(h) - gamma, classify the
// transition order, measure small-h critical exponents, and solve the limit
// Lagrange system for c_{alpha,gamma}.

#include <functional>
#include <optional>
#include <vector>

#include "gps/kernel.hpp"
#include "gps/ldp.hpp"
#include "gps/tilt.hpp"

namespace gps {

// A one-parameter family of pinned models. For a fixed kernel the pinning
// parameter is h itself; for the two-strand parameterization the kernel and
// the model shift both vary with the scan variable.
struct ModelFamily {
    std::function<PinnedModel(double)> at;
    std::optional<Kernel> fixed;  // set when the kernel does not depend on h
};

ModelFamily fixed_family(Kernel k);
// Loop exponent c, binding energy E_b, loop-initiation cost E_l; the scan
// variable plays the role of an inverse temperature.
ModelFamily biophysics_family(double c, double E_b, double E_l,
                              std::size_t horizon = Kernel::kDefaultHorizon);

// Tilt solution of family member at scan value h (model pinning shift applied).
TiltState family_tilt(const ModelFamily& fam, double h, double tol_root = kDefaultTolRoot);

enum class TransitionKind { Denaturation, CramerExit, CramerEntry, Tangential };
enum class TransitionOrder { Second, ThirdOrMore, NoTransition, Undetermined };

struct TransitionRecord {
    double h_star = 0.0;
    TransitionKind kind = TransitionKind::CramerExit;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double gamma_c_slope = 0.0;
    TransitionOrder order = TransitionOrder::Undetermined;
    double jump = 0.0;  // second-derivative gap of the free energy when second order
    double gamma = 0.0;
};

struct ScanParams {
    double h_lo = 1e-2;
    double h_hi = 6.0;
    int grid = 512;
    double tol_h = 1e-8;
    bool log_spaced = true;
    double tangency_tol = 1e-6;
    int workers = 0;
};

// Evaluate gamma_c on the grid, bisect every sign change of gamma_c - gamma,
// flag near-tangential extrema. Untouched fields of the records (order, jump)
// are filled by classify_order.
std::vector<TransitionRecord> scan_transitions(const ModelFamily& fam, double gamma,
                                               const ScanParams& params);

// Fill order, slope and (for second-order transitions of fixed kernels) the
// second-derivative jump of the free energy.
TransitionRecord classify_order(const ModelFamily& fam, TransitionRecord rec);

struct CriticalExponentReport {
    double alpha = 0.0;
    double gamma = 1.0;
    double fitted_exponent = 0.0;       // log-log slope of F_gamma(h) as h -> 0
    double fitted_c_alpha_gamma = 0.0;  // F_gamma / F_1 at the smallest grid point
    double moment_constant = 0.0;       // c with 1/c = (1/2) sum n(n-1) K(n), when finite
    double linear_ratio = 0.0;          // F_gamma(h)/h at the smallest grid point
    bool second_moment_finite = false;
    bool ill_conditioned = false;
};

CriticalExponentReport small_h_exponent(const Kernel& k, double gamma,
                                        const std::vector<double>& h_grid_desc);

// c_{alpha,gamma} from the limit optimization min (a1 + gamma a2)/2 over the
// constraint curve b_alpha(a) = alpha; requires alpha in (1,2) and
// gamma < 1/(alpha-1).
double limit_c_alpha_gamma(double alpha, double gamma);

// (a1^alpha - a2^alpha)/(a1 - a2), with the removable singularity handled.
double b_alpha(double alpha, double a1, double a2);

}  // namespace gps
