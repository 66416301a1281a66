#pragma once

// Finite-size validation of the sharp asymptotics: terminating-renewal
// constants, free-model prefactors in all three regimes, local-limit-theorem
// shape along rays, convolution bounds, and the finite-size free-energy
// inequality. Every check emits rows {measured, claimed, tolerance, pass} and
// serializes to the report schema used by the CLI.

#include <string>
#include <vector>

#include <json.hpp>

#include "gps/exact_dp.hpp"
#include "gps/kernel.hpp"
#include "gps/ldp.hpp"

namespace gps {

struct CheckRow {
    std::string id;
    long long size = 0;
    double measured = 0.0;
    double claimed = 0.0;
    double tolerance = 0.0;  // relative, against `claimed` (or stability window)
    bool pass = false;
};

struct CheckReport {
    std::string check_id;
    nlohmann::json params;
    std::vector<CheckRow> rows;
    bool pass = true;

    void add(const std::string& id, long long size, double measured, double claimed, double tol,
             bool row_pass);
    nlohmann::json to_json() const;
};

// h < 0: Z^c_{N,M}/K(N+M) -> e^h/(1-e^h)^2, plus the uniform bound
// Z^c <= c_h K(N+M) with c fitted from the convolution inequality.
CheckReport check_terminating_sharp(const Kernel& k, double h, double gamma,
                                    const std::vector<long long>& sizes);

// K^{2*}(N,M) <= 2^c K(N,M): measured exponent c over doubling sizes.
CheckReport check_convolution_bound(const Kernel& k, const std::vector<long long>& sizes);

// free-model sharp constants: ends-free and ends-pinned ratios -> 1 (h < 0);
// Cramer sqrt(N)-prefactor stability (h > 0).
CheckReport check_free_sharp(const Kernel& k, const FreeEndKernel& kf, double h, double gamma,
                             const std::vector<long long>& sizes, double ratio_tol = 0.05,
                             double stability_tol = 0.10);

// local limit shape: sqrt(t) e^{t D(v)} P((N, round(gamma N)) in tilted
// renewal) stable across sizes in the Cramer region; outside, the log-slope
// fit of P recovers D to slope_tol.
CheckReport check_renewal_llt(const Kernel& k, double h, double gamma,
                              const std::vector<long long>& sizes, double stability_tol = 0.10,
                              double slope_tol = 2e-3);

// N f_{gamma_N} - N' f_{gamma'_N} >= 0 for sampled (N',M') <= (N,M), Cramer
// regime (finite-size comparison inequality of the free energy).
CheckReport check_free_energy_inequality(const Kernel& k, double h, long long N, long long M);

}  // namespace gps
