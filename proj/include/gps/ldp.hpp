#pragma once

// Second deviation function D_h(1, gamma) via the constrained maximization of
// lambda1 + gamma lambda2 over the Cramer set boundary, regime detection, and
// the assembled free energy (1+gamma) g - D with its closed-form derivatives.

#include <optional>
#include <string>
#include <vector>

#include "gps/kernel.hpp"
#include "gps/tilt.hpp"

namespace gps {

enum class Regime { Cramer, NonCramer, Boundary };

struct RateResult {
    double h = 0.0;
    double gamma = 1.0;
    Regime regime = Regime::Cramer;
    double D = 0.0;            // D_h(1, gamma) >= 0
    double lambda1_hat = 0.0;  // optimizer; (lambda1_bar, g) outside the Cramer regime
    double lambda2_hat = 0.0;
    double free_energy = 0.0;  // (1+gamma) g - D; 0 for h <= 0
    double c_of_h = 0.0;       // g - lambda1_bar (analytic branch)
    std::optional<double> c_hat;  // Cramer branch value when defined
};

// Free energy and rate function at slope gamma > 0. gamma < 1 is reduced by
// the symmetry D(1, gamma) = gamma D(1, 1/gamma).
RateResult rate_and_free_energy(const Kernel& k, const TiltState& st, double gamma,
                                double tol_root = kDefaultTolRoot);

// Unreduced solve over the full boundary curve (any gamma > 0); used to
// cross-check the symmetry reduction.
RateResult rate_direct(const Kernel& k, const TiltState& st, double gamma,
                       double tol_root = kDefaultTolRoot);

struct FreeEnergyDerivative {
    double dF_dh = 0.0;
    double dF_dgamma = 0.0;
};

FreeEnergyDerivative free_energy_derivative(const Kernel& k, const TiltState& st,
                                            const RateResult& res);

// inter-arrival law of the limit path process in the Cramer regime:
// (i,j) -> K(i+j) exp(h - i (F - gamma dF) - j dF); sums to 1
double limit_interarrival_log_prob(const Kernel& k, const TiltState& st, const RateResult& res,
                                   const FreeEnergyDerivative& der, long long i, long long j);
double limit_interarrival_total(const Kernel& k, const TiltState& st, const RateResult& res,
                                const FreeEnergyDerivative& der);

struct PropertyRow {
    std::string name;
    double lhs = 0.0, rhs = 0.0, tol = 0.0;
    bool pass = false;
};

struct PropertyReport {
    std::vector<PropertyRow> rows;
    bool pass = true;
    void add(const std::string& name, double lhs, double rhs, double tol);
};

// Structural checks of D: minimum at gamma = 1, the gamma <-> 1/gamma
// symmetry, convexity in gamma, affinity past gamma_c, subadditivity.
PropertyReport d_properties_check(const Kernel& k, const TiltState& st,
                                  const std::vector<double>& gammas);

}  // namespace gps
