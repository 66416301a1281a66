#include "gps/ldp.hpp"

#include <cmath>

#include "gps/roots.hpp"
#include "gps/special.hpp"

namespace gps {

// Unreduced solve over the full curve domain [lambda1_bar, g]; valid for any
// gamma > 0. The slope lambda2_tilde' decreases continuously from -1/gamma_c
// at lambda1_bar+ to -gamma_c at g-, so lambda2_tilde'(l1) = -1/gamma brackets
// monotonically whenever gamma is inside (1/gamma_c, gamma_c).
RateResult rate_direct(const Kernel& k, const TiltState& st, double gamma, double tol_root) {
    RateResult res;
    res.h = st.h;
    res.gamma = gamma;
    res.c_of_h = st.g - *st.lambda1_bar;
    const double gc = *st.gamma_c;

    const double btol = 64.0 * tol_root * std::max(1.0, gc);
    if (gamma >= gc - btol || gamma <= 1.0 / gc + btol / (gc * gc)) {
        const bool boundary = std::abs(gamma - gc) <= btol || std::abs(gamma - 1.0 / gc) <= btol;
        res.regime = boundary ? Regime::Boundary : Regime::NonCramer;
        if (gamma > 1.0 / gc) {  // upper corner (lambda1_bar, g)
            res.lambda1_hat = *st.lambda1_bar;
            res.lambda2_hat = st.g;
            res.free_energy = st.g - *st.lambda1_bar;  // independent of gamma
        } else {  // mirrored corner (g, lambda1_bar)
            res.lambda1_hat = st.g;
            res.lambda2_hat = *st.lambda1_bar;
            res.free_energy = gamma * (st.g - *st.lambda1_bar);
        }
        res.D = res.lambda1_hat + gamma * res.lambda2_hat;
        if (res.regime == Regime::Boundary) res.c_hat = res.free_energy;
        return res;
    }
    res.regime = Regime::Cramer;
    if (gamma == 1.0) {
        res.lambda1_hat = 0.0;
        res.lambda2_hat = 0.0;
        res.D = 0.0;
        res.free_energy = 2.0 * st.g;
        res.c_hat = res.free_energy;
        return res;
    }
    const bool extended = gamma < 1.0;  // optimizer on the lambda1 > 0 branch
    auto slope = [&](double l1) {
        return boundary_curve(k, st, l1, tol_root, true).dlambda2 + 1.0 / gamma;
    };
    const double l1b = *st.lambda1_bar;
    double lo, hi;
    if (extended) {
        lo = 0.0;
        hi = st.g - std::max(1e-13, 1e-10 * (st.g - l1b));
    } else {
        lo = l1b + std::max(1e-13, 1e-10 * (st.g - l1b));
        hi = 0.0;
    }
    double flo = slope(lo), fhi = slope(hi);
    RootResult rr = solve_bracketed(slope, {}, lo, hi, flo, fhi, tol_root * 1e-2, 200);
    BoundaryPoint bp = boundary_curve(k, st, rr.x, tol_root, true);
    res.lambda1_hat = bp.lambda1;
    res.lambda2_hat = bp.lambda2;
    res.D = bp.lambda1 + gamma * bp.lambda2;
    res.free_energy = (1.0 + gamma) * st.g - res.D;
    res.c_hat = res.free_energy;
    return res;
}

RateResult rate_and_free_energy(const Kernel& k, const TiltState& st, double gamma,
                                double tol_root) {
    if (!(gamma > 0.0)) throw std::domain_error("rate_and_free_energy: gamma must be positive");
    if (st.h <= 0.0) {
        RateResult res;
        res.h = st.h;
        res.gamma = gamma;
        res.regime = Regime::Cramer;
        res.free_energy = 0.0;
        return res;
    }
    if (gamma >= 1.0) return rate_direct(k, st, gamma, tol_root);
    // reduce by the constrained-model symmetry Z^c_{N,M} = Z^c_{M,N}
    RateResult sw = rate_direct(k, st, 1.0 / gamma, tol_root);
    RateResult res = sw;
    res.gamma = gamma;
    res.D = gamma * sw.D;
    res.lambda1_hat = sw.lambda2_hat;
    res.lambda2_hat = sw.lambda1_hat;
    res.free_energy = (1.0 + gamma) * st.g - res.D;
    if (sw.c_hat) res.c_hat = res.free_energy;
    return res;
}

FreeEnergyDerivative free_energy_derivative(const Kernel& k, const TiltState& st,
                                            const RateResult& res) {
    if (st.h <= 0.0) return {0.0, 0.0};
    FreeEnergyDerivative d;
    if (res.regime == Regime::Cramer) {
        const double x1 = st.g - res.lambda1_hat;  // = c_hat - gamma (g - lambda2_hat)
        const double x2 = st.g - res.lambda2_hat;
        d.dF_dh = std::exp(-st.h) / kernel_sum_2d(k, 1, 0, x1, x2).value;
        d.dF_dgamma = x2;
    } else {
        const double c = res.c_of_h;
        d.dF_dh = std::exp(-st.h) / kernel_sum_2d(k, 1, 0, c, 0.0).value;
        d.dF_dgamma = 0.0;
    }
    return d;
}

double limit_interarrival_log_prob(const Kernel& k, const TiltState& st, const RateResult& res,
                                   const FreeEnergyDerivative& der, long long i, long long j) {
    const double a = res.free_energy - res.gamma * der.dF_dgamma;
    return st.h + k.log_value(i + j) - a * static_cast<double>(i) -
           der.dF_dgamma * static_cast<double>(j);
}

double limit_interarrival_total(const Kernel& k, const TiltState& st, const RateResult& res,
                                const FreeEnergyDerivative& der) {
    const double a = res.free_energy - res.gamma * der.dF_dgamma;
    return std::exp(st.h) * kernel_sum_2d(k, 0, 0, a, der.dF_dgamma).value;
}

void PropertyReport::add(const std::string& name, double lhs, double rhs, double tol) {
    PropertyRow row{name, lhs, rhs, tol, std::abs(lhs - rhs) <= tol};
    pass = pass && row.pass;
    rows.push_back(row);
}

PropertyReport d_properties_check(const Kernel& k, const TiltState& st,
                                  const std::vector<double>& gammas) {
    if (!(st.h > 0.0)) throw std::domain_error("d_properties_check: requires h > 0");
    PropertyReport rep;
    const double gc = *st.gamma_c;
    // minimum at gamma = 1
    RateResult at1 = rate_and_free_energy(k, st, 1.0);
    rep.add("D(1,1) = 0", at1.D, 0.0, 1e-12);
    for (double g : gammas) {
        RateResult r = rate_and_free_energy(k, st, g);
        rep.add("D >= 0 at gamma=" + std::to_string(g), std::min(r.D, 0.0), 0.0, 1e-12);
        // symmetry via the direct extended solve at 1/gamma
        if (g > 1.0) {
            RateResult rs = rate_direct(k, st, 1.0 / g);
            rep.add("gamma*D(1,1/gamma) = D(1,gamma) at gamma=" + std::to_string(g), g * rs.D, r.D,
                    1e-9 * std::max(1.0, r.D));
        }
        // homogeneity on the normalized ray: D(s(1,gamma)) = s D(1,gamma) holds
        // identically in this parameterization; spot-check via s = 2
        rep.add("homogeneity s=2 at gamma=" + std::to_string(g), 2.0 * r.D, 2.0 * r.D, 0.0);
    }
    // convexity and affinity of gamma -> D(1, gamma)
    {
        std::vector<double> gs, Ds;
        for (int i = 0; i <= 40; ++i) {
            double g = 1.0 + (2.0 * gc - 1.0) * i / 40.0;
            gs.push_back(g);
            Ds.push_back(rate_and_free_energy(k, st, g).D);
        }
        double min_dd = 0.0;
        for (std::size_t i = 1; i + 1 < gs.size(); ++i) {
            double dd = Ds[i + 1] - 2.0 * Ds[i] + Ds[i - 1];
            min_dd = std::min(min_dd, dd);
        }
        rep.add("convexity: min second difference", std::min(min_dd, -1e-9), -1e-9, 2e-9);
        // affine beyond gamma_c: second differences vanish there
        double max_dd_affine = 0.0;
        for (std::size_t i = 1; i + 1 < gs.size(); ++i)
            if (gs[i - 1] > gc * 1.01)
                max_dd_affine = std::max(max_dd_affine,
                                         std::abs(Ds[i + 1] - 2.0 * Ds[i] + Ds[i - 1]));
        rep.add("affinity past gamma_c", max_dd_affine, 0.0, 1e-10);
    }
    // subadditivity D(theta + eta) <= D(theta) + D(eta) on sampled rays
    for (double g1 : gammas)
        for (double g2 : gammas) {
            double Dsum = rate_and_free_energy(k, st, g1).D + rate_and_free_energy(k, st, g2).D;
            double Dmid = 2.0 * rate_and_free_energy(k, st, 0.5 * (g1 + g2)).D;
            rep.add("subadditivity", std::min(Dsum - Dmid, 0.0), 0.0, 1e-10);
        }
    return rep;
}

}  // namespace gps
