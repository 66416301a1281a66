#include "gps/phase.hpp"

#include <algorithm>
#include <cmath>

#include "gps/parallel.hpp"
#include "gps/roots.hpp"
#include "gps/special.hpp"

namespace gps {

ModelFamily fixed_family(Kernel k) {
    ModelFamily fam;
    fam.fixed = k;
    fam.at = [k](double h) { return PinnedModel{k, h}; };
    return fam;
}

ModelFamily biophysics_family(double c, double E_b, double E_l, std::size_t horizon) {
    if (!(c > 2.0)) throw std::domain_error("biophysics_family: need c > 2");
    const double cK = hurwitz_zeta(c - 1.0, 2.0) - hurwitz_zeta(c, 2.0);  // sum (t-1) t^{-c}
    const double z3m = hurwitz_zeta(c - 1.0, 3.0) - hurwitz_zeta(c, 3.0);
    ModelFamily fam;
    fam.at = [=](double h) {
        Kernel k = Kernel::biophysics_scan(c, E_l, h, horizon);
        // step weight c_K^{-1} t^{-c} e^{h(E_b - E_l 1_{t>2})} = e^{h_model} K(t)
        const double W = std::pow(2.0, -c) + std::exp(-h * E_l) * z3m;
        const double h_model = h * E_b + std::log(W) - std::log(cK);
        return PinnedModel{k, h_model};
    };
    return fam;
}

TiltState family_tilt(const ModelFamily& fam, double h, double tol_root) {
    PinnedModel pm = fam.at(h);
    return solve_tilt(pm.kernel, pm.h, tol_root);
}

namespace {

double gamma_c_at(const ModelFamily& fam, double h) {
    TiltState st = family_tilt(fam, h);
    return st.gamma_c ? *st.gamma_c : kInf;
}

// eq-level closed form for gamma_c'(h) at a point where gamma_c(h) = gamma
// (fixed kernel only)
double gamma_c_slope_closed(const Kernel& k, double h, double gamma) {
    TiltState st = solve_tilt(k, h);
    const double c = st.g - *st.lambda1_bar;
    const double s10 = kernel_sum_2d(k, 1, 0, c, 0.0).value;
    const double s11 = kernel_sum_2d(k, 1, 1, c, 0.0).value;
    const double s20 = kernel_sum_2d(k, 2, 0, c, 0.0).value;
    const double cp = std::exp(-h) / s10;
    return -(cp / s10) * (s11 - gamma * s20);
}

double gamma_c_slope_fd(const ModelFamily& fam, double h, double tol_h) {
    const double dh = std::max(1e-6 * std::max(1.0, std::abs(h)), 8.0 * tol_h);
    return (gamma_c_at(fam, h + dh) - gamma_c_at(fam, h - dh)) / (2.0 * dh);
}

}  // namespace

std::vector<TransitionRecord> scan_transitions(const ModelFamily& fam, double gamma,
                                               const ScanParams& params) {
    if (!(params.h_lo > 0.0) || !(params.h_hi > params.h_lo) || params.grid < 2)
        throw std::domain_error("scan_transitions: need 0 < h_lo < h_hi and grid >= 2");
    const int n = params.grid;
    std::vector<double> hs(n), gc(n);
    for (int i = 0; i < n; ++i) {
        double u = static_cast<double>(i) / (n - 1);
        hs[i] = params.log_spaced ? params.h_lo * std::pow(params.h_hi / params.h_lo, u)
                                  : params.h_lo + (params.h_hi - params.h_lo) * u;
    }
    parallel_for(
        n, [&](long long i) { gc[static_cast<std::size_t>(i)] = gamma_c_at(fam, hs[static_cast<std::size_t>(i)]); },
        params.workers);

    std::vector<TransitionRecord> records;
    for (int i = 0; i + 1 < n; ++i) {
        const double s0 = gc[i] - gamma, s1 = gc[i + 1] - gamma;
        if (s0 == 0.0 && i > 0) continue;  // grid point exactly on the level: bisection below catches it
        if ((s0 > 0.0 && s1 > 0.0) || (s0 < 0.0 && s1 < 0.0)) continue;
        // bracketed sign change: bisect to tol_h
        double lo = hs[i], hi = hs[i + 1], flo = s0;
        while (hi - lo > params.tol_h) {
            double mid = 0.5 * (lo + hi);
            double fm = gamma_c_at(fam, mid) - gamma;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        TransitionRecord rec;
        rec.h_star = 0.5 * (lo + hi);
        rec.kind = s0 > 0.0 ? TransitionKind::CramerExit : TransitionKind::CramerEntry;
        rec.bracket_lo = lo;
        rec.bracket_hi = hi;
        rec.gamma = gamma;
        rec.gamma_c_slope = fam.fixed ? gamma_c_slope_closed(*fam.fixed, rec.h_star, gamma)
                                      : gamma_c_slope_fd(fam, rec.h_star, params.tol_h);
        records.push_back(rec);
    }
    // tangential candidates: interior grid extrema of |gamma_c - gamma| below
    // the tangency tolerance that are not adjacent to a located sign change
    for (int i = 1; i + 1 < n; ++i) {
        const double a = std::abs(gc[i - 1] - gamma), b = std::abs(gc[i] - gamma),
                     c = std::abs(gc[i + 1] - gamma);
        if (b <= a && b <= c && b < params.tangency_tol) {
            bool near_record = false;
            for (auto& r : records)
                if (std::abs(r.h_star - hs[i]) <= 2.0 * (hs[i + 1] - hs[i - 1])) near_record = true;
            if (near_record) continue;
            TransitionRecord rec;
            rec.h_star = hs[i];
            rec.kind = TransitionKind::Tangential;
            rec.bracket_lo = hs[i - 1];
            rec.bracket_hi = hs[i + 1];
            rec.gamma = gamma;
            rec.order = TransitionOrder::Undetermined;
            rec.gamma_c_slope = fam.fixed ? gamma_c_slope_closed(*fam.fixed, rec.h_star, gamma)
                                          : gamma_c_slope_fd(fam, rec.h_star, params.tol_h);
            records.push_back(rec);
        }
    }
    std::sort(records.begin(), records.end(),
              [](const TransitionRecord& x, const TransitionRecord& y) { return x.h_star < y.h_star; });
    return records;
}

TransitionRecord classify_order(const ModelFamily& fam, TransitionRecord rec) {
    if (rec.kind == TransitionKind::Tangential) {
        rec.order = TransitionOrder::Undetermined;
        return rec;
    }
    PinnedModel pm = fam.at(rec.h_star);
    const bool m2_finite = pm.kernel.second_moment_finite();
    const double slope_tol = 1e-6;
    if (!m2_finite) {
        rec.order = TransitionOrder::ThirdOrMore;
        rec.jump = 0.0;
        return rec;
    }
    if (std::abs(rec.gamma_c_slope) <= slope_tol) {
        rec.order = TransitionOrder::ThirdOrMore;  // zero slope: jump formula vanishes
        rec.jump = 0.0;
        return rec;
    }
    rec.order = TransitionOrder::Second;
    if (fam.fixed) {
        // second-derivative gap of the free energy across h*
        const Kernel& k = *fam.fixed;
        TiltState st = solve_tilt(k, rec.h_star);
        const double c = st.g - *st.lambda1_bar;
        const double s10 = kernel_sum_2d(k, 1, 0, c, 0.0).value;
        const double s11 = kernel_sum_2d(k, 1, 1, c, 0.0).value;
        const double s20 = kernel_sum_2d(k, 2, 0, c, 0.0).value;
        const double s02 = kernel_sum_2d(k, 0, 2, c, 0.0).value;
        const double fp = std::exp(-rec.h_star) / s10;
        const double num = s11 - rec.gamma * s20;
        const double den = s02 - 2.0 * rec.gamma * s11 + rec.gamma * rec.gamma * s20;
        rec.jump = -fp * fp * fp * std::exp(rec.h_star) * num * num / den;
    }
    return rec;
}

CriticalExponentReport small_h_exponent(const Kernel& k, double gamma,
                                        const std::vector<double>& h_grid_desc) {
    CriticalExponentReport rep;
    rep.alpha = k.alpha();
    rep.gamma = gamma;
    rep.second_moment_finite = k.second_moment_finite();
    if (h_grid_desc.size() < 3) {
        rep.ill_conditioned = true;
        if (h_grid_desc.empty()) return rep;
    }
    std::vector<double> lx, ly;
    double f_small = 0.0, f1_small = 0.0, h_small = 0.0;
    for (double h : h_grid_desc) {
        if (!(h > 0.0)) throw std::domain_error("small_h_exponent: h grid must be positive");
        TiltState st = solve_tilt(k, h);
        RateResult r = rate_and_free_energy(k, st, gamma);
        lx.push_back(std::log(h));
        ly.push_back(std::log(r.free_energy));
        f_small = r.free_energy;
        f1_small = 2.0 * st.g;
        h_small = h;
    }
    // least-squares slope of log F vs log h
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    rep.fitted_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
    rep.linear_ratio = f_small / h_small;
    rep.fitted_c_alpha_gamma = f_small / f1_small;
    if (rep.second_moment_finite)
        rep.moment_constant = 2.0 / (k.total_moment(2) - k.total_moment(1));
    return rep;
}

double b_alpha(double alpha, double a1, double a2) {
    const double d = a1 - a2;
    const double am = 0.5 * (a1 + a2);
    if (std::abs(d) < 1e-7 * std::max(1.0, am)) {
        // removable singularity: alpha * am^{alpha-1} + O(d^2)
        return alpha * std::pow(am, alpha - 1.0) *
               (1.0 + (alpha - 1.0) * (alpha - 2.0) / 24.0 * d * d / (am * am));
    }
    return (std::pow(a1, alpha) - std::pow(a2, alpha)) / d;
}

namespace {

// db/da1 and db/da2, with the near-diagonal branch
void b_alpha_partials(double alpha, double a1, double a2, double& d1, double& d2) {
    const double d = a1 - a2;
    const double am = 0.5 * (a1 + a2);
    if (std::abs(d) < 1e-6 * std::max(1.0, am)) {
        d1 = d2 = 0.5 * alpha * (alpha - 1.0) * std::pow(am, alpha - 2.0);
        return;
    }
    const double b = b_alpha(alpha, a1, a2);
    d1 = (alpha * std::pow(a1, alpha - 1.0) - b) / d;
    d2 = (b - alpha * std::pow(a2, alpha - 1.0)) / d;
}

}  // namespace

double limit_c_alpha_gamma(double alpha, double gamma) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::domain_error("limit_c_alpha_gamma: alpha must be in (1,2)");
    if (!(gamma >= 1.0 && gamma < 1.0 / (alpha - 1.0)))
        throw std::domain_error("limit_c_alpha_gamma: requires 1 <= gamma < 1/(alpha-1)");
    const double a1_max = std::pow(alpha, 1.0 / (alpha - 1.0));
    // a1(a2): root of b_alpha(a1, a2) = alpha, increasing bracket [1, a1_max]
    auto a1_of = [&](double a2) {
        auto f = [&](double a1) { return b_alpha(alpha, a1, a2) - alpha; };
        double lo = std::max(a2, 1.0), hi = a1_max * (1.0 + 1e-12);
        double flo = f(lo), fhi = f(hi);
        if (flo >= 0.0) return lo;  // a2 -> 1 corner
        RootResult r = solve_bracketed(f, {}, lo, hi, flo, fhi, 1e-14);
        return r.x;
    };
    // phi'(a2) = a1'(a2) + gamma, increasing from gamma - 1/(alpha-1) < 0 to gamma - 1 >= 0
    auto phi_prime = [&](double a2) {
        double a1 = a1_of(a2);
        double d1, d2;
        b_alpha_partials(alpha, a1, a2, d1, d2);
        return -d2 / d1 + gamma;
    };
    if (gamma == 1.0) return 1.0;  // optimizer at (1,1)
    double lo = 1e-12, hi = 1.0 - 1e-12;
    double flo = phi_prime(lo), fhi = phi_prime(hi);
    RootResult r = solve_bracketed(phi_prime, {}, lo, hi, flo, fhi, 1e-12);
    const double a2 = r.x, a1 = a1_of(a2);
    return 0.5 * (a1 + gamma * a2);
}

}  // namespace gps
