#include "gps/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "gps/special.hpp"

namespace gps {

namespace {

// one backward step from (n, m): pick the last inter-arrival (i, j) with
// probability e^h K(i+j) Z(n-i, m-j) / Z(n, m); candidates scanned in fixed
// order (t ascending, i ascending), so the draw is reproducible
std::pair<long long, long long> backward_step(const Kernel& k, const PartitionTable& tab,
                                              long long n, long long m, double u) {
    const double lz = tab.at(n, m);
    double cum = 0.0;
    std::pair<long long, long long> last{n, m};  // full jump fallback
    for (long long t = 2; t <= n + m; ++t) {
        const double lw = tab.h + k.log_value(t);
        const long long ilo = std::max<long long>(1, t - m), ihi = std::min(n, t - 1);
        for (long long i = ilo; i <= ihi; ++i) {
            const double lprev = tab.at(n - i, m - (t - i));
            if (lprev == kNegInf) continue;
            cum += std::exp(lw + lprev - lz);
            last = {i, t - i};
            if (cum >= u) return last;
        }
    }
    return last;  // cumulative undershoot from rounding: keep the final candidate
}

RenewalPath backward_path(const Kernel& k, const PartitionTable& tab, long long n, long long m,
                          Rng& rng) {
    std::vector<std::pair<long long, long long>> rev;
    while (n > 0 || m > 0) {
        auto [i, j] = backward_step(k, tab, n, m, rng.uniform());
        n -= i;
        m -= j;
        rev.emplace_back(n + i, m + j);  // the point we just left
    }
    RenewalPath p;
    p.points.assign(rev.rbegin(), rev.rend());
    return p;
}

}  // namespace

std::vector<RenewalPath> sample_constrained(const Kernel& k, const PartitionTable& tab,
                                            std::uint64_t seed, long long count) {
    if (tab.corner() == kNegInf)
        throw std::domain_error("sample_constrained: Z^c(N,M) = 0, measure undefined");
    std::vector<RenewalPath> out(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = backward_path(k, tab, tab.N, tab.M, rng);
    }
    return out;
}

std::vector<FreeSample> sample_free(const Kernel& k, const FreeEndKernel& kf,
                                    const PartitionTable& tab, const FreeResult& fr,
                                    std::uint64_t seed, long long count, bool with_bridge) {
    (void)kf;
    // flattened cumulative of the last-contact law, scaled by the maximum
    const std::size_t cells = fr.log_summand.size();
    double mx = kNegInf;
    for (double v : fr.log_summand) mx = std::max(mx, v);
    std::vector<double> cum(cells);
    double acc = 0.0;
    for (std::size_t idx = 0; idx < cells; ++idx) {
        const double v = fr.log_summand[idx];
        if (v != kNegInf) acc += std::exp(v - mx);
        cum[idx] = acc;
    }
    const double total = acc;
    std::vector<FreeSample> out(static_cast<std::size_t>(count));
    for (long long s = 0; s < count; ++s) {
        Rng rng(seed, static_cast<std::uint64_t>(s));
        const double u = rng.uniform() * total;
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        FreeSample fs;
        fs.f1 = static_cast<long long>(idx) / (tab.M + 1);
        fs.f2 = static_cast<long long>(idx) % (tab.M + 1);
        fs.l1 = tab.N - fs.f1;
        fs.l2 = tab.M - fs.f2;
        if (with_bridge && (fs.f1 > 0 || fs.f2 > 0))
            fs.bridge = backward_path(k, tab, fs.f1, fs.f2, rng);
        out[static_cast<std::size_t>(s)] = std::move(fs);
    }
    return out;
}

namespace {

// total-length marginal of the tilted law: P(T = t) = (t-1) e^{h - t g} K(t);
// total mass e^h for h < 0 (defective) and 1 for h >= 0
struct TiltedStepSampler {
    const Kernel& k;
    double h, g;
    std::vector<double> cdf;  // cdf[t-2] = P(T <= t)
    double mass;

    TiltedStepSampler(const Kernel& kk, const TiltState& st) : k(kk), h(st.h), g(st.g) {
        mass = std::exp(std::min(h, 0.0));
        cdf.reserve(1024);
        extend(1024);
    }
    void extend(std::size_t upto) {
        double acc = cdf.empty() ? 0.0 : cdf.back();
        long long t = static_cast<long long>(cdf.size()) + 2;
        while (cdf.size() < upto) {
            acc += (static_cast<double>(t) - 1.0) * std::exp(h - g * static_cast<double>(t)) *
                   k.value(t);
            cdf.push_back(std::min(acc, mass));
            ++t;
        }
    }
    // returns t >= 2, or 0 for termination (h < 0 only)
    long long draw_t(Rng& rng) {
        const double u = rng.uniform();
        if (u >= mass) return 0;
        for (;;) {
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            if (it != cdf.end()) return 2 + static_cast<long long>(it - cdf.begin());
            if (g > 0.0 || cdf.size() < (1u << 22)) {
                extend(cdf.size() * 2);
                continue;
            }
            // heavy tail (h < 0): invert the suffix mass sum_{s>t}(s-1)K(s)
            const double target = (mass - u) * std::exp(-h);
            long long lo = static_cast<long long>(cdf.size()) + 1, hi = lo;
            auto suffix = [&](long long t) { return k.tail_moment(1, t + 1) - k.tail_moment(0, t + 1); };
            while (suffix(hi) > target && hi < (1LL << 60)) hi *= 2;
            while (hi - lo > 1) {
                long long mid = lo + (hi - lo) / 2;
                (suffix(mid) > target ? lo : hi) = mid;
            }
            return hi;
        }
    }
};

}  // namespace

ForwardPath tilted_forward_simulate(const Kernel& k, const TiltState& st, long long t_stop,
                                    std::uint64_t seed, std::uint64_t stream) {
    TiltedStepSampler ts(k, st);
    Rng rng(seed, stream);
    ForwardPath out;
    long long cn = 0, cm = 0;
    while (cn + cm < t_stop) {
        const long long t = ts.draw_t(rng);
        if (t == 0) {
            out.terminated = true;
            break;
        }
        const long long n = 1 + static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(t - 1)));
        cn += n;
        cm += t - n;
        out.path.points.emplace_back(cn, cm);
    }
    return out;
}

HitEstimate forward_hit_probability(const Kernel& k, const TiltState& st, long long N, long long M,
                                    std::uint64_t seed, long long trials) {
    TiltedStepSampler ts(k, st);
    long long hits = 0;
    for (long long s = 0; s < trials; ++s) {
        Rng rng(seed, static_cast<std::uint64_t>(s));
        long long cn = 0, cm = 0;
        while (cn < N && cm < M) {
            const long long t = ts.draw_t(rng);
            if (t == 0) break;
            const long long n =
                1 + static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(t - 1)));
            cn += n;
            cm += t - n;
        }
        if (cn == N && cm == M) ++hits;
    }
    HitEstimate est;
    est.trials = trials;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_err = std::sqrt(std::max(est.p_hat * (1.0 - est.p_hat), 1e-300) /
                            static_cast<double>(trials));
    return est;
}

TvReport tv_against_law(const PairHist& emp,
                        const std::function<double(long long, long long)>& log_prob,
                        long long cutoff) {
    TvReport rep;
    rep.cutoff = cutoff;
    rep.samples = emp.total;
    if (emp.total == 0) return rep;
    const double n = static_cast<double>(emp.total);
    double box_mass = 0.0, tv = 0.0, emp_box = 0.0;
    for (long long i = 0; i <= cutoff; ++i)
        for (long long j = 0; j <= cutoff; ++j) {
            const double lp = log_prob(i, j);
            const double p = lp == kNegInf ? 0.0 : std::exp(lp);
            box_mass += p;
            auto it = emp.counts.find({i, j});
            const double f = it == emp.counts.end() ? 0.0 : static_cast<double>(it->second) / n;
            emp_box += f;
            tv += std::abs(f - p);
            if (p > 0.0) {
                const double se = std::sqrt(p * (1.0 - p) / n);
                rep.max_abs_z = std::max(rep.max_abs_z, std::abs(f - p) / std::max(se, 1e-300));
            }
        }
    // pooled tail cell
    tv += std::abs((1.0 - emp_box) - (1.0 - box_mass));
    rep.tv = 0.5 * tv;
    return rep;
}

LimitLawReport limit_law_cramer(const Kernel& k, const FreeEndKernel& kf, const TiltState& st,
                                const RateResult& res, const PartitionTable& tab,
                                const FreeResult& fr, std::uint64_t seed, long long end_draws,
                                long long bridge_paths, double tv_threshold, long long cutoff) {
    if (!(st.h > 0.0)) throw std::domain_error("limit_law_cramer: requires h > 0");
    if (res.regime != Regime::Cramer)
        throw std::domain_error("limit_law_cramer: gamma outside the Cramer region");
    LimitLawReport rep;
    const FreeEnergyDerivative der = free_energy_derivative(k, st, res);
    const double a = res.free_energy - res.gamma * der.dF_dgamma;  // = g - lambda1_hat
    const double b = der.dF_dgamma;                                // = g - lambda2_hat

    // free-end law (L1, L2) -> K_f(i) e^{-i a} K_f(j) e^{-j b} / C
    {
        auto ends = sample_free(k, kf, tab, fr, seed, end_draws, /*with_bridge=*/false);
        PairHist hist;
        for (auto& e : ends) hist.add(e.l1, e.l2);
        // normalization by 1-d damped sums of K_f over the box + exact tails
        double c1 = 0.0, c2 = 0.0;
        const long long far = 100000;
        for (long long i = 0; i <= far; ++i) {
            c1 += std::exp(kf.log_value(i) - a * static_cast<double>(i));
            c2 += std::exp(kf.log_value(i) - b * static_cast<double>(i));
        }
        const double logC = std::log(c1) + std::log(c2);
        auto law = [&](long long i, long long j) {
            return kf.log_value(i) - a * static_cast<double>(i) + kf.log_value(j) -
                   b * static_cast<double>(j) - logC;
        };
        TvReport tv = tv_against_law(hist, law, cutoff);
        rep.rows.push_back({"free_ends_vs_limit", tv.tv, tv_threshold, tv.max_abs_z, tv.samples,
                            tv.tv <= tv_threshold});
    }
    // inter-arrival law -> K(i+j) e^{h - i a - j b}
    {
        auto paths = sample_constrained(k, tab, seed + 1, bridge_paths);
        PairHist hist;
        for (auto& p : paths) {
            long long pn = 0, pm = 0;
            for (auto& [n, m] : p.points) {
                hist.add(n - pn, m - pm);
                pn = n;
                pm = m;
            }
        }
        auto law = [&](long long i, long long j) {
            if (i < 1 || j < 1) return kNegInf;
            return st.h + k.log_value(i + j) - a * static_cast<double>(i) -
                   b * static_cast<double>(j);
        };
        TvReport tv = tv_against_law(hist, law, cutoff);
        rep.rows.push_back({"interarrival_vs_limit", tv.tv, tv_threshold, tv.max_abs_z, tv.samples,
                            tv.tv <= tv_threshold});
    }
    for (auto& r : rep.rows) rep.pass = rep.pass && r.pass;
    return rep;
}

LimitLawReport limit_law_delocalized(const Kernel& k, const FreeEndKernel& kf,
                                     const PartitionTable& tab, const FreeResult& fr,
                                     std::uint64_t seed, long long draws, double tv_threshold,
                                     long long cutoff) {
    if (!(tab.h < 0.0)) throw std::domain_error("limit_law_delocalized: requires h < 0");
    const DelocRegime regime = deloc_regime(kf, k);
    if (regime == DelocRegime::Boundary)
        throw std::domain_error("limit_law_delocalized: boundary exponent regime rejected");
    LimitLawReport rep;
    auto ends = sample_free(k, kf, tab, fr, seed, draws, /*with_bridge=*/false);
    if (regime == DelocRegime::EndsFree) {
        // last contact (F1, F2) -> (1 - e^h) P((i,j) in tilted renewal) = (1-e^h) Z^c_{i,j,h}
        PairHist hist;
        for (auto& e : ends) hist.add(e.f1, e.f2);
        PartitionTable small = build_constrained(k, cutoff + 1, cutoff + 1, tab.h);
        const double lcoef = std::log1p(-std::exp(tab.h));
        auto law = [&](long long i, long long j) {
            if (i == 0 && j == 0) return lcoef;
            if (i < 1 || j < 1) return kNegInf;
            return lcoef + small.at(i, j);
        };
        TvReport tv = tv_against_law(hist, law, cutoff);
        rep.rows.push_back({"last_contact_vs_terminating", tv.tv, tv_threshold, tv.max_abs_z,
                            tv.samples, tv.tv <= tv_threshold});
    } else {
        // free ends (L1, L2) -> K_f(i) K_f(j) / (sum K_f)^2
        PairHist hist;
        for (auto& e : ends) hist.add(e.l1, e.l2);
        const double logS = std::log(kf.sum());
        auto law = [&](long long i, long long j) {
            return kf.log_value(i) + kf.log_value(j) - 2.0 * logS;
        };
        TvReport tv = tv_against_law(hist, law, cutoff);
        rep.rows.push_back({"free_ends_vs_kf", tv.tv, tv_threshold, tv.max_abs_z, tv.samples,
                            tv.tv <= tv_threshold});
        // empty mid-box probability: evidence for the two-O(1)-clusters picture
        auto paths = sample_free(k, kf, tab, fr, seed + 1, std::min<long long>(draws, 20000),
                                 /*with_bridge=*/true);
        for (long long L : {1LL, 2LL, 4LL, 8LL, 16LL}) {
            long long empty = 0;
            for (auto& p : paths) {
                bool inside = false;
                for (auto& [n, m] : p.bridge.points)
                    if (n >= L && n <= tab.N - L && m >= L && m <= tab.M - L) inside = true;
                if (!inside) ++empty;
            }
            rep.empty_box.emplace_back(L, static_cast<double>(empty) /
                                              static_cast<double>(paths.size()));
        }
    }
    for (auto& r : rep.rows) rep.pass = rep.pass && r.pass;
    return rep;
}

}  // namespace gps
