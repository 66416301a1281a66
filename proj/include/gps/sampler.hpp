#pragma once

// Exact path sampling: backward decomposition of the constrained measure from
// a finished partition table, last-contact draws plus constrained bridges for
// the free measure, and forward simulation of the tilted renewal. Streams are
// derived per path index, so samples are reproducible and independent of the
// worker count.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gps/exact_dp.hpp"
#include "gps/kernel.hpp"
#include "gps/ldp.hpp"
#include "gps/rng.hpp"
#include "gps/tilt.hpp"

namespace gps {

struct RenewalPath {
    // strictly increasing points after the implicit origin (0,0); for
    // constrained paths the last point is (N, M)
    std::vector<std::pair<long long, long long>> points;
    long long contacts() const { return static_cast<long long>(points.size()); }
};

std::vector<RenewalPath> sample_constrained(const Kernel& k, const PartitionTable& tab,
                                            std::uint64_t seed, long long count);

struct FreeSample {
    long long f1 = 0, f2 = 0;  // last contact
    long long l1 = 0, l2 = 0;  // free ends (N - f1, M - f2)
    RenewalPath bridge;        // constrained bridge to (f1, f2); empty unless requested
};

std::vector<FreeSample> sample_free(const Kernel& k, const FreeEndKernel& kf,
                                    const PartitionTable& tab, const FreeResult& fr,
                                    std::uint64_t seed, long long count, bool with_bridge);

// forward simulation of the tilted renewal; h < 0 terminates with probability
// 1 - e^h per step
struct ForwardPath {
    RenewalPath path;
    bool terminated = false;  // hit the killing state (h < 0 only)
};

ForwardPath tilted_forward_simulate(const Kernel& k, const TiltState& st, long long t_stop,
                                    std::uint64_t seed, std::uint64_t stream);

// hit-counting estimate of P((N,M) in tilted renewal), with standard error
struct HitEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    long long trials = 0;
};
HitEstimate forward_hit_probability(const Kernel& k, const TiltState& st, long long N, long long M,
                                    std::uint64_t seed, long long trials);

// ---- statistics -----------------------------------------------------------

struct PairHist {
    std::map<std::pair<long long, long long>, long long> counts;
    long long total = 0;
    void add(long long i, long long j) {
        ++counts[{i, j}];
        ++total;
    }
};

// total-variation distance between an empirical histogram and a law given by
// log-probabilities on the box [0,cutoff]^2, with one pooled tail cell
struct TvReport {
    double tv = 1.0;
    double max_abs_z = 0.0;  // largest per-cell z-score inside the box
    long long cutoff = 0;
    long long samples = 0;
};

TvReport tv_against_law(const PairHist& emp,
                        const std::function<double(long long, long long)>& log_prob,
                        long long cutoff);

struct LimitLawRow {
    std::string name;
    double tv = 1.0;
    double threshold = 0.0;
    double max_abs_z = 0.0;
    long long samples = 0;
    bool pass = false;
};

struct LimitLawReport {
    std::vector<LimitLawRow> rows;
    bool pass = true;
    // mid-box contact probabilities for the pinned-ends regime, per margin L
    std::vector<std::pair<long long, double>> empty_box;
};

// h > 0, gamma in the Cramer region: free-end law and inter-arrival law
// against the limit process determined by (F, dF/dgamma).
LimitLawReport limit_law_cramer(const Kernel& k, const FreeEndKernel& kf, const TiltState& st,
                                const RateResult& res, const PartitionTable& tab,
                                const FreeResult& fr, std::uint64_t seed, long long end_draws,
                                long long bridge_paths, double tv_threshold, long long cutoff = 64);

// h < 0: last-contact law (ends-free regime) or free-end law (ends-pinned
// regime) against the terminating-renewal limits.
LimitLawReport limit_law_delocalized(const Kernel& k, const FreeEndKernel& kf,
                                     const PartitionTable& tab, const FreeResult& fr,
                                     std::uint64_t seed, long long draws, double tv_threshold,
                                     long long cutoff = 64);

}  // namespace gps
