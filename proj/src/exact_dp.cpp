#include "gps/exact_dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "gps/logsumexp.hpp"
#include "gps/special.hpp"

namespace gps {

namespace {

struct Diag {
    long long lo = 0, hi = -1;       // n-range of the diagonal
    double C = kNegInf;              // max finite log value
    long long peak = 0;              // argmax n
    std::vector<double> scaled;      // exp(log_z - C), index n - lo
};

// direct per-cell evaluation, used as a fallback when the scaled accumulator
// underflows (cells hundreds of nats below the diagonal scale)
double direct_cell(const std::vector<double>& logw, const PartitionTable& tab, long long n,
                   long long m) {
    LogSumAcc acc;
    for (long long i = 1; i <= n; ++i)
        for (long long j = 1; j <= m; ++j) {
            double prev = tab.at(n - i, m - j);
            if (prev == kNegInf) continue;
            acc.add(logw[static_cast<std::size_t>(i + j)] + prev);
        }
    return acc.value();
}

}  // namespace

PartitionTable build_constrained_weights(const std::function<double(long long)>& logw_fn,
                                         long long N, long long M, std::size_t mem_limit) {
    if (N < 1 || M < 1) throw std::domain_error("build_constrained: need N, M >= 1");
    const std::size_t cells = static_cast<std::size_t>(N + 1) * static_cast<std::size_t>(M + 1);
    const std::size_t need = cells * 2 * sizeof(double) + static_cast<std::size_t>(N + M) * 64;
    if (need > mem_limit)
        throw std::length_error("build_constrained: table needs " + std::to_string(need) +
                                " bytes, limit " + std::to_string(mem_limit));

    PartitionTable tab;
    tab.N = N;
    tab.M = M;
    tab.log_z.assign(cells, kNegInf);
    tab.log_z[0] = 0.0;  // Z^c_{0,0} = 1

    std::vector<double> logw(static_cast<std::size_t>(N + M + 1), kNegInf);
    for (long long t = 2; t <= N + M; ++t) logw[static_cast<std::size_t>(t)] = logw_fn(t);

    const long long D = N + M;
    std::vector<Diag> diags(static_cast<std::size_t>(D + 1));
    auto build_diag = [&](long long d) {
        Diag& dg = diags[static_cast<std::size_t>(d)];
        dg.lo = std::max<long long>(0, d - M);
        dg.hi = std::min(N, d);
        dg.C = kNegInf;
        dg.peak = dg.lo;
        for (long long n = dg.lo; n <= dg.hi; ++n) {
            double v = tab.at(n, d - n);
            if (v > dg.C) {
                dg.C = v;
                dg.peak = n;
            }
        }
        dg.scaled.assign(static_cast<std::size_t>(dg.hi - dg.lo + 1), 0.0);
        if (dg.C == kNegInf) return;
        for (long long n = dg.lo; n <= dg.hi; ++n)
            dg.scaled[static_cast<std::size_t>(n - dg.lo)] = std::exp(tab.at(n, d - n) - dg.C);
    };
    build_diag(0);
    if (D >= 1) build_diag(1);

    const bool mirror = (N == M);
    std::vector<double> acc;
    for (long long d = 2; d <= D; ++d) {
        const long long lo = std::max<long long>(0, d - M), hi = std::min(N, d);
        const long long ncl = std::max<long long>(lo, 1), nch_full = std::min(hi, d - 1);
        long long nch = nch_full;
        if (mirror) nch = std::min(nch_full, d / 2);
        if (ncl > nch) {
            build_diag(d);
            continue;
        }
        // reference scale for the accumulators of this diagonal
        double cref = kNegInf;
        for (long long t = 2; t <= d; ++t) {
            const Diag& src = diags[static_cast<std::size_t>(d - t)];
            if (src.C == kNegInf) continue;
            cref = std::max(cref, logw[static_cast<std::size_t>(t)] + src.C);
        }
        acc.assign(static_cast<std::size_t>(nch - ncl + 1), 0.0);
        for (long long t = 2; t <= d; ++t) {
            const Diag& src = diags[static_cast<std::size_t>(d - t)];
            if (src.C == kNegInf) continue;
            const double phi = std::exp(logw[static_cast<std::size_t>(t)] + src.C - cref);
            if (phi == 0.0) continue;
            const auto& Dv = src.scaled;
            auto dval = [&](long long np) { return Dv[static_cast<std::size_t>(np - src.lo)]; };
            auto wlo_of = [&](long long n) { return std::max(src.lo, n - t + 1); };
            auto whi_of = [&](long long n) { return std::min(src.hi, n - 1); };
            const long long split = std::clamp(src.peak + t / 2, ncl - 1, nch);
            // ascending pass: windows gain on the right, lose on the left
            if (ncl <= split) {
                long long wlo = wlo_of(ncl), whi = whi_of(ncl);
                double W = 0.0;
                for (long long np = wlo; np <= whi; ++np) W += dval(np);
                for (long long n = ncl;; ++n) {
                    if (W > 0.0) acc[static_cast<std::size_t>(n - ncl)] += phi * W;
                    if (n == split) break;
                    const long long nwhi = whi_of(n + 1), nwlo = wlo_of(n + 1);
                    if (nwhi > whi && nwhi >= nwlo && nwhi >= src.lo) W += dval(nwhi);
                    if (nwlo > wlo && wlo <= whi_of(n)) W -= dval(wlo);
                    whi = nwhi;
                    wlo = nwlo;
                    if (W < 0.0) W = 0.0;
                }
            }
            // descending pass: windows gain on the left, lose on the right
            if (split < nch) {
                long long wlo = wlo_of(nch), whi = whi_of(nch);
                double W = 0.0;
                for (long long np = wlo; np <= whi; ++np) W += dval(np);
                for (long long n = nch;; --n) {
                    if (W > 0.0) acc[static_cast<std::size_t>(n - ncl)] += phi * W;
                    if (n == split + 1) break;
                    const long long nwhi = whi_of(n - 1), nwlo = wlo_of(n - 1);
                    if (nwlo < wlo && nwlo >= src.lo && nwlo <= nwhi) W += dval(nwlo);
                    if (nwhi < whi && whi <= src.hi && whi >= wlo) W -= dval(whi);
                    whi = nwhi;
                    wlo = nwlo;
                    if (W < 0.0) W = 0.0;
                }
            }
        }
        for (long long n = ncl; n <= nch; ++n) {
            const double a = acc[static_cast<std::size_t>(n - ncl)];
            double lz;
            if (a > 0.0 && std::isfinite(cref)) {
                lz = cref + std::log(a);
            } else {
                lz = direct_cell(logw, tab, n, d - n);  // scaled accumulator underflowed
            }
            tab.log_z[static_cast<std::size_t>(n * (M + 1) + (d - n))] = lz;
        }
        if (mirror) {
            for (long long n = nch + 1; n <= nch_full; ++n)
                tab.log_z[static_cast<std::size_t>(n * (M + 1) + (d - n))] = tab.at(d - n, n);
        }
        build_diag(d);
    }
    return tab;
}

PartitionTable build_constrained(const Kernel& k, long long N, long long M, double h,
                                 std::size_t mem_limit) {
    PartitionTable tab = build_constrained_weights(
        [&](long long t) { return h + k.log_value(t); }, N, M, mem_limit);
    tab.h = h;
    tab.kernel_hash = k.hash();
    return tab;
}

FreeResult build_free(const FreeEndKernel& kf, const PartitionTable& table) {
    FreeResult out;
    out.N = table.N;
    out.M = table.M;
    out.log_summand.assign(static_cast<std::size_t>((table.N + 1) * (table.M + 1)), kNegInf);
    LogSumAcc acc;
    for (long long i = 0; i <= table.N; ++i) {
        const double lf1 = kf.log_value(table.N - i);
        for (long long j = 0; j <= table.M; ++j) {
            const double lz = table.at(i, j);
            if (lz == kNegInf) continue;
            const double v = lf1 + kf.log_value(table.M - j) + lz;
            out.log_summand[static_cast<std::size_t>(i * (table.M + 1) + j)] = v;
            acc.add(v);
        }
    }
    out.log_zf = acc.value();
    return out;
}

double biophysics_partition(double c, double E_b, double E_l, double beta, long long N, long long M,
                            double cbar) {
    if (N < 1 || M < 1) throw std::domain_error("biophysics_partition: need N, M >= 1");
    if (!(c > 2.0)) throw std::domain_error("biophysics_partition: need c > 2");
    if (N > 128 || M > 128)
        throw std::length_error("biophysics_partition: reference recursion limited to N, M <= 128");
    // W_l^r in log domain; strand index from 1
    std::vector<double> W(static_cast<std::size_t>((N + 1) * (M + 1)), kNegInf);
    auto at = [&](long long l, long long r) -> double& {
        return W[static_cast<std::size_t>(l * (M + 1) + r)];
    };
    at(1, 1) = 0.0;  // W_1^1 = 1; W_1^r = W_l^1 = 0 otherwise
    for (long long l = 2; l <= N; ++l)
        for (long long r = 2; r <= M; ++r) {
            LogSumAcc acc;
            acc.add(beta * E_b + at(l - 1, r - 1));
            for (long long i = 0; i <= l - 2; ++i)
                for (long long ip = (i == 0 ? 1 : 0); ip <= r - 2; ++ip) {
                    double prev = at(l - 1 - i, r - 1 - ip);
                    if (prev == kNegInf) continue;
                    acc.add(beta * (E_b - E_l) - c * std::log(static_cast<double>(i + ip)) + prev);
                }
            at(l, r) = acc.value();
        }
    LogSumAcc z;
    for (long long i = 0; i <= N - 1; ++i)
        for (long long j = 0; j <= M - 1; ++j) {
            double w = at(N - i, M - j);
            if (w == kNegInf) continue;
            z.add(-cbar * (std::log(i + 1.0) + std::log(j + 1.0)) + w);
        }
    return z.value();
}

FiniteSizeReport finite_size_free_energy(const Kernel& k, const FreeEndKernel& kf, double h,
                                         double gamma, const std::vector<long long>& sizes,
                                         std::size_t mem_limit) {
    if (sizes.size() < 3)
        throw std::domain_error("finite_size_free_energy: need at least 3 sizes");
    FiniteSizeReport rep;
    for (long long n : sizes) {
        const long long m = std::llround(gamma * static_cast<double>(n));
        PartitionTable tab = build_constrained(k, n, m, h, mem_limit);
        FreeResult fr = build_free(kf, tab);
        FiniteSizeRow row;
        row.N = n;
        row.M = m;
        row.log_zc = tab.corner();
        row.log_zf = fr.log_zf;
        row.fc_raw = row.log_zc / static_cast<double>(n);
        row.ff_raw = row.log_zf / static_cast<double>(n);
        rep.rows.push_back(row);
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const FiniteSizeRow& a, const FiniteSizeRow& b) { return a.N < b.N; });
    const auto& r1 = rep.rows[rep.rows.size() - 2];
    const auto& r2 = rep.rows.back();
    auto extrap = [&](double lz1, double lz2) {
        const double L1 = lz1 + 0.5 * std::log(static_cast<double>(r1.N));
        const double L2 = lz2 + 0.5 * std::log(static_cast<double>(r2.N));
        return (L2 - L1) / static_cast<double>(r2.N - r1.N);
    };
    rep.extrapolated_fc = extrap(r1.log_zc, r2.log_zc);
    rep.extrapolated_ff = extrap(r1.log_zf, r2.log_zf);
    rep.gap_largest = std::abs(r2.fc_raw - r2.ff_raw);
    return rep;
}

namespace {
constexpr char kTableMagic[8] = {'G', 'P', 'S', 'T', 'B', 'L', '0', '1'};
}

void save_table(const PartitionTable& tab, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_table: cannot open " + path);
    f.write(kTableMagic, 8);
    f.write(reinterpret_cast<const char*>(&tab.N), sizeof(tab.N));
    f.write(reinterpret_cast<const char*>(&tab.M), sizeof(tab.M));
    f.write(reinterpret_cast<const char*>(&tab.h), sizeof(tab.h));
    f.write(reinterpret_cast<const char*>(&tab.kernel_hash), sizeof(tab.kernel_hash));
    f.write(reinterpret_cast<const char*>(tab.log_z.data()),
            static_cast<std::streamsize>(tab.log_z.size() * sizeof(double)));
    if (!f) throw std::runtime_error("save_table: write failed for " + path);
}

PartitionTable load_table(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_table: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kTableMagic, 8) != 0)
        throw std::runtime_error("load_table: bad magic in " + path);
    PartitionTable tab;
    f.read(reinterpret_cast<char*>(&tab.N), sizeof(tab.N));
    f.read(reinterpret_cast<char*>(&tab.M), sizeof(tab.M));
    f.read(reinterpret_cast<char*>(&tab.h), sizeof(tab.h));
    f.read(reinterpret_cast<char*>(&tab.kernel_hash), sizeof(tab.kernel_hash));
    if (!f || tab.N < 1 || tab.M < 1 || tab.N > (1LL << 20) || tab.M > (1LL << 20))
        throw std::runtime_error("load_table: corrupt header in " + path);
    tab.log_z.resize(static_cast<std::size_t>((tab.N + 1) * (tab.M + 1)));
    f.read(reinterpret_cast<char*>(tab.log_z.data()),
           static_cast<std::streamsize>(tab.log_z.size() * sizeof(double)));
    if (!f) throw std::runtime_error("load_table: truncated grid in " + path);
    return tab;
}

}  // namespace gps
