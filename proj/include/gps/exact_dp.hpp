#pragma once

// Exact finite-size partition functions in log domain. The constrained grid
// Z^c_{n,m} is filled by the renewal recursion grouped over anti-diagonals
// t = i + j, with sliding-window segment sums over per-diagonal scaled values:
// per-cell cost O(n+m) instead of O(n m). Summation order is fixed, so equal
// inputs give bit-identical tables; square tables are mirrored across the
// diagonal, making the symmetry exact.

#include <cstdint>
#include <functional>
#include <vector>

#include "gps/kernel.hpp"

namespace gps {

struct PartitionTable {
    long long N = 0, M = 0;
    double h = 0.0;
    std::uint64_t kernel_hash = 0;
    std::vector<double> log_z;  // (N+1) x (M+1), row-major; -inf at unreachable cells

    double at(long long n, long long m) const {
        return log_z[static_cast<std::size_t>(n * (M + 1) + m)];
    }
    double corner() const { return at(N, M); }
};

inline constexpr std::size_t kDefaultDpMemLimit = std::size_t(1) << 31;  // 2 GiB

// General engine: per-step log weights logw(t), t in [2, N+M].
PartitionTable build_constrained_weights(const std::function<double(long long)>& logw, long long N,
                                         long long M, std::size_t mem_limit = kDefaultDpMemLimit);

// Pinned renewal model: logw(t) = h + log K(t).
PartitionTable build_constrained(const Kernel& k, long long N, long long M, double h,
                                 std::size_t mem_limit = kDefaultDpMemLimit);

struct FreeResult {
    long long N = 0, M = 0;
    double log_zf = 0.0;
    // log K_f(N-i) K_f(M-j) Z^c_{i,j}; the last-contact law of the free model
    std::vector<double> log_summand;  // (N+1) x (M+1) row-major

    double summand(long long i, long long j) const {
        return log_summand[static_cast<std::size_t>(i * (M + 1) + j)];
    }
};

FreeResult build_free(const FreeEndKernel& kf, const PartitionTable& table);

// Reference implementation of the two-strand recursion (naive O(N^2 M^2),
// intended for cross-checks at small sizes): returns log Z_N^M assembled from
// the loop entropy B(l) = l^{-c}, free-end entropy A(l) = (l+1)^{-cbar}, s = 1.
double biophysics_partition(double c, double E_b, double E_l, double beta, long long N, long long M,
                            double cbar);

struct FiniteSizeRow {
    long long N = 0, M = 0;
    double log_zc = 0.0, log_zf = 0.0;
    double fc_raw = 0.0, ff_raw = 0.0;  // (1/N) log Z
};

struct FiniteSizeReport {
    std::vector<FiniteSizeRow> rows;
    // slope of (log Z + 1/2 log N) between the two largest sizes: cancels the
    // constant and the square-root prefactor of the localized asymptotics
    double extrapolated_fc = 0.0;
    double extrapolated_ff = 0.0;
    double gap_largest = 0.0;  // |fc_raw - ff_raw| at the largest size
};

FiniteSizeReport finite_size_free_energy(const Kernel& k, const FreeEndKernel& kf, double h,
                                         double gamma, const std::vector<long long>& sizes,
                                         std::size_t mem_limit = kDefaultDpMemLimit);

// Binary table dump for reuse by the sampler and the validation suite.
// Versioned header (magic, N, M, h, kernel hash) followed by the row-major
// grid; native byte order, intended for same-platform reuse.
void save_table(const PartitionTable& tab, const std::string& path);
PartitionTable load_table(const std::string& path);

}  // namespace gps
