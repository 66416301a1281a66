#pragma once

// Log-domain accumulation helpers for the DP kernels.

#include <cmath>
#include <limits>
#include <vector>

namespace gps {

inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// Streaming log-sum-exp with a running maximum; suited to long scans where the
// maximum is not known up front.
struct LogSumAcc {
    double max_log = -std::numeric_limits<double>::infinity();
    double sum = 0.0;  // sum of exp(x - max_log)
    void add(double x) {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x <= max_log) {
            sum += std::exp(x - max_log);
        } else {
            sum = sum * std::exp(max_log - x) + 1.0;
            max_log = x;
        }
    }
    double value() const {
        if (sum <= 0.0) return -std::numeric_limits<double>::infinity();
        return max_log + std::log(sum);
    }
};

inline double log_sum_exp(const std::vector<double>& xs) {
    LogSumAcc acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace gps
