#pragma once

// Inter-arrival laws K(.) on {2,3,...} with regularly varying tails, and the
// free-end weights K_f(.) on {0,1,...}. A bivariate step law is always
// K(n,m) = K(n+m). Kernels are immutable after construction; all caches are
// filled in the constructor, so concurrent reads are safe.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gps {

enum class KernelFamily { GammaRatio, ModifiedGammaRatio, PowerLaw, Biophysics, Tabulated };

// K(t) ~ constant * t^{-(1+alpha)} * (1 + beta1/t + beta2/t^2 + O(1/t^3))
// for t >= n_valid.
struct TailModel {
    double constant = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    long long n_valid = 2;
};

struct KernelImpl;

class Kernel {
public:
    static constexpr std::size_t kDefaultHorizon = 1u << 16;

    // K1: K(n) = Gamma(n-alpha) / (Gamma(-alpha) n!), alpha in (1,2).
    static Kernel gamma_ratio(double alpha, std::size_t horizon = kDefaultHorizon);

    // Finite-site overrides of the gamma-ratio sequence, all remaining sites
    // rescaled by the constant that restores sum (n-1)K(n) = 1. Valid for
    // alpha in (1,2) or (2,3); in the latter case site 2 must be overridden.
    static Kernel gamma_ratio_modified(double alpha,
                                       std::vector<std::pair<long long, double>> overrides,
                                       std::size_t horizon = kDefaultHorizon);

    // Normalized pure power law K(n) = C / n^{1+alpha}.
    static Kernel power_law(double alpha, std::size_t horizon = kDefaultHorizon);

    // Loop-exponent parameterization with the pinning weight scanned as an
    // inverse temperature: K(n) proportional to n^{-c} exp(-h_scan*E_l*1{n>2}).
    // The matching pinning parameter is the model_shift of biophysics_family().
    static Kernel biophysics_scan(double c, double E_l, double h_scan,
                                  std::size_t horizon = kDefaultHorizon);

    // Strict matching of the two-strand recursion at inverse temperature beta:
    // step weight exp(h_offset) K(t) equals exp(beta*E_b) for t = 2 and
    // exp(beta*(E_b-E_l)) (t-2)^{-c} for t >= 3. Returns (kernel, h_offset).
    static std::pair<Kernel, double> biophysics_matching(double c, double E_b, double E_l,
                                                         double beta,
                                                         std::size_t horizon = kDefaultHorizon);

    // User table for t = 2..(values.size()+1), exact power tail beyond;
    // the whole law is rescaled so that sum (t-1)K(t) = 1.
    static Kernel tabulated(std::vector<double> values, double alpha, double tail_constant,
                            std::size_t horizon = kDefaultHorizon);

    KernelFamily family() const;
    double alpha() const;
    double value(long long t) const;      // K(t), t >= 2
    double log_value(long long t) const;  // log K(t)
    const TailModel& tail() const;
    long long stored_horizon() const;

    // sum_{t>=2} t^p K(t), exact (zeta/generating-function identities); +inf if divergent
    double total_moment(int p) const;
    bool second_moment_finite() const;  // sum over one coordinate: sum_m m^2 K(m) < inf

    // suffix moments sum_{s>=t} s^j K(s); t may exceed the stored horizon
    double tail_moment(int j, long long t) const;

    double epsilon_tail() const;  // truncation target carried for reporting

    nlohmann::json to_json() const;
    static Kernel from_json(const nlohmann::json& j);
    std::uint64_t hash() const;

private:
    explicit Kernel(std::shared_ptr<const KernelImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const KernelImpl> impl_;
};

class FreeEndKernel {
public:
    enum class Form { PowerLaw, ShiftedPowerLaw };

    // K_f(n) = n^{-alpha_bar} for n >= 1, K_f(0) = 1.
    static FreeEndKernel power_law(double alpha_bar);
    // K_f(n) = (n+1)^{-cbar}; the free-end entropy A(l) of the two-strand model.
    static FreeEndKernel shifted_power_law(double cbar);

    double alpha_bar() const { return exponent_; }
    Form form() const { return form_; }
    double value(long long n) const;
    double log_value(long long n) const;
    double sum() const;  // sum_{n>=0} K_f(n); +inf when divergent

    nlohmann::json to_json() const;
    static FreeEndKernel from_json(const nlohmann::json& j);

private:
    FreeEndKernel(Form f, double e) : form_(f), exponent_(e) {}
    Form form_;
    double exponent_;
};

enum class DelocRegime { EndsFree, EndsPinned, Boundary };

// Sign of alpha_bar - (1+alpha)/2 decides which free-model asymptotics apply
// in the delocalized phase.
DelocRegime deloc_regime(const FreeEndKernel& kf, const Kernel& k, double tol = 1e-12);

// Convenience constructors for the worked examples: site-3 override (K2) and
// site-2 override (K3) of the gamma-ratio family.
Kernel make_k2(double alpha, double kappa, std::size_t horizon = Kernel::kDefaultHorizon);
Kernel make_k3(double alpha, double rho, std::size_t horizon = Kernel::kDefaultHorizon);

// A pinned model is a kernel plus the pinning parameter h in the step weight
// exp(h) K(t).
struct PinnedModel {
    Kernel kernel;
    double h;
};

}  // namespace gps
