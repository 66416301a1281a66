#include "gps/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "gps/special.hpp"

namespace gps {

using nlohmann::json;

struct KernelImpl {
    KernelFamily family;
    double alpha = 0.0;
    std::vector<double> val;   // K(t) for t = 2..horizon (index t-2)
    std::vector<double> logv;  // log K(t)
    TailModel tail;
    double tot[3] = {0.0, 0.0, 0.0};  // sum t^p K(t); tot[2] may be +inf
    bool tot2_finite = false;
    // suffix moments sum_{s>=t} s^j K(s), index t in [2, horizon+1]
    std::vector<double> tbar0, tbar1, tbar2;
    double eps_tail = 1e-12;
    json params;  // construction parameters, for serialization and hashing

    long long horizon() const { return static_cast<long long>(val.size()) + 1; }

    double value_at(long long t) const {
        if (t < 2) return 0.0;
        if (t <= horizon()) return val[static_cast<std::size_t>(t - 2)];
        const double td = static_cast<double>(t);
        return tail.constant * std::pow(td, -(1.0 + alpha)) *
               (1.0 + tail.beta1 / td + tail.beta2 / (td * td));
    }
    double log_value_at(long long t) const {
        if (t <= horizon()) return logv[static_cast<std::size_t>(t - 2)];
        const double td = static_cast<double>(t);
        return std::log(tail.constant) - (1.0 + alpha) * std::log(td) +
               std::log1p(tail.beta1 / td + tail.beta2 / (td * td));
    }
};

namespace {

// seed value for sum_{s>=t0} s^j K_as(s) using the midpoint integral of the
// asymptotic form; valid when j < alpha
double tail_seed(const TailModel& tm, double alpha, int j, long long t0) {
    const double b = static_cast<double>(t0) - 0.5;
    double r = tm.constant * std::pow(b, j - alpha) / (alpha - j);
    if (tm.beta1 != 0.0 && alpha + 1.0 - j > 0.0)
        r += tm.constant * tm.beta1 * std::pow(b, j - 1.0 - alpha) / (alpha + 1.0 - j);
    if (tm.beta2 != 0.0 && alpha + 2.0 - j > 0.0)
        r += tm.constant * tm.beta2 * std::pow(b, j - 2.0 - alpha) / (alpha + 2.0 - j);
    return r;
}

void finalize(KernelImpl& im) {
    im.logv.resize(im.val.size());
    for (std::size_t i = 0; i < im.val.size(); ++i) {
        if (!(im.val[i] > 0.0))
            throw std::domain_error("kernel: nonpositive value at t=" + std::to_string(i + 2));
        im.logv[i] = std::log(im.val[i]);
    }
    if (!(im.tail.constant > 0.0))
        throw std::domain_error("kernel: nonpositive tail constant");
    const long long H = im.horizon();
    im.tbar0.resize(static_cast<std::size_t>(H));  // index t-2, t in [2, H+1]
    im.tbar1.resize(static_cast<std::size_t>(H));
    if (im.tot2_finite) im.tbar2.resize(static_cast<std::size_t>(H));
    // backward accumulation keeps every suffix relatively accurate (no
    // big-minus-big cancellation); seeded by the asymptotic integral past H
    double a0 = tail_seed(im.tail, im.alpha, 0, H + 1);
    double a1 = tail_seed(im.tail, im.alpha, 1, H + 1);
    double a2 = im.tot2_finite ? tail_seed(im.tail, im.alpha, 2, H + 1) : 0.0;
    for (long long t = H; t >= 2; --t) {
        const std::size_t i = static_cast<std::size_t>(t - 2);
        const double k = im.val[i];
        a0 += k;
        a1 += static_cast<double>(t) * k;
        if (im.tot2_finite) a2 += static_cast<double>(t) * static_cast<double>(t) * k;
        im.tbar0[i] = a0;
        im.tbar1[i] = a1;
        if (im.tot2_finite) im.tbar2[i] = a2;
    }
}

json overrides_to_json(const std::vector<std::pair<long long, double>>& ov) {
    json a = json::array();
    for (auto& [n, v] : ov) a.push_back(json::array({n, v}));
    return a;
}

}  // namespace

Kernel Kernel::gamma_ratio(double alpha, std::size_t horizon) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::domain_error("gamma_ratio: alpha must be in (1,2)");
    auto im = std::make_shared<KernelImpl>();
    im->family = KernelFamily::GammaRatio;
    im->alpha = alpha;
    im->val.resize(horizon - 1);
    // K(2) = alpha(alpha-1)/2, then the sign-stable ratio recurrence.
    double k = alpha * (alpha - 1.0) / 2.0;
    for (long long t = 2; t <= static_cast<long long>(horizon); ++t) {
        im->val[static_cast<std::size_t>(t - 2)] = k;
        k *= (static_cast<double>(t) - alpha) / (static_cast<double>(t) + 1.0);
    }
    im->tail = TailModel{1.0 / gamma_negative(alpha), alpha * (alpha + 1.0) / 2.0,
                         alpha * (alpha + 1.0) * (alpha + 2.0) * (3.0 * alpha + 1.0) / 24.0, 512};
    im->tot[0] = alpha - 1.0;
    im->tot[1] = alpha;
    im->tot[2] = kInf;
    im->tot2_finite = false;
    im->params = json{{"family", "gamma_ratio"}, {"alpha", alpha}, {"horizon", horizon}};
    finalize(*im);
    return Kernel(std::move(im));
}

Kernel Kernel::gamma_ratio_modified(double alpha,
                                    std::vector<std::pair<long long, double>> overrides,
                                    std::size_t horizon) {
    const bool low = alpha > 1.0 && alpha < 2.0;
    const bool high = alpha > 2.0 && alpha < 3.0;
    if (!low && !high)
        throw std::domain_error("gamma_ratio_modified: alpha must be in (1,2) or (2,3)");
    std::sort(overrides.begin(), overrides.end());
    for (auto& [n, v] : overrides) {
        if (n < 2) throw std::domain_error("gamma_ratio_modified: override site < 2");
        if (!(v > 0.0)) throw std::domain_error("gamma_ratio_modified: override value <= 0");
    }
    // raw gamma-ratio sequence c_t (signed for alpha in (2,3))
    auto raw = [&](long long tmax) {
        std::vector<double> c(static_cast<std::size_t>(tmax - 1));
        double k = alpha * (alpha - 1.0) / 2.0;
        for (long long t = 2; t <= tmax; ++t) {
            c[static_cast<std::size_t>(t - 2)] = k;
            k *= (static_cast<double>(t) - alpha) / (static_cast<double>(t) + 1.0);
        }
        return c;
    };
    auto base = raw(static_cast<long long>(horizon));
    auto base_at = [&](long long t) { return base[static_cast<std::size_t>(t - 2)]; };

    double ov_tm1 = 0.0, base_tm1 = 0.0;  // (t-1)-weighted masses on the override set
    for (auto& [n, v] : overrides) {
        ov_tm1 += (n - 1.0) * v;
        base_tm1 += (n - 1.0) * base_at(n);
    }
    const double denom = 1.0 - base_tm1;
    if (denom == 0.0) throw std::domain_error("gamma_ratio_modified: degenerate renormalization");
    const double c_scale = (1.0 - ov_tm1) / denom;

    auto im = std::make_shared<KernelImpl>();
    im->family = KernelFamily::ModifiedGammaRatio;
    im->alpha = alpha;
    im->val.resize(horizon - 1);
    for (long long t = 2; t <= static_cast<long long>(horizon); ++t)
        im->val[static_cast<std::size_t>(t - 2)] = c_scale * base_at(t);
    long long max_site = 2;
    for (auto& [n, v] : overrides) {
        if (n > static_cast<long long>(horizon))
            throw std::domain_error("gamma_ratio_modified: override beyond horizon");
        im->val[static_cast<std::size_t>(n - 2)] = v;
        max_site = std::max(max_site, n);
    }
    const double tail_c = c_scale / gamma_negative(alpha);
    if (!(tail_c > 0.0))
        throw std::domain_error("gamma_ratio_modified: renormalization constant nonpositive");
    im->tail = TailModel{tail_c, alpha * (alpha + 1.0) / 2.0,
                         alpha * (alpha + 1.0) * (alpha + 2.0) * (3.0 * alpha + 1.0) / 24.0,
                         std::max<long long>(512, max_site + 1)};
    // exact totals from the generating-function identities:
    //   sum c_t = alpha-1, sum t c_t = alpha, sum t^2 c_t = alpha (alpha in (2,3))
    double ov0 = 0.0, ov1 = 0.0, ov2 = 0.0, b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (auto& [n, v] : overrides) {
        ov0 += v;
        ov1 += static_cast<double>(n) * v;
        ov2 += static_cast<double>(n) * static_cast<double>(n) * v;
        b0 += base_at(n);
        b1 += static_cast<double>(n) * base_at(n);
        b2 += static_cast<double>(n) * static_cast<double>(n) * base_at(n);
    }
    im->tot[0] = ov0 + c_scale * ((alpha - 1.0) - b0);
    im->tot[1] = ov1 + c_scale * (alpha - b1);
    im->tot2_finite = high;
    im->tot[2] = high ? ov2 + c_scale * (alpha - b2) : kInf;
    im->params = json{{"family", "modified_gamma_ratio"},
                      {"alpha", alpha},
                      {"overrides", overrides_to_json(overrides)},
                      {"horizon", horizon}};
    finalize(*im);
    return Kernel(std::move(im));
}

Kernel Kernel::power_law(double alpha, std::size_t horizon) {
    if (!(alpha > 0.0)) throw std::domain_error("power_law: alpha must be positive");
    auto im = std::make_shared<KernelImpl>();
    im->family = KernelFamily::PowerLaw;
    im->alpha = alpha;
    const double mass = hurwitz_zeta(alpha, 2.0) - hurwitz_zeta(alpha + 1.0, 2.0);
    const double C = 1.0 / mass;
    im->val.resize(horizon - 1);
    for (long long t = 2; t <= static_cast<long long>(horizon); ++t)
        im->val[static_cast<std::size_t>(t - 2)] = C * std::pow(static_cast<double>(t), -(1.0 + alpha));
    im->tail = TailModel{C, 0.0, 0.0, 2};
    im->tot[0] = C * hurwitz_zeta(alpha + 1.0, 2.0);
    im->tot[1] = C * hurwitz_zeta(alpha, 2.0);
    im->tot2_finite = alpha > 2.0;
    im->tot[2] = im->tot2_finite ? C * hurwitz_zeta(alpha - 1.0, 2.0) : kInf;
    im->params = json{{"family", "power_law"}, {"alpha", alpha}, {"horizon", horizon}};
    finalize(*im);
    return Kernel(std::move(im));
}

Kernel Kernel::biophysics_scan(double c, double E_l, double h_scan, std::size_t horizon) {
    if (!(c > 2.0)) throw std::domain_error("biophysics: loop exponent c must exceed 2");
    auto im = std::make_shared<KernelImpl>();
    im->family = KernelFamily::Biophysics;
    im->alpha = c - 1.0;
    const double loop_w = std::exp(-h_scan * E_l);
    const double z3m = hurwitz_zeta(c - 1.0, 3.0) - hurwitz_zeta(c, 3.0);  // sum_{t>=3}(t-1)t^{-c}
    const double W = std::pow(2.0, -c) + loop_w * z3m;
    im->val.resize(horizon - 1);
    im->val[0] = std::pow(2.0, -c) / W;
    for (long long t = 3; t <= static_cast<long long>(horizon); ++t)
        im->val[static_cast<std::size_t>(t - 2)] = loop_w * std::pow(static_cast<double>(t), -c) / W;
    im->tail = TailModel{loop_w / W, 0.0, 0.0, 3};
    im->tot[0] = (std::pow(2.0, -c) + loop_w * hurwitz_zeta(c, 3.0)) / W;
    im->tot[1] = (std::pow(2.0, 1.0 - c) + loop_w * hurwitz_zeta(c - 1.0, 3.0)) / W;
    im->tot2_finite = c > 3.0;
    im->tot[2] =
        im->tot2_finite ? (std::pow(2.0, 2.0 - c) + loop_w * hurwitz_zeta(c - 2.0, 3.0)) / W : kInf;
    im->params = json{{"family", "biophysics"},
                      {"c", c},
                      {"E_l", E_l},
                      {"h_scan", h_scan},
                      {"horizon", horizon}};
    finalize(*im);
    return Kernel(std::move(im));
}

std::pair<Kernel, double> Kernel::biophysics_matching(double c, double E_b, double E_l, double beta,
                                                      std::size_t horizon) {
    if (!(c > 2.0)) throw std::domain_error("biophysics: loop exponent c must exceed 2");
    if (!(E_b > 0.0) || !(E_l > 0.0) || beta < 0.0)
        throw std::domain_error("biophysics: need E_b>0, E_l>0, beta>=0");
    auto im = std::make_shared<KernelImpl>();
    im->family = KernelFamily::Biophysics;
    im->alpha = c - 1.0;
    const double wb = std::exp(beta * E_b);
    const double wl = std::exp(beta * (E_b - E_l));
    // sum_{t>=3} (t-1) (t-2)^{-c} = zeta(c-1) + zeta(c)
    const double U = wb + wl * (hurwitz_zeta(c - 1.0, 1.0) + hurwitz_zeta(c, 1.0));
    im->val.resize(horizon - 1);
    im->val[0] = wb / U;
    for (long long t = 3; t <= static_cast<long long>(horizon); ++t)
        im->val[static_cast<std::size_t>(t - 2)] = wl * std::pow(static_cast<double>(t) - 2.0, -c) / U;
    im->tail = TailModel{wl / U, 2.0 * c, 2.0 * c * (c + 1.0), 512};
    im->tot[0] = (wb + wl * hurwitz_zeta(c, 1.0)) / U;
    im->tot[1] = (2.0 * wb + wl * (hurwitz_zeta(c - 1.0, 1.0) + 2.0 * hurwitz_zeta(c, 1.0))) / U;
    im->tot2_finite = c > 3.0;
    im->tot[2] = im->tot2_finite
                     ? (4.0 * wb + wl * (hurwitz_zeta(c - 2.0, 1.0) + 4.0 * hurwitz_zeta(c - 1.0, 1.0) +
                                         4.0 * hurwitz_zeta(c, 1.0))) /
                           U
                     : kInf;
    im->params = json{{"family", "biophysics_matching"}, {"c", c},      {"E_b", E_b},
                      {"E_l", E_l},                      {"beta", beta}, {"horizon", horizon}};
    finalize(*im);
    return {Kernel(std::move(im)), std::log(U)};
}

Kernel Kernel::tabulated(std::vector<double> values, double alpha, double tail_constant,
                         std::size_t horizon) {
    if (values.empty()) throw std::domain_error("tabulated: empty table");
    if (!(alpha > 0.0) || !(tail_constant > 0.0))
        throw std::domain_error("tabulated: need alpha>0 and a positive tail constant");
    const long long table_end = static_cast<long long>(values.size()) + 1;  // last tabulated t
    if (static_cast<long long>(horizon) < table_end + 2) horizon = static_cast<std::size_t>(table_end + 2);
    auto im = std::make_shared<KernelImpl>();
    im->family = KernelFamily::Tabulated;
    im->alpha = alpha;
    // (t-1)-mass of table plus exact power tail, then rescale to 1
    double tm1 = 0.0;
    for (long long t = 2; t <= table_end; ++t) tm1 += (t - 1.0) * values[static_cast<std::size_t>(t - 2)];
    tm1 += tail_constant * (hurwitz_zeta(alpha, table_end + 1.0) - hurwitz_zeta(alpha + 1.0, table_end + 1.0));
    const double scale = 1.0 / tm1;
    im->val.resize(horizon - 1);
    for (long long t = 2; t <= static_cast<long long>(horizon); ++t) {
        double v = t <= table_end ? values[static_cast<std::size_t>(t - 2)]
                                  : tail_constant * std::pow(static_cast<double>(t), -(1.0 + alpha));
        im->val[static_cast<std::size_t>(t - 2)] = scale * v;
    }
    im->tail = TailModel{scale * tail_constant, 0.0, 0.0, table_end + 1};
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (long long t = 2; t <= table_end; ++t) {
        const double v = scale * values[static_cast<std::size_t>(t - 2)];
        m0 += v;
        m1 += static_cast<double>(t) * v;
        m2 += static_cast<double>(t) * static_cast<double>(t) * v;
    }
    const double a = table_end + 1.0;
    im->tot[0] = m0 + scale * tail_constant * hurwitz_zeta(alpha + 1.0, a);
    im->tot[1] = m1 + scale * tail_constant * hurwitz_zeta(alpha, a);
    im->tot2_finite = alpha > 2.0;
    im->tot[2] = im->tot2_finite ? m2 + scale * tail_constant * hurwitz_zeta(alpha - 1.0, a) : kInf;
    im->params = json{{"family", "tabulated"},
                      {"alpha", alpha},
                      {"tail_constant", tail_constant},
                      {"values", values},
                      {"horizon", horizon}};
    finalize(*im);
    return Kernel(std::move(im));
}

KernelFamily Kernel::family() const { return impl_->family; }
double Kernel::alpha() const { return impl_->alpha; }
double Kernel::value(long long t) const { return impl_->value_at(t); }
double Kernel::log_value(long long t) const { return impl_->log_value_at(t); }
const TailModel& Kernel::tail() const { return impl_->tail; }
long long Kernel::stored_horizon() const { return impl_->horizon(); }
double Kernel::total_moment(int p) const {
    if (p < 0 || p > 2) throw std::domain_error("total_moment: p in {0,1,2}");
    return impl_->tot[p];
}
bool Kernel::second_moment_finite() const { return impl_->tot2_finite; }
double Kernel::epsilon_tail() const { return impl_->eps_tail; }

double Kernel::tail_moment(int j, long long t) const {
    const auto& im = *impl_;
    if (t < 2) t = 2;
    if (j == 2 && !im.tot2_finite) return kInf;
    if (t <= im.horizon()) {
        const std::size_t i = static_cast<std::size_t>(t - 2);
        return j == 0 ? im.tbar0[i] : (j == 1 ? im.tbar1[i] : im.tbar2[i]);
    }
    return tail_seed(im.tail, im.alpha, j, t);
}

nlohmann::json Kernel::to_json() const {
    json j = impl_->params;
    j["epsilon_tail"] = impl_->eps_tail;
    return j;
}

Kernel Kernel::from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    const std::size_t horizon = j.value("horizon", kDefaultHorizon);
    if (fam == "gamma_ratio") return gamma_ratio(j.at("alpha").get<double>(), horizon);
    if (fam == "modified_gamma_ratio") {
        std::vector<std::pair<long long, double>> ov;
        for (auto& e : j.at("overrides")) ov.emplace_back(e.at(0).get<long long>(), e.at(1).get<double>());
        return gamma_ratio_modified(j.at("alpha").get<double>(), std::move(ov), horizon);
    }
    if (fam == "power_law") return power_law(j.at("alpha").get<double>(), horizon);
    if (fam == "biophysics")
        return biophysics_scan(j.at("c").get<double>(), j.at("E_l").get<double>(),
                               j.at("h_scan").get<double>(), horizon);
    if (fam == "biophysics_matching")
        return biophysics_matching(j.at("c").get<double>(), j.at("E_b").get<double>(),
                                   j.at("E_l").get<double>(), j.at("beta").get<double>(), horizon)
            .first;
    if (fam == "tabulated")
        return tabulated(j.at("values").get<std::vector<double>>(), j.at("alpha").get<double>(),
                         j.at("tail_constant").get<double>(), horizon);
    throw std::runtime_error("kernel spec: unknown family '" + fam + "'");
}

std::uint64_t Kernel::hash() const {
    const std::string s = impl_->params.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

FreeEndKernel FreeEndKernel::power_law(double alpha_bar) {
    return FreeEndKernel(Form::PowerLaw, alpha_bar);
}
FreeEndKernel FreeEndKernel::shifted_power_law(double cbar) {
    return FreeEndKernel(Form::ShiftedPowerLaw, cbar);
}

double FreeEndKernel::value(long long n) const {
    if (n < 0) throw std::domain_error("FreeEndKernel: n >= 0");
    if (n == 0) return 1.0;
    return form_ == Form::PowerLaw ? std::pow(static_cast<double>(n), -exponent_)
                                   : std::pow(static_cast<double>(n) + 1.0, -exponent_);
}

double FreeEndKernel::log_value(long long n) const {
    if (n < 0) throw std::domain_error("FreeEndKernel: n >= 0");
    if (n == 0) return 0.0;
    return form_ == Form::PowerLaw ? -exponent_ * std::log(static_cast<double>(n))
                                   : -exponent_ * std::log(static_cast<double>(n) + 1.0);
}

double FreeEndKernel::sum() const {
    if (exponent_ <= 1.0) return kInf;
    return form_ == Form::PowerLaw ? 1.0 + hurwitz_zeta(exponent_, 1.0)
                                   : hurwitz_zeta(exponent_, 1.0);
}

nlohmann::json FreeEndKernel::to_json() const {
    return json{{"form", form_ == Form::PowerLaw ? "power_law" : "shifted_power_law"},
                {"exponent", exponent_}};
}

FreeEndKernel FreeEndKernel::from_json(const nlohmann::json& j) {
    const std::string f = j.at("form").get<std::string>();
    const double e = j.at("exponent").get<double>();
    if (f == "power_law") return power_law(e);
    if (f == "shifted_power_law") return shifted_power_law(e);
    throw std::runtime_error("free-end spec: unknown form '" + f + "'");
}

DelocRegime deloc_regime(const FreeEndKernel& kf, const Kernel& k, double tol) {
    const double gap = kf.alpha_bar() - 0.5 * (1.0 + k.alpha());
    if (std::abs(gap) <= tol) return DelocRegime::Boundary;
    return gap < 0.0 ? DelocRegime::EndsFree : DelocRegime::EndsPinned;
}

Kernel make_k2(double alpha, double kappa, std::size_t horizon) {
    const double k1_2 = alpha * (alpha - 1.0) / 2.0;
    return Kernel::gamma_ratio_modified(alpha, {{2, k1_2}, {3, kappa}}, horizon);
}

Kernel make_k3(double alpha, double rho, std::size_t horizon) {
    return Kernel::gamma_ratio_modified(alpha, {{2, rho}}, horizon);
}

}  // namespace gps
