// gpsm: command-line front end for the bivariate-renewal pinning model.
// Declarative JSON configs in, CSV curves / JSON reports out. All outputs are
// pure functions of (config, seed) and byte-identical across runs.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gps/exact_dp.hpp"
#include "gps/kernel.hpp"
#include "gps/ldp.hpp"
#include "gps/parallel.hpp"
#include "gps/phase.hpp"
#include "gps/sampler.hpp"
#include "gps/special.hpp"
#include "gps/tilt.hpp"
#include "gps/validation.hpp"

using nlohmann::json;
using namespace gps;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

template <typename T>
T require(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError("config: bad field '" + key + "': " + e.what());
    }
}

Kernel kernel_from_config(const json& cfg) {
    if (!cfg.contains("kernel")) throw ConfigError("config: missing 'kernel' spec");
    try {
        return Kernel::from_json(cfg.at("kernel"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: kernel spec: ") + e.what());
    }
}

std::optional<FreeEndKernel> free_end_from_config(const json& cfg) {
    if (!cfg.contains("free_end")) return std::nullopt;
    try {
        return FreeEndKernel::from_json(cfg.at("free_end"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: free_end spec: ") + e.what());
    }
}

ModelFamily family_from_config(const json& cfg) {
    if (cfg.contains("biophysics")) {
        const json& b = cfg.at("biophysics");
        return biophysics_family(require<double>(b, "c"), require<double>(b, "E_b"),
                                 require<double>(b, "E_l"));
    }
    return fixed_family(kernel_from_config(cfg));
}

struct CsvWriter {
    std::ostringstream out;
    void comment(const std::string& s) { out << "# " << s << "\n"; }
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << "\n";
    }
    void field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) out << ",";
            field(vals[i]);
        }
        out << "\n";
    }
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

std::string hash_comment(const json& cfg, std::uint64_t kernel_hash) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, kernel_hash);
    (void)cfg;
    return std::string("gpsm ") + kVersion + " kernel=" + buf;
}

const char* kind_name(TransitionKind k) {
    switch (k) {
        case TransitionKind::Denaturation: return "denaturation";
        case TransitionKind::CramerExit: return "cramer_exit";
        case TransitionKind::CramerEntry: return "cramer_entry";
        case TransitionKind::Tangential: return "tangential";
    }
    return "?";
}

const char* order_name(TransitionOrder o) {
    switch (o) {
        case TransitionOrder::Second: return "second";
        case TransitionOrder::ThirdOrMore: return "third_or_more";
        case TransitionOrder::NoTransition: return "no_transition";
        case TransitionOrder::Undetermined: return "undetermined";
    }
    return "?";
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Cramer: return "cramer";
        case Regime::NonCramer: return "non_cramer";
        case Regime::Boundary: return "boundary";
    }
    return "?";
}

// ---- subcommands -----------------------------------------------------------

int cmd_free_energy(const json& cfg, const std::string& out_path, int workers) {
    ModelFamily fam = family_from_config(cfg);
    const double gamma = cfg.value("gamma", 1.0);
    const json& grid = cfg.contains("h_grid") ? cfg.at("h_grid") : json::object();
    const double lo = grid.value("lo", 0.05), hi = grid.value("hi", 5.0);
    const int pts = grid.value("points", 64);
    const bool logsp = grid.value("log", true);
    if (!(lo > 0.0) || !(hi > lo) || pts < 1) throw ConfigError("config: bad h_grid");

    struct Row {
        double h, g, l1, gc, D, F, c, chat, dfdh, dfdg;
        Regime regime;
        bool ok;
        std::string err;
    };
    std::vector<Row> rows(static_cast<std::size_t>(pts));
    parallel_for(
        pts,
        [&](long long i) {
            double u = pts == 1 ? 0.0 : static_cast<double>(i) / (pts - 1);
            double h = logsp ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
            Row& r = rows[static_cast<std::size_t>(i)];
            r.h = h;
            try {
                TiltState st = family_tilt(fam, h);
                RateResult res = rate_and_free_energy(fam.at(h).kernel, st, gamma);
                FreeEnergyDerivative der = free_energy_derivative(fam.at(h).kernel, st, res);
                r.g = st.g;
                r.l1 = st.lambda1_bar.value_or(0.0);
                r.gc = st.gamma_c.value_or(0.0);
                r.D = res.D;
                r.F = res.free_energy;
                r.c = res.c_of_h;
                r.chat = res.c_hat.value_or(res.free_energy);
                r.dfdh = der.dF_dh;
                r.dfdg = der.dF_dgamma;
                r.regime = res.regime;
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.err = e.what();
            }
        },
        workers);

    CsvWriter csv;
    std::uint64_t khash = fam.fixed ? fam.fixed->hash() : fam.at(lo).kernel.hash();
    csv.comment(hash_comment(cfg, khash) + " gamma=" + std::to_string(gamma));
    csv.header({"h", "g", "lambda1_bar", "gamma_c", "D", "F", "regime", "c_of_h", "c_hat",
                "c_minus_F", "dF_dh", "dF_dgamma"});
    for (auto& r : rows) {
        if (!r.ok) {
            csv.out << "# h=";
            csv.field(r.h);
            csv.out << " failed: " << r.err << "\n";
            continue;
        }
        csv.field(r.h);
        csv.out << ",";
        csv.field(r.g);
        csv.out << ",";
        csv.field(r.l1);
        csv.out << ",";
        csv.field(r.gc);
        csv.out << ",";
        csv.field(r.D);
        csv.out << ",";
        csv.field(r.F);
        csv.out << ",";
        csv.out << regime_name(r.regime) << ",";
        csv.field(r.c);
        csv.out << ",";
        csv.field(r.chat);
        csv.out << ",";
        csv.field(r.c - r.F);
        csv.out << ",";
        csv.field(r.dfdh);
        csv.out << ",";
        csv.field(r.dfdg);
        csv.out << "\n";
    }
    write_output(out_path, csv.out.str());
    return 0;
}

int cmd_phase_scan(const json& cfg, const std::string& out_path, int workers) {
    ModelFamily fam = family_from_config(cfg);
    const double gamma = require<double>(cfg, "gamma");
    ScanParams sp;
    if (cfg.contains("scan")) {
        const json& s = cfg.at("scan");
        sp.h_lo = s.value("h_lo", sp.h_lo);
        sp.h_hi = s.value("h_hi", sp.h_hi);
        sp.grid = s.value("grid", sp.grid);
        sp.tol_h = s.value("tol_h", sp.tol_h);
        sp.log_spaced = s.value("log", sp.log_spaced);
        sp.tangency_tol = s.value("tangency_tol", sp.tangency_tol);
    }
    sp.workers = workers;
    auto records = scan_transitions(fam, gamma, sp);
    for (auto& r : records) r = classify_order(fam, r);

    // optional small-h critical-exponent report (fixed kernels only)
    if (cfg.contains("exponents")) {
        const json& e = cfg.at("exponents");
        if (!fam.fixed) throw ConfigError("config: exponent reports need a fixed kernel");
        json rows = json::array();
        auto grid = e.value("h_grid", std::vector<double>{1e-2, 1e-3, 1e-4});
        for (double gm : e.value("gammas", std::vector<double>{gamma})) {
            CriticalExponentReport rep = small_h_exponent(*fam.fixed, gm, grid);
            rows.push_back({{"alpha", rep.alpha},
                            {"gamma", rep.gamma},
                            {"fitted_exponent", rep.fitted_exponent},
                            {"fitted_c_alpha_gamma", rep.fitted_c_alpha_gamma},
                            {"moment_constant", rep.moment_constant},
                            {"linear_ratio", rep.linear_ratio},
                            {"second_moment_finite", rep.second_moment_finite},
                            {"ill_conditioned", rep.ill_conditioned}});
        }
        write_output(require<std::string>(e, "output"), json{{"rows", rows}}.dump(2) + "\n");
    }

    CsvWriter csv;
    std::uint64_t khash = fam.fixed ? fam.fixed->hash() : fam.at(sp.h_lo).kernel.hash();
    csv.comment(hash_comment(cfg, khash) + " gamma=" + std::to_string(gamma));
    csv.header({"h_star", "kind", "bracket_lo", "bracket_hi", "gamma_c_slope", "order", "jump"});
    for (auto& r : records) {
        csv.field(r.h_star);
        csv.out << "," << kind_name(r.kind) << ",";
        csv.field(r.bracket_lo);
        csv.out << ",";
        csv.field(r.bracket_hi);
        csv.out << ",";
        csv.field(r.gamma_c_slope);
        csv.out << "," << order_name(r.order) << ",";
        csv.field(r.jump);
        csv.out << "\n";
    }
    write_output(out_path, csv.out.str());
    return 0;
}

int cmd_exact(const json& cfg, const std::string& out_path) {
    const json& ex = cfg.contains("exact") ? cfg.at("exact") : cfg;
    const long long N = require<long long>(ex, "N");
    const long long M = require<long long>(ex, "M");
    const double h = ex.value("h", 0.0);
    Kernel k = kernel_from_config(cfg);
    PartitionTable tab = build_constrained(k, N, M, h);
    if (ex.contains("dump")) save_table(tab, ex.at("dump").get<std::string>());
    json out{{"tool", std::string("gpsm ") + kVersion},
             {"N", N},
             {"M", M},
             {"h", h},
             {"log_zc", tab.corner()}};
    if (auto kf = free_end_from_config(cfg)) {
        FreeResult fr = build_free(*kf, tab);
        out["log_zf"] = fr.log_zf;
    }
    if (ex.value("oracle", false)) {
        if (N > 10 || M > 10) throw ConfigError("config: enumeration oracle limited to N, M <= 10");
        // independent composition enumeration in long double
        std::vector<std::vector<long double>> memo(
            static_cast<std::size_t>(N + 1), std::vector<long double>(static_cast<std::size_t>(M + 1), -1.0L));
        struct Rec {
            const Kernel& k;
            double h;
            std::vector<std::vector<long double>>& memo;
            long double operator()(long long n, long long m) {
                if (n == 0 && m == 0) return 1.0L;
                if (n == 0 || m == 0) return 0.0L;
                long double& v = memo[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
                if (v >= 0.0L) return v;
                long double s = 0.0L;
                for (long long i = 1; i <= n; ++i)
                    for (long long j = 1; j <= m; ++j)
                        s += expl(static_cast<long double>(h)) *
                             static_cast<long double>(k.value(i + j)) * (*this)(n - i, m - j);
                v = s;
                return s;
            }
        } rec{k, h, memo};
        const double oracle_log = static_cast<double>(logl(rec(N, M)));
        const double rel = std::abs(tab.corner() - oracle_log) / std::max(1.0, std::abs(oracle_log));
        out["oracle_log_zc"] = oracle_log;
        out["oracle_rel_err"] = rel;
        out["oracle_pass"] = rel <= 1e-12;
    }
    write_output(out_path, out.dump(2) + "\n");
    if (out.contains("oracle_pass") && !out["oracle_pass"].get<bool>()) return 1;
    return 0;
}

int cmd_sample(const json& cfg, const std::string& out_path) {
    const json& sc = cfg.contains("sample") ? cfg.at("sample") : cfg;
    const long long N = require<long long>(sc, "N");
    const long long M = sc.contains("M") ? sc.at("M").get<long long>()
                                          : std::llround(sc.value("gamma", 1.0) * static_cast<double>(N));
    const double h = require<double>(sc, "h");
    const long long count = sc.value("count", 1000LL);
    const std::uint64_t seed = sc.value("seed", 1ULL);
    const std::string mode = sc.value("mode", std::string("constrained"));
    Kernel k = kernel_from_config(cfg);
    // stats accumulated over paths and emitted as JSON rows when requested
    double sum_contacts = 0.0;
    PairHist interarrivals;
    auto tally = [&](const RenewalPath& p) {
        sum_contacts += static_cast<double>(p.contacts());
        long long pn = 0, pm = 0;
        for (auto& [n, m] : p.points) {
            interarrivals.add(n - pn, m - pm);
            pn = n;
            pm = m;
        }
    };
    auto load_or_build = [&]() {
        if (sc.contains("table")) {
            PartitionTable tab = load_table(sc.at("table").get<std::string>());
            if (tab.kernel_hash != k.hash())
                throw ConfigError("sample: table dump was built from a different kernel");
            if (tab.N != N || tab.M != M || tab.h != h)
                throw ConfigError("sample: table dump does not match (N, M, h)");
            return tab;
        }
        return build_constrained(k, N, M, h);
    };

    CsvWriter csv;
    csv.comment(hash_comment(cfg, k.hash()) + " seed=" + std::to_string(seed) + " mode=" + mode);
    if (mode == "constrained") {
        PartitionTable tab = load_or_build();
        auto paths = sample_constrained(k, tab, seed, count);
        csv.header({"path", "point", "n", "m"});
        for (long long p = 0; p < count; ++p) {
            const auto& pts = paths[static_cast<std::size_t>(p)].points;
            tally(paths[static_cast<std::size_t>(p)]);
            for (std::size_t q = 0; q < pts.size(); ++q)
                csv.out << p << "," << q << "," << pts[q].first << "," << pts[q].second << "\n";
        }
    } else if (mode == "free") {
        auto kf = free_end_from_config(cfg);
        if (!kf) throw ConfigError("config: free sampling needs a 'free_end' spec");
        PartitionTable tab = load_or_build();
        FreeResult fr = build_free(*kf, tab);
        auto samples = sample_free(k, *kf, tab, fr, seed, count, sc.value("bridge", true));
        csv.header({"path", "point", "n", "m", "f1", "f2", "l1", "l2"});
        for (long long p = 0; p < count; ++p) {
            const auto& s = samples[static_cast<std::size_t>(p)];
            tally(s.bridge);
            if (s.bridge.points.empty())
                csv.out << p << ",-1,0,0," << s.f1 << "," << s.f2 << "," << s.l1 << "," << s.l2
                        << "\n";
            for (std::size_t q = 0; q < s.bridge.points.size(); ++q)
                csv.out << p << "," << q << "," << s.bridge.points[q].first << ","
                        << s.bridge.points[q].second << "," << s.f1 << "," << s.f2 << "," << s.l1
                        << "," << s.l2 << "\n";
        }
    } else if (mode == "tilted") {
        TiltState st = solve_tilt(k, h);
        csv.header({"path", "point", "n", "m"});
        for (long long p = 0; p < count; ++p) {
            auto fp = tilted_forward_simulate(k, st, sc.value("t_stop", 2 * (N + M)), seed,
                                              static_cast<std::uint64_t>(p));
            tally(fp.path);
            for (std::size_t q = 0; q < fp.path.points.size(); ++q)
                csv.out << p << "," << q << "," << fp.path.points[q].first << ","
                        << fp.path.points[q].second << "\n";
        }
    } else {
        throw ConfigError("config: sample mode must be constrained|free|tilted");
    }
    write_output(out_path, csv.out.str());
    if (sc.contains("stats_output")) {
        json rows = json::array();
        for (auto& [ij, cnt] : interarrivals.counts)
            rows.push_back({{"i", ij.first}, {"j", ij.second}, {"count", cnt}});
        json stats{{"tool", std::string("gpsm ") + kVersion},
                   {"mode", mode},
                   {"paths", count},
                   {"mean_contacts", sum_contacts / static_cast<double>(count)},
                   {"mean_contact_fraction",
                    sum_contacts / static_cast<double>(count) / static_cast<double>(N)},
                   {"interarrival_rows", rows}};
        write_output(sc.at("stats_output").get<std::string>(), stats.dump(2) + "\n");
    }
    return 0;
}

int cmd_validate(const json& cfg, const std::string& out_path) {
    Kernel k = kernel_from_config(cfg);
    const json& v = cfg.contains("validate") ? cfg.at("validate") : json::object();
    std::vector<long long> sizes = v.value("sizes", std::vector<long long>{100, 200, 400});
    const double gamma = v.value("gamma", 1.5);
    json reports = json::array();
    bool all_pass = true;
    auto run = [&](CheckReport rep) {
        reports.push_back(rep.to_json());
        all_pass = all_pass && rep.pass;
    };
    std::vector<std::string> checks =
        v.value("checks", std::vector<std::string>{"terminating_sharp", "free_sharp_ends_free",
                                                   "free_sharp_ends_pinned", "free_sharp_cramer",
                                                   "renewal_llt", "convolution_bound",
                                                   "free_energy_inequality"});
    for (const auto& c : checks) {
        if (c == "terminating_sharp") {
            run(check_terminating_sharp(k, v.value("h_neg", -0.5), gamma, sizes));
        } else if (c == "free_sharp_ends_free") {
            run(check_free_sharp(k, FreeEndKernel::power_law(v.value("alpha_bar_free", 0.5)),
                                 v.value("h_neg", -0.5), gamma, sizes));
        } else if (c == "free_sharp_ends_pinned") {
            run(check_free_sharp(k, FreeEndKernel::power_law(v.value("alpha_bar_pinned", 2.0)),
                                 v.value("h_neg", -0.5), gamma, sizes));
        } else if (c == "free_sharp_cramer") {
            run(check_free_sharp(k, FreeEndKernel::power_law(v.value("alpha_bar_pinned", 2.0)),
                                 v.value("h_pos", 1.0), gamma, sizes));
        } else if (c == "renewal_llt") {
            run(check_renewal_llt(k, v.value("h_pos", 1.0), gamma, sizes));
            run(check_renewal_llt(k, v.value("h_pos", 1.0), v.value("gamma_noncramer", 3.0), sizes));
        } else if (c == "convolution_bound") {
            run(check_convolution_bound(k, sizes));
        } else if (c == "free_energy_inequality") {
            run(check_free_energy_inequality(k, v.value("h_pos", 1.0), sizes.back(),
                                             std::llround(gamma * static_cast<double>(sizes.back()))));
        } else if (c == "limit_laws") {
            // localized Cramer path laws: free ends and inter-arrivals against
            // the limit process
            const long long n = v.value("law_N", 150LL);
            const double h = v.value("h_pos", 1.0);
            const double tv_threshold = v.value("tv_threshold", 0.05);
            Kernel kk = k;
            FreeEndKernel kf = FreeEndKernel::power_law(v.value("alpha_bar_pinned", 2.0));
            TiltState st = solve_tilt(kk, h);
            RateResult res = rate_and_free_energy(kk, st, gamma);
            PartitionTable tab =
                build_constrained(kk, n, std::llround(gamma * static_cast<double>(n)), h);
            FreeResult fr = build_free(kf, tab);
            LimitLawReport law = limit_law_cramer(kk, kf, st, res, tab, fr, v.value("seed", 7ULL),
                                                  v.value("end_draws", 50000LL),
                                                  v.value("bridge_paths", 10000LL), tv_threshold,
                                                  v.value("cutoff", 48LL));
            CheckReport rep;
            rep.check_id = "limit_law_cramer";
            rep.params = {{"h", h}, {"gamma", gamma}, {"N", n}, {"kernel", k.to_json()}};
            for (const auto& row : law.rows)
                rep.add(row.name, n, row.tv, 0.0, row.threshold, row.pass);
            run(rep);
        } else {
            throw ConfigError("config: unknown check '" + c + "'");
        }
    }
    json out{{"tool", std::string("gpsm ") + kVersion}, {"pass", all_pass}, {"reports", reports}};
    write_output(out_path, out.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int cmd_match_biophysics(const json& cfg, const std::string& out_path) {
    const json& b = cfg.contains("biophysics") ? cfg.at("biophysics") : cfg;
    const double c = require<double>(b, "c");
    const double Eb = require<double>(b, "E_b");
    const double El = require<double>(b, "E_l");
    const double cbar = b.value("cbar", 0.1);
    const double beta = b.value("beta", 0.25);
    const long long nmax = b.value("N_max", 8LL);
    auto [k, h_offset] = Kernel::biophysics_matching(c, Eb, El, beta);
    FreeEndKernel kf = FreeEndKernel::shifted_power_law(cbar);
    double worst = 0.0;
    json rows = json::array();
    for (long long n = 1; n <= nmax; ++n)
        for (long long m = 1; m <= nmax; ++m) {
            PartitionTable tab = build_constrained(k, n, m, h_offset);
            FreeResult fr = build_free(kf, tab);
            const double renewal = fr.log_zf;
            const double strand = biophysics_partition(c, Eb, El, beta, n + 1, m + 1, cbar);
            const double rel = std::abs(renewal - strand) / std::max(1.0, std::abs(strand));
            worst = std::max(worst, rel);
            rows.push_back({{"N", n}, {"M", m}, {"log_zf", renewal}, {"log_z_strand", strand},
                            {"rel_err", rel}});
        }
    const bool pass = worst <= 1e-10;
    json out{{"tool", std::string("gpsm ") + kVersion},
             {"h_offset", h_offset},
             {"max_rel_err", worst},
             {"pass", pass},
             {"rows", rows}};
    write_output(out_path, out.dump(2) + "\n");
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bivariate-renewal pinning model toolkit"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    int workers = 0;
    app.add_option("--workers", workers, "worker threads (default: GPSM_WORKERS or all cores)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("-o,--output", out_path, "output path (default: stdout)");
    };
    CLI::App* fe = app.add_subcommand("free-energy", "tilt/rate/free-energy curves over an h grid");
    CLI::App* ps = app.add_subcommand("phase-scan", "locate and classify transitions in h");
    CLI::App* ex = app.add_subcommand("exact", "finite-size partition functions (with oracle)");
    CLI::App* sa = app.add_subcommand("sample", "exact path sampling");
    CLI::App* va = app.add_subcommand("validate", "sharp-asymptotics validation suite");
    CLI::App* mb = app.add_subcommand("match-biophysics", "two-strand recursion vs renewal model");
    for (CLI::App* sub : {fe, ps, ex, sa, va, mb}) {
        add_common(sub);
        sub->fallthrough();  // accept --workers/--gamma/--seed after the subcommand
    }

    // scalar overrides
    double gamma_override = std::nan("");
    std::uint64_t seed_override = ~0ULL;
    app.add_option("--gamma", gamma_override, "override config gamma");
    app.add_option("--seed", seed_override, "override config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        json cfg = load_config(config_path);
        if (!std::isnan(gamma_override)) cfg["gamma"] = gamma_override;
        if (seed_override != ~0ULL) {
            if (!cfg.contains("sample")) cfg["sample"] = json::object();
            cfg["sample"]["seed"] = seed_override;
        }
        if (fe->parsed()) return cmd_free_energy(cfg, out_path, workers);
        if (ps->parsed()) return cmd_phase_scan(cfg, out_path, workers);
        if (ex->parsed()) return cmd_exact(cfg, out_path);
        if (sa->parsed()) return cmd_sample(cfg, out_path);
        if (va->parsed()) return cmd_validate(cfg, out_path);
        if (mb->parsed()) return cmd_match_biophysics(cfg, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
