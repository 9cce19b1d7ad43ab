#pragma once
// Subcommand drivers shared by the command-line front end and the test suite:
// sample / ward / saddle / regions / walk / errw.  Each driver throws
// ConfigError (exit 2) or NumericalError (exit 3); dispatch maps exceptions to
// exit codes and ward-style identity failures to a nonzero exit.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "h22/artifacts.hpp"
#include "h22/config.hpp"
#include "h22/observables.hpp"
#include "h22/regions.hpp"
#include "h22/saddle.hpp"
#include "h22/sampler.hpp"
#include "h22/walkers.hpp"

namespace h22 {

// ------------------------------------------------------------------ logging

// H22_LOG: quiet|0, info|1 (default), debug|2
inline int log_verbosity() {
    const char* v = std::getenv("H22_LOG");
    if (!v) return 1;
    std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
}

inline void log_line(int level, const std::string& msg) {
    if (log_verbosity() >= level) std::fprintf(stderr, "[h22] %s\n", msg.c_str());
}
inline void log_info(const std::string& msg) { log_line(1, msg); }
inline void log_debug(const std::string& msg) { log_line(2, msg); }

// ------------------------------------------------------------------- hooks

namespace detail {

inline void check_site(const Torus& T, int x, const std::string& where) {
    if (x < 0 || x >= T.num_sites)
        throw ConfigError(where + ": site " + std::to_string(x) + " out of range [0, " +
                          std::to_string(T.num_sites) + ")");
}

inline int first_site(const Torus& T, const ObservableSpec& o) {
    int x = o.pairs.empty() ? 0 : o.pairs.front().first;
    check_site(T, x, o.name);
    return x;
}

inline std::vector<std::pair<int, int>> checked_pairs(const Torus& T, const ObservableSpec& o) {
    if (o.pairs.empty())
        throw ConfigError("observable '" + o.name + "' requires a nonempty pairs list");
    for (const auto& p : o.pairs) {
        check_site(T, p.first, o.name);
        check_site(T, p.second, o.name);
        if (p.first == p.second)
            throw ConfigError("observable '" + o.name + "': pair sites must differ");
    }
    return o.pairs;
}

} // namespace detail

// translate one config entry into sampler hooks
inline std::vector<Hook> hooks_from_spec(const Torus& T, const ObservableSpec& o) {
    if (o.name == "exp_t") return {hook_exp_t(detail::first_site(T, o))};
    if (o.name == "sum_rule") return {hook_sum_rule(detail::first_site(T, o))};
    if (o.name == "b_identity") return {hook_B_identity(detail::checked_pairs(T, o), o.m)};
    if (o.name == "nn_bound") return {hook_nn_bound(detail::checked_pairs(T, o), o.gamma)};
    if (o.name == "cosh_pair") {
        auto p = detail::checked_pairs(T, o);
        std::vector<Hook> hs;
        for (const auto& pr : p) hs.push_back(hook_cosh_pair(pr.first, pr.second, o.m));
        return hs;
    }
    if (o.name == "cosh_site") return {hook_cosh_site(detail::first_site(T, o), o.m)};
    if (o.name == "c_entry") {
        auto p = detail::checked_pairs(T, o);
        std::vector<Hook> hs;
        for (const auto& pr : p) hs.push_back(hook_C_entry(pr.first, pr.second));
        return hs;
    }
    if (o.name == "c_row_min") return {hook_C_row_min(detail::first_site(T, o))};
    if (o.name == "walk_survey" || o.name == "errw" || o.name == "saddle_scan" ||
        o.name == "diamond")
        return {}; // consumed by their own subcommands, not sampled
    throw ConfigError("unknown observable '" + o.name + "'");
}

// ------------------------------------------------------------------ sample

inline bool is_ward_name(const std::string& name) {
    return name.rfind("exp_t_", 0) == 0 || name.rfind("sum_rule_", 0) == 0 ||
           name.rfind("wi_", 0) == 0;
}

// Config as recorded in artifacts: the output directory is where results land,
// not a physics input, so it is stripped before hashing — reruns of one config
// into different directories produce identical config.json and manifest hashes.
inline nlohmann::json artifact_config(const RunConfig& cfg) {
    nlohmann::json j = to_json(cfg);
    j.erase("output");
    return j;
}

inline int do_sample(const RunConfig& cfg, int threads = 1) {
    Torus T = lattice_from(cfg);
    CouplingMap c = couplings_from(cfg, T.graph);
    if (!(c.eps_total() > 0.0))
        throw ConfigError("couplings.eps: total killing mass must be > 0 for sampling");
    SamplerConfig scfg = cfg.sampler;
    scfg.seed = cfg.seed;

    std::vector<Hook> hooks;
    for (const auto& o : cfg.observables)
        for (auto& h : hooks_from_spec(T, o)) hooks.push_back(std::move(h));
    if (hooks.empty()) hooks.push_back(hook_exp_t(0)); // minimal run: the Lorentz ward

    log_info("sample: " + std::to_string(T.num_sites) + " sites, " +
             std::to_string(std::max(1, scfg.chains)) + " chain(s), " +
             std::to_string(scfg.warmup_sweeps) + "+" + std::to_string(scfg.measure_sweeps) +
             " sweeps, " + std::to_string(hooks.size()) + " observable(s)");
    ChainResult r = run_chains(T.graph, c, scfg, hooks, default_init_t(T, c, scfg), threads);

    ArtifactWriter w(cfg.out_dir);
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& h : hooks) {
        const Accumulator& a = find_acc(r, h.name);
        CsvTable tab({"index", "value"});
        const auto& s = a.series();
        for (size_t i = 0; i < s.size(); ++i) tab.add_row({cell(long(i)), cell(s[i])});
        w.write("obs_" + h.name + ".csv", tab.text());
        if (is_ward_name(h.name)) {
            WardReport rep = ward_from(r, h.name, 1.0);
            summary.push_back(
                summary_entry(h.name, rep.measured, rep.error, rep.n, 1.0, rep.pass()));
            log_info("  " + h.name + ": " + cell(rep.measured) + " +- " + cell(rep.error) +
                     (rep.pass() ? " [pass]" : " [FAIL]"));
        } else {
            summary.push_back(summary_entry(h.name, a.mean(), a.stderror(), a.count(),
                                            std::numeric_limits<double>::quiet_NaN(),
                                            std::isfinite(a.mean())));
        }
    }
    w.write("summary.json", summary.dump(2) + "\n");
    w.write("config.json", artifact_config(cfg).dump(2) + "\n");
    w.write_manifest(artifact_config(cfg), cfg.seed);
    return 0;
}

// -------------------------------------------------------------------- ward

inline int do_ward(const RunConfig& cfg, int threads = 1) {
    Torus T = lattice_from(cfg);
    CouplingMap c = couplings_from(cfg, T.graph);
    if (!(c.eps_total() > 0.0))
        throw ConfigError("couplings.eps: total killing mass must be > 0 for sampling");
    SamplerConfig scfg = cfg.sampler;
    scfg.seed = cfg.seed;

    std::vector<WardReport> reports;
    if (T.num_sites <= 2) {
        Quadrature q;
        q.logdet_scale = scfg.logdet_scale;  // corruption hook reaches the exact check too
        double Z = brute_force_Z(T.graph, c, q);
        reports.push_back(WardReport{"brute_force_Z", Z, 1.0, 0.0, 1, 1e-6});
    }

    std::vector<Hook> hooks = {hook_exp_t(0), hook_sum_rule(0)};
    std::vector<std::pair<int, int>> nn, far, pair2;
    if (T.side >= 2) nn = {{0, T.shift(0, 0, 1)}};
    if (T.side >= 4) {
        far = {{0, T.shift(0, 0, 2)}};
        pair2 = {{0, T.shift(0, 0, 1)}, {T.shift(0, 0, 2), T.shift(0, 0, 3)}};
    }
    if (!nn.empty()) hooks.push_back(hook_B_identity(nn, 1.0));
    if (!far.empty()) hooks.push_back(hook_B_identity(far, 1.0));
    if (!pair2.empty()) hooks.push_back(hook_B_identity(pair2, 1.0));

    log_info("ward: " + std::to_string(T.num_sites) + " sites, " +
             std::to_string(hooks.size()) + " identities + " +
             std::to_string(reports.size()) + " quadrature check(s)");
    ChainResult r = run_chains(T.graph, c, scfg, hooks, default_init_t(T, c, scfg), threads);

    reports.push_back(ward_exp_t(r, 0));
    reports.push_back(ward_sum_rule(r, 0));
    if (!nn.empty()) reports.push_back(ward_B_identity(r, nn, 1.0));
    if (!far.empty()) reports.push_back(ward_B_identity(r, far, 1.0));
    if (!pair2.empty()) reports.push_back(ward_B_identity(r, pair2, 1.0));

    ArtifactWriter w(cfg.out_dir);
    nlohmann::json summary = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& rep : reports) {
        all_pass = all_pass && rep.pass();
        summary.push_back(
            summary_entry(rep.name, rep.measured, rep.error, rep.n, rep.target, rep.pass()));
        log_info("  " + rep.name + ": " + cell(rep.measured) + " +- " + cell(rep.error) +
                 (rep.pass() ? " [pass]" : " [FAIL]"));
    }
    w.write("ward_summary.json", summary.dump(2) + "\n");
    w.write("config.json", artifact_config(cfg).dump(2) + "\n");
    w.write_manifest(artifact_config(cfg), cfg.seed);
    if (!all_pass) log_info("ward: identity failure");
    return all_pass ? 0 : 3;
}

// ------------------------------------------------------------------ saddle

inline int do_saddle(const RunConfig& cfg) {
    long points = 8;
    for (const auto& o : cfg.observables)
        if (o.name == "saddle_scan" && o.n > 0) points = o.n;
    if (points < 2) throw ConfigError("saddle_scan.n must be >= 2");
    if (cfg.L < 2) throw ConfigError("saddle: lattice.L must be >= 2");
    if (!(cfg.eps > 0.0)) throw ConfigError("couplings.eps must be > 0 for the saddle scan");

    std::vector<double> betas;
    for (long k = 0; k < points; ++k) betas.push_back(cfg.beta * std::pow(2.0, double(k)));
    log_info("saddle: d=" + std::to_string(cfg.d) + " L=" + std::to_string(cfg.L) + ", " +
             std::to_string(points) + " beta points from " + cell(cfg.beta));
    std::vector<ScanRow> rows = asymptotics_scan(cfg.d, cfg.L, betas, {cfg.eps});

    CsvTable tab({"dim", "side", "beta", "eps", "t_star", "mass2", "g0xx", "residual",
                  "beta_lambda_min"});
    std::vector<double> lnb, lnm;
    for (const auto& row : rows) {
        tab.add_row({cell(row.dim), cell(row.side), cell(row.beta), cell(row.eps),
                     cell(row.t_star), cell(row.mass2), cell(row.g0xx), cell(row.residual),
                     cell(row.beta_lambda_min)});
        lnb.push_back(std::log(row.beta));
        lnm.push_back(std::log(row.mass2));
    }
    double slope = fit_slope(lnb, lnm);
    nlohmann::json foot;
    foot["slope_ln_mass2_vs_ln_beta"] = slope;
    foot["points"] = points;
    tab.footer = "# " + foot.dump() + "\n";

    ArtifactWriter w(cfg.out_dir);
    nlohmann::json summary = nlohmann::json::array();
    if (cfg.d <= 2) {
        double window = cfg.d == 1 ? 0.1 : 0.3;
        bool pass = std::isfinite(slope) && std::abs(slope + 1.0) <= window;
        summary.push_back(summary_entry("saddle_slope_d" + std::to_string(cfg.d), slope, 0.0,
                                        long(rows.size()), -1.0, pass));
        log_info("  slope ln(mass2) vs ln(beta): " + cell(slope) +
                 (pass ? " [pass]" : " [outside window]"));
    } else {
        double t_hi = solve_saddle(cfg.d, cfg.L, betas.back(), cfg.eps).t_star;
        double t_lo = solve_saddle(cfg.d, cfg.L, betas.back(), cfg.eps / 100.0).t_star;
        double dt = std::abs(t_hi - t_lo);
        bool pass = dt < 1e-3;
        summary.push_back(summary_entry("saddle_eps_insensitivity", dt, 0.0, 2, 0.0, pass));
        log_info("  |t*(eps) - t*(eps/100)| = " + cell(dt) + (pass ? " [pass]" : " [FAIL]"));
    }
    w.write("saddle_scan.csv", tab.text());
    w.write("saddle_summary.json", summary.dump(2) + "\n");
    w.write("config.json", artifact_config(cfg).dump(2) + "\n");
    w.write_manifest(artifact_config(cfg), cfg.seed);
    return 0;
}

// ----------------------------------------------------------------- regions

inline int do_regions(const RunConfig& cfg) {
    if (cfg.d != 3) throw ConfigError("regions: lattice.d must be 3");
    Torus T = lattice_from(cfg);

    int x = 0, y = T.shift(0, 0, cfg.L / 2);
    double theta = M_PI / 8.0, a = 2.0, alpha = 0.3;
    for (const auto& o : cfg.observables)
        if (o.name == "diamond") {
            if (!o.pairs.empty()) {
                x = o.pairs.front().first;
                y = o.pairs.front().second;
                detail::check_site(T, x, "diamond");
                detail::check_site(T, y, "diamond");
            }
            if (o.gamma > 0.0) theta = o.gamma; // half-angle override
            a = o.a;
            alpha = o.alpha;
        }

    DiamondRegion R = build_diamond(T, x, y, theta);
    double p = poincare_constant(T, R);
    log_info("regions: diamond |x-y|=" + cell(R.separation) + ", " +
             std::to_string(R.sites.size()) + " sites, delta=" + cell(R.delta) +
             ", poincare=" + cell(p));

    SiteVector t0 = SiteVector::Zero(T.num_sites);
    std::vector<double> betas = {cfg.beta, 10.0 * cfg.beta, 100.0 * cfg.beta};
    std::vector<BoundChainReport> reps = greens_bound_beta_scan(T, R, t0, a, alpha, betas, cfg.eps);

    CsvTable tab({"beta", "hypothesis_ok", "G", "GN", "beta_GN", "chain_ok"});
    bool all_pass = true;
    double bg_min = std::numeric_limits<double>::infinity(), bg_max = 0.0;
    for (size_t k = 0; k < reps.size(); ++k) {
        const auto& rep = reps[k];
        tab.add_row({cell(betas[k]), cell(rep.hypothesis_ok), cell(rep.G), cell(rep.GN),
                     cell(rep.beta_times_GN), cell(rep.chain_ok)});
        all_pass = all_pass && rep.pass();
        bg_min = std::min(bg_min, rep.beta_times_GN);
        bg_max = std::max(bg_max, rep.beta_times_GN);
        log_info("  " + rep.message());
    }
    double spread = bg_max > 0.0 ? (bg_max - bg_min) / bg_max : 0.0;
    bool invariant = spread <= 1e-9;

    ArtifactWriter w(cfg.out_dir);
    nlohmann::json summary = nlohmann::json::array();
    summary.push_back(summary_entry("chain_0_le_G_le_GN", all_pass ? 1.0 : 0.0, 0.0,
                                    long(reps.size()), 1.0, all_pass));
    summary.push_back(
        summary_entry("beta_GN_invariance", spread, 0.0, long(reps.size()), 0.0, invariant));
    summary.push_back(summary_entry("poincare_constant", p, 0.0, 1,
                                    std::numeric_limits<double>::quiet_NaN(),
                                    std::isfinite(p) && p > 0.0));
    summary.push_back(summary_entry("delta", R.delta, 0.0, 1,
                                    std::numeric_limits<double>::quiet_NaN(), R.delta > 0.0));
    w.write("regions_check.csv", tab.text());
    w.write("region.json", region_to_json(R));
    w.write("regions_summary.json", summary.dump(2) + "\n");
    w.write("config.json", artifact_config(cfg).dump(2) + "\n");
    w.write_manifest(artifact_config(cfg), cfg.seed);
    return (all_pass && invariant) ? 0 : 3;
}

// -------------------------------------------------------------------- walk

inline int do_walk(const RunConfig& cfg) {
    Torus T = lattice_from(cfg);
    CouplingMap c = couplings_from(cfg, T.graph);
    if (!(c.eps_total() > 0.0))
        throw ConfigError("couplings.eps: total killing mass must be > 0 to sample environments");
    if (!c.uniform_beta())
        throw ConfigError("walk: per-edge beta overrides are not supported");

    long walkers = 1000, max_jumps = 10000;
    double eps_walk = 0.0;
    for (const auto& o : cfg.observables)
        if (o.name == "walk_survey") {
            if (o.n > 0) walkers = o.n;
            if (o.m >= 2.0) max_jumps = long(o.m);
            if (o.gamma > 0.0) eps_walk = o.gamma;
        }

    int envs_count = std::max(1, cfg.sampler.chains);
    log_info("walk: sampling " + std::to_string(envs_count) + " environment(s), then " +
             std::to_string(walkers) + " walkers x " + std::to_string(max_jumps) + " jumps" +
             (eps_walk > 0.0 ? " with killing " + cell(eps_walk) : ""));
    std::vector<SiteVector> envs;
    for (int e = 0; e < envs_count; ++e) {
        SamplerConfig scfg = cfg.sampler;
        scfg.chains = 1;
        scfg.seed = Rng::substream(cfg.seed, uint64_t(e + 1)).next();
        envs.push_back(run_chain(T.graph, c, scfg, {}, default_init_t(T, c, scfg)).final_t);
    }

    double beta = c.beta_edge.empty() ? cfg.beta : c.beta_edge.front();
    WalkSurvey S = env_walk_survey(T, envs, beta, eps_walk, 0, int(walkers), max_jumps,
                                   cfg.seed ^ 0x9e3779b97f4a7c15ull);

    ArtifactWriter w(cfg.out_dir);
    CsvTable tab({"config", "walker", "outcome", "jumps", "disp2"});
    for (const auto& rec : S.records)
        tab.add_row({cell(rec.env), cell(rec.walker), cell(rec.outcome), cell(rec.jumps),
                     cell(rec.disp2)});
    w.write("walkers.csv", tab.text());

    CsvTable msd({"jumps", "msd", "msd_stderr"});
    for (size_t k = 0; k < S.checkpoints.size(); ++k)
        msd.add_row({cell(S.checkpoints[k]), cell(S.msd[k]), cell(S.msd_stderr[k])});
    w.write("msd.csv", msd.text());

    long total = long(S.records.size());
    nlohmann::json summary = nlohmann::json::array();
    summary.push_back(summary_entry("return_probability", S.return_probability,
                                    S.return_stderr, total,
                                    std::numeric_limits<double>::quiet_NaN(),
                                    std::isfinite(S.return_probability)));
    summary.push_back(summary_entry("mean_survival", S.mean_survival, S.survival_stderr,
                                    S.died, std::numeric_limits<double>::quiet_NaN(),
                                    S.died == 0 || std::isfinite(S.mean_survival)));
    summary.push_back(summary_entry("quenched_spread", S.quenched_spread, 0.0,
                                    S.environments, std::numeric_limits<double>::quiet_NaN(),
                                    std::isfinite(S.quenched_spread)));
    log_info("  return probability " + cell(S.return_probability) + " +- " +
             cell(S.return_stderr) + " (returned " + std::to_string(S.returned) + ", died " +
             std::to_string(S.died) + ", exhausted " + std::to_string(S.exhausted) + ")");
    w.write("walk_summary.json", summary.dump(2) + "\n");
    w.write("config.json", artifact_config(cfg).dump(2) + "\n");
    w.write_manifest(artifact_config(cfg), cfg.seed);
    return 0;
}

// -------------------------------------------------------------------- errw

inline int do_errw(const RunConfig& cfg) {
    Torus T = lattice_from(cfg);
    double a = 1.0;
    long steps = 1000;
    for (const auto& o : cfg.observables)
        if (o.name == "errw") {
            a = o.a;
            if (o.n > 0) steps = o.n;
        }
    if (!(a > 0.0)) throw ConfigError("errw.a must be > 0");

    log_info("errw: " + std::to_string(T.num_sites) + " vertices, a=" + cell(a) + ", " +
             std::to_string(steps) + " steps");
    ERRWRun r = errw_run(T.graph, a, 0, steps, cfg.seed);

    ArtifactWriter w(cfg.out_dir);
    CsvTable tab({"edge_i", "edge_j", "traversals", "fraction"});
    long total = 0;
    for (size_t e = 0; e < T.graph.edges.size(); ++e) {
        tab.add_row({cell(T.graph.edges[e].i), cell(T.graph.edges[e].j), cell(r.traversals[e]),
                     cell(r.fraction[e])});
        total += r.traversals[e];
    }
    w.write("errw_freq.csv", tab.text());
    nlohmann::json summary = nlohmann::json::array();
    summary.push_back(summary_entry("errw_total_traversals", double(total), 0.0, steps,
                                    double(steps), total == steps));
    w.write("errw_summary.json", summary.dump(2) + "\n");
    w.write("config.json", artifact_config(cfg).dump(2) + "\n");
    w.write_manifest(artifact_config(cfg), cfg.seed);
    return total == steps ? 0 : 3;
}

// ---------------------------------------------------------------- dispatch

inline int dispatch(const std::string& cmd, const RunConfig& cfg, int threads = 1) {
    try {
        if (cmd == "sample") return do_sample(cfg, threads);
        if (cmd == "ward") return do_ward(cfg, threads);
        if (cmd == "saddle") return do_saddle(cfg);
        if (cmd == "regions") return do_regions(cfg);
        if (cmd == "walk") return do_walk(cfg);
        if (cmd == "errw") return do_errw(cfg);
        throw ConfigError("unknown subcommand '" + cmd + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}

struct CliOverrides {
    std::string out;          // empty: keep config value
    bool has_seed = false;
    uint64_t seed = 0;
    int threads = 1;
};

inline int run_command(const std::string& cmd, const std::string& config_path,
                       const CliOverrides& ov = {}) {
    RunConfig cfg;
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = parse_run_config_text(ss.str());
        if (!ov.out.empty()) cfg.out_dir = ov.out;
        if (ov.has_seed) cfg.seed = ov.seed;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    return dispatch(cmd, cfg, ov.threads);
}

} // namespace h22
