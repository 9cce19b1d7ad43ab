// Acceptance harness. Each numbered criterion prints exactly one [PASS]/[FAIL]
// line (with indented analysis where a verdict needs context); --criteria N,M
// selects a subset, no argument runs all 14. Exit 0 iff every requested
// criterion passed. Chains shared by neighbouring criteria are simulated once.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <h22/driver.hpp>
#include <h22/walkers.hpp>

using namespace h22;

namespace {

double now_s() {
    using clk = std::chrono::steady_clock;
    static const clk::time_point t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes; // indented context lines
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- shared runs

struct SharedChains {
    // criteria 2+3: the two Ward configurations, 1e5 measurement sweeps each
    std::optional<ChainResult> ward_1d, ward_3d;
    double ward_seconds = 0.0;
    // criteria 4+5: d=3 L=4 beta=2 eps=0.2 with identity and bound hooks
    std::optional<ChainResult> susy;
    Torus susy_T;
    std::vector<std::pair<int, int>> nn, far2, two_pairs;

    void ensure_ward() {
        if (ward_1d) return;
        double t0 = now_s();
        {
            Torus T = build_torus(1, 8);
            CouplingMap c = CouplingMap::uniform(T.graph, 0.5, 0.5);
            SamplerConfig cfg;
            cfg.warmup_sweeps = 2000;
            cfg.measure_sweeps = 100000;
            cfg.seed = 101;
            ward_1d = run_chains(T, c, cfg, {hook_exp_t(0), hook_sum_rule(0)});
        }
        {
            Torus T = build_torus(3, 4);
            CouplingMap c = CouplingMap::uniform(T.graph, 1.0, 0.1);
            SamplerConfig cfg;
            cfg.warmup_sweeps = 2000;
            cfg.measure_sweeps = 100000;
            cfg.seed = 202;
            ward_3d = run_chains(T, c, cfg, {hook_exp_t(0), hook_sum_rule(0)});
        }
        ward_seconds = now_s() - t0;
    }

    void ensure_susy() {
        if (susy) return;
        susy_T = build_torus(3, 4);
        const Torus& T = susy_T;
        nn = {{0, T.shift(0, 0, 1)}};
        far2 = {{0, T.shift(T.shift(0, 0, 1), 0, 1)}};
        int w = T.shift(T.shift(0, 0, 2), 1, 2);
        two_pairs = {{0, T.shift(0, 0, 1)}, {w, T.shift(w, 1, 1)}};
        CouplingMap c = CouplingMap::uniform(T.graph, 2.0, 0.2);
        SamplerConfig cfg;
        cfg.warmup_sweeps = 2000;
        cfg.measure_sweeps = 20000;
        cfg.seed = 303;
        std::vector<Hook> hooks = {
            hook_B_identity(nn, 1.0),        hook_B_identity(nn, 2.0),
            hook_B_identity(far2, 1.0),      hook_B_identity(far2, 2.0),
            hook_B_identity(two_pairs, 1.0), hook_nn_bound(nn, 0.25),
            hook_nn_bound(nn, 0.5),          hook_nn_bound(nn, 0.75)};
        susy = run_chains(T, c, cfg, hooks);
    }
};

SharedChains shared;

// ------------------------------------------------------------- criterion 1

Outcome crit1_exact_Z() {
    double t0 = now_s();
    double worst = 0.0;
    int cases = 0;
    auto check = [&](const Graph& g, const CouplingMap& c) {
        worst = std::max(worst, std::abs(brute_force_Z(g, c) - 1.0));
        ++cases;
    };
    Graph g1 = Graph::from_edges(1, {});
    Graph g2 = Graph::from_edges(2, {{0, 1}});
    for (double beta : {0.5, 1.0, 2.0})
        for (double eps : {0.1, 0.5, 1.0}) {
            check(g1, CouplingMap::uniform(g1, beta, eps));
            check(g2, CouplingMap::uniform(g2, beta, eps));
        }
    CouplingMap asym;
    asym.beta_edge = {1.3};
    asym.eps_site = {0.2, 0.9};
    asym.validate(g2);
    check(g2, asym);
    double dt = now_s() - t0;
    Outcome o;
    o.pass = worst <= 1e-6 && dt < 10.0;
    o.detail = fmt("max |Z-1| = %.3g over %d (beta,eps) cases incl. asymmetric, %.1f s",
                   worst, cases, dt);
    return o;
}

// ---------------------------------------------------------- criteria 2 and 3

Outcome crit2_lorentz_ward() {
    shared.ensure_ward();
    WardReport a = ward_exp_t(*shared.ward_1d, 0);
    WardReport b = ward_exp_t(*shared.ward_3d, 0);
    Outcome o;
    o.pass = a.pass() && b.pass() && shared.ward_seconds < 600.0;
    o.detail = fmt("<e^t> = %.4f+-%.4f (d=1 L=8), %.4f+-%.4f (d=3 L=4); chains took %.0f s",
                   a.measured, a.error, b.measured, b.error, shared.ward_seconds);
    return o;
}

Outcome crit3_sum_rule() {
    shared.ensure_ward();
    WardReport a = ward_sum_rule(*shared.ward_1d, 0);
    WardReport b = ward_sum_rule(*shared.ward_3d, 0);
    Outcome o;
    o.pass = a.pass() && b.pass();
    o.detail = fmt("eps*sum_y C_xy = %.4f+-%.4f (d=1 L=8), %.4f+-%.4f (d=3 L=4)",
                   a.measured, a.error, b.measured, b.error);
    return o;
}

// ---------------------------------------------------------- criteria 4 and 5

Outcome crit4_susy_ward() {
    shared.ensure_susy();
    const ChainResult& r = *shared.susy;
    WardReport w[5] = {ward_B_identity(r, shared.nn, 1.0), ward_B_identity(r, shared.nn, 2.0),
                       ward_B_identity(r, shared.far2, 1.0),
                       ward_B_identity(r, shared.far2, 2.0),
                       ward_B_identity(r, shared.two_pairs, 1.0)};
    Outcome o;
    o.pass = true;
    for (const auto& rep : w) o.pass = o.pass && rep.pass();
    o.detail = fmt("NN m=1:%.3f+-%.3f m=2:%.3f+-%.3f | d2 m=1:%.3f+-%.3f m=2:%.3f+-%.3f | "
                   "2-pair det:%.3f+-%.3f",
                   w[0].measured, w[0].error, w[1].measured, w[1].error, w[2].measured,
                   w[2].error, w[3].measured, w[3].error, w[4].measured, w[4].error);
    return o;
}

Outcome crit5_nn_bound() {
    shared.ensure_susy();
    const ChainResult& r = *shared.susy;
    Outcome o;
    o.pass = true;
    std::string d;
    for (double gamma : {0.25, 0.5, 0.75}) {
        BoundReport b = nn_bound_check(r, shared.nn, gamma);
        o.pass = o.pass && b.pass();
        d += fmt("g=%.2f: %.3f-3*%.3f <= %.3f  ", gamma, b.measured, b.error, b.bound);
    }
    o.detail = d;
    return o;
}

// ------------------------------------------------------------- criterion 6

Outcome crit6_gradient_fd() {
    double t0 = now_s();
    Rng rng(91);
    double worst = 0.0;
    const double h = 1e-5;
    for (int which = 0; which < 2; ++which) {
        Torus T = which == 0 ? build_torus(1, 6) : build_torus(3, 3);
        CouplingMap c = CouplingMap::uniform(T.graph, 1.2, 0.3);
        int n = T.num_sites;
        SiteVector t(n);
        for (int k = 0; k < n; ++k) t[k] = rng.uniform(-0.6, 0.6);
        SiteVector grad = action_gradient(T.graph, c, t);
        for (int dir = 0; dir < 50; ++dir) {
            SiteVector v(n);
            for (int k = 0; k < n; ++k) v[k] = rng.normal();
            v /= v.norm();
            double fp = effective_action(T.graph, c, SiteVector(t + h * v)).total;
            double fm = effective_action(T.graph, c, SiteVector(t - h * v)).total;
            double fd = (fp - fm) / (2.0 * h);
            double an = grad.dot(v);
            worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-3));
        }
    }
    double dt = now_s() - t0;
    Outcome o;
    o.pass = worst <= 1e-6 && dt < 60.0;
    o.detail = fmt("max rel error %.3g over 100 random directions (2 lattices), %.2f s",
                   worst, dt);
    return o;
}

// ------------------------------------------------------------- criterion 7

Outcome crit7_det_ratio() {
    Rng rng(92);
    double worst = 0.0;
    long done = 0;
    for (int which = 0; which < 2; ++which) {
        Torus T = which == 0 ? build_torus(3, 3) : build_torus(1, 6);
        CouplingMap c = CouplingMap::uniform(T.graph, 1.0, 0.2);
        SamplerConfig cfg;
        cfg.seed = 7;
        ChainState st(T.graph, c, cfg, 0.0);
        int n = T.num_sites;
        for (int p = 0; p < 500; ++p) {
            if (p % 20 == 0) {
                SiteVector t(n);
                for (int k = 0; k < n; ++k) t[k] = rng.uniform(-0.8, 0.8);
                st.set_field(t);
            }
            int k = int(rng.uniform_index(uint64_t(n)));
            double delta = rng.uniform(0.2, 0.8) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            double lr = st.local_log_det_ratio(k, delta);
            SiteVector tp = st.t();
            tp[k] += delta;
            double exact = Factorization(assemble(T.graph, c, tp)).logdet() -
                           Factorization(assemble(T.graph, c, st.t())).logdet();
            worst = std::max(worst, std::abs(lr - exact) / std::max(std::abs(exact), 1e-6));
            ++done;
        }
    }
    Outcome o;
    o.pass = worst <= 1e-9;
    o.detail = fmt("max rel deviation %.3g over %ld proposals", worst, done);
    return o;
}

// ------------------------------------------------------------- criterion 8

Outcome crit8_matrix_tree() {
    Rng rng(93);
    double worst = 0.0;
    long graphs = 0;
    for (int n = 1; n <= 5; ++n) {
        std::vector<Edge> all;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) all.push_back({i, j});
        int m = int(all.size());
        for (uint32_t mask = 0; mask < (1u << m); ++mask) {
            std::vector<Edge> es;
            for (int e = 0; e < m; ++e)
                if (mask & (1u << e)) es.push_back(all[size_t(e)]);
            Graph g = Graph::from_edges(n, es);
            if (!g.connected()) continue;
            CouplingMap c;
            for (size_t e = 0; e < g.edges.size(); ++e)
                c.beta_edge.push_back(rng.uniform(0.3, 2.0));
            for (int k = 0; k < n; ++k) c.eps_site.push_back(rng.uniform(0.05, 1.0));
            SiteVector t(n);
            for (int k = 0; k < n; ++k) t[k] = rng.uniform(-1.0, 1.0);
            double forest = matrix_tree_det(g, c, t);
            double fact = std::exp(Factorization(assemble(g, c, t)).logdet());
            worst = std::max(worst, std::abs(forest - fact) / std::abs(fact));
            ++graphs;
        }
    }
    Outcome o;
    o.pass = worst <= 1e-10;
    o.detail = fmt("max rel deviation %.3g over %ld connected graphs (n <= 5)", worst, graphs);
    return o;
}

// ------------------------------------------------------------- criterion 9

Outcome crit9_saddle() {
    double t0 = now_s();
    auto slope_of = [](int dim, int side, double b0, double eps) {
        std::vector<double> betas, lnb, lnm;
        for (int k = 0; k < 8; ++k) betas.push_back(b0 * std::pow(2.0, k));
        auto rows = asymptotics_scan(dim, side, betas, {eps});
        for (const auto& r : rows) {
            lnb.push_back(std::log(r.beta));
            lnm.push_back(std::log(r.mass2));
        }
        return fit_slope(lnb, lnm);
    };
    double s1 = slope_of(1, 4096, 1.0, 1e-5);
    double s2 = slope_of(2, 256, 0.5, 1e-5);
    double ta = solve_saddle(3, 256, 20.0, 1e-2).t_star;
    double tb = solve_saddle(3, 256, 20.0, 1e-4).t_star;
    double dt3 = std::abs(ta - tb);
    double dt = now_s() - t0;
    Outcome o;
    o.pass = std::abs(s1 + 1.0) <= 0.1 && std::abs(s2 + 1.0) <= 0.3 && dt3 < 1e-3 && dt < 60.0;
    o.detail = fmt("1d slope %.4f (|+1| <= 0.1), 2d slope %.4f (|+1| <= 0.3), "
                   "3d |dt*| %.2e (< 1e-3), %.1f s",
                   s1, s2, dt3, dt);
    return o;
}

// ------------------------------------------------------------- criterion 10

Outcome crit10_greens_bound() {
    Torus T = build_torus(3, 16);
    int x = 0, y = T.shift(0, 0, 8);
    DiamondRegion R = build_diamond(T, x, y, M_PI / 8.0);
    Rng rng(94);
    int chain_fail = 0, hypo_fail = 0;
    for (int f = 0; f < 100; ++f) {
        SiteVector t(T.num_sites);
        int kind = f % 3;
        double amp = kind == 0 ? 0.15 : (kind == 1 ? 0.35 : 0.55);
        for (int k = 0; k < T.num_sites; ++k) t[k] = rng.uniform(-amp, amp);
        if (kind == 2) { // smooth long-wavelength component on top of the noise
            for (int k = 0; k < T.num_sites; ++k) {
                auto cc = T.coords(k);
                t[k] = 0.5 * t[k] +
                       0.3 * std::sin(2.0 * M_PI * double(cc[0]) / double(T.side));
            }
        }
        double beta = rng.uniform(0.5, 5.0), eps = rng.uniform(0.05, 0.5);
        BoundChainReport rep = greens_bound_check(T, R, t, 2.0, 0.3, beta, eps);
        if (!rep.hypothesis_ok) ++hypo_fail;
        else if (!rep.pass()) ++chain_fail;
    }
    SiteVector zero = SiteVector::Zero(T.num_sites);
    auto scan = greens_bound_beta_scan(T, R, zero, 2.0, 0.3, {1.0, 10.0, 100.0}, 0.1);
    double lo = scan[0].beta_times_GN, hi = lo;
    bool scan_ok = true;
    for (const auto& rep : scan) {
        scan_ok = scan_ok && rep.pass();
        lo = std::min(lo, rep.beta_times_GN);
        hi = std::max(hi, rep.beta_times_GN);
    }
    double spread = (hi - lo) / hi;
    Outcome o;
    o.pass = hypo_fail == 0 && chain_fail == 0 && scan_ok && spread <= 1e-9;
    o.detail = fmt("chain 0<=G<=G_N held on %d/100 admissible fields; beta*G_N spread %.2g "
                   "across beta={1,10,100}",
                   100 - chain_fail - hypo_fail, spread);
    return o;
}

// ------------------------------------------------------------- criterion 11

Outcome crit11_probe() {
    Torus T = build_torus(3, 6);
    CouplingMap c = CouplingMap::uniform(T.graph, 20.0, 0.05);
    int x = 0, y1 = T.shift(0, 0, 1), y3 = T.shift(T.shift(T.shift(0, 0, 1), 0, 1), 0, 1);
    SamplerConfig cfg;
    cfg.warmup_sweeps = 1500;
    cfg.measure_sweeps = 6000;
    cfg.seed = 404;
    ChainResult r = run_chains(T, c, cfg,
                               {hook_cosh_pair(x, y1, 1.0), hook_cosh_pair(x, y3, 1.0),
                                hook_cosh_site(x, 1.0)});
    BoundReport p1 = cosh_moment(r, x, y1, 1.0);
    BoundReport p3 = cosh_moment(r, x, y3, 1.0);
    BoundReport ps = cosh_site_moment(r, x, 1.0);
    Outcome o;
    o.pass = p1.pass() && p3.pass() && ps.pass();
    o.detail = fmt("<cosh dt> |x-y|=1: %.4f+-%.4f, |x-y|=3: %.4f+-%.4f (<= 2); "
                   "<cosh t>: %.4f+-%.4f (<= 5/2)",
                   p1.measured, p1.error, p3.measured, p3.error, ps.measured, ps.error);
    if (!o.pass)
        o.notes.push_back("probe outside regime bound: investigate (larger beta / finite-size "
                          "/ mixing) before drawing conclusions - this is a regime probe, not "
                          "an identity");
    return o;
}

// ------------------------------------------------------------- criterion 12

Outcome crit12_sandwich() {
    Torus T = build_torus(3, 8);
    int x = 0;
    SiteVector f = SiteVector::Zero(T.num_sites);
    f[x] = 1.0;
    double eps = 0.1, alpha = 0.3;
    std::vector<double> betas = {5.0, 20.0, 80.0};
    std::vector<SandwichReport> reps;
    bool row_positive = true;
    double row_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < betas.size(); ++i) {
        CouplingMap c = CouplingMap::uniform(T.graph, betas[i], eps);
        SamplerConfig cfg;
        cfg.warmup_sweeps = 200;
        cfg.measure_sweeps = 400;
        cfg.seed = 505 + uint64_t(i);
        ChainResult r = run_chains(T, c, cfg,
                                   {hook_sandwich_form(f, x), hook_C_row_min(x)});
        reps.push_back(sandwich_check(r, T, c, f, x, alpha));
        for (double v : find_acc(r, C_row_min_name(x)).series()) {
            row_min = std::min(row_min, v);
            if (!(v > 0.0)) row_positive = false;
        }
    }
    bool finite_positive = true;
    for (const auto& rep : reps) finite_positive = finite_positive && rep.pass();
    bool monotone = true;
    for (size_t i = 1; i < reps.size(); ++i)
        if (std::abs(reps[i].Khat - 1.0) > std::abs(reps[i - 1].Khat - 1.0)) monotone = false;
    Outcome o;
    o.pass = finite_positive && row_positive && monotone;
    o.detail = fmt("Khat = %.3f / %.3f / %.3f at beta = 5/20/80 (Khat' = %.3f / %.3f / %.3f); "
                   "C-row min %.3g",
                   reps[0].Khat, reps[1].Khat, reps[2].Khat, reps[0].Khat_prime,
                   reps[1].Khat_prime, reps[2].Khat_prime, row_min);
    if (finite_positive && row_positive && !monotone) {
        o.notes.push_back("finite-positive and C-row-positivity clauses hold; the "
                          "monotone-approach-to-1 clause fails and is expected to: "
                          "Khat compares [f;Cf] (effective mass eps<e^t> = eps) against "
                          "[f;Gt0 f] at mass eps/2, and the zero-mode share of both forms "
                          "grows with beta on a fixed torus, so the eps-vs-eps/2 gap widens "
                          "and Khat moves away from 1 as beta grows, toward 1/2 in the "
                          "beta->inf zero-mode-dominated limit");
        o.notes.push_back(fmt("|Khat-1| sequence: %.3f -> %.3f -> %.3f (monotone approach "
                              "to 1 would require this to shrink)",
                              std::abs(reps[0].Khat - 1.0), std::abs(reps[1].Khat - 1.0),
                              std::abs(reps[2].Khat - 1.0)));
    }
    return o;
}

// ------------------------------------------------------------- criterion 13

Outcome crit13_errw() {
    Graph star = Graph::from_edges(3, {{0, 1}, {0, 2}});
    bool ok = true;
    std::string d;
    for (double a : {0.5, 1.0, 3.0}) {
        ERRWState st = errw_init(star, a, 1, 77);
        auto p0 = errw_next_probs(star, st);
        ok = ok && p0.size() == 1 && p0[0] == 1.0;
        errw_step(star, st); // the single forced traversal: leaf -> centre
        ok = ok && st.vertex == 0;
        auto p = errw_next_probs(star, st);
        double e1 = (a + 1.0) / (2.0 * a + 1.0), e2 = a / (2.0 * a + 1.0);
        ok = ok && p.size() == 2 && p[0] == e1 && p[1] == e2;
        d += fmt("a=%g: (%.6g, %.6g)  ", a, p.size() == 2 ? p[0] : -1.0,
                 p.size() == 2 ? p[1] : -1.0);
    }
    Outcome o;
    o.pass = ok;
    o.detail = d + "(exact equality)";
    return o;
}

// ------------------------------------------------------------- criterion 14

std::string slurp_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome crit14_determinism() {
    const char* text = R"({
      "lattice": {"d": 1, "L": 4},
      "couplings": {"beta": 0.8, "eps": 0.5},
      "sampler": {"warmup_sweeps": 100, "measure_sweeps": 400},
      "observables": [{"name": "exp_t"}, {"name": "sum_rule"}],
      "output": "unused",
      "seed": 777
    })";
    RunConfig cfg = parse_run_config_text(text);
    cfg.out_dir = "acc_artifacts/det_a";
    int ra = do_sample(cfg);
    cfg.out_dir = "acc_artifacts/det_b";
    int rb = do_sample(cfg);
    bool ok = ra == 0 && rb == 0;
    int files = 0;
    for (const char* f : {"obs_exp_t_0.csv", "obs_sum_rule_0.csv", "summary.json",
                          "config.json", "manifest.json"}) {
        std::string a = slurp_file(std::string("acc_artifacts/det_a/") + f);
        std::string b = slurp_file(std::string("acc_artifacts/det_b/") + f);
        ok = ok && !a.empty() && a == b;
        ++files;
    }
    Outcome o;
    o.pass = ok;
    o.detail = fmt("%d artifacts byte-identical across two runs of one config+seed", files);
    return o;
}

// ----------------------------------------------------------------- dispatch

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "exact_partition_function", crit1_exact_Z},
    {2, "lorentz_ward_identity", crit2_lorentz_ward},
    {3, "sum_rule", crit3_sum_rule},
    {4, "susy_ward_identities", crit4_susy_ward},
    {5, "nn_bound", crit5_nn_bound},
    {6, "action_gradient_fd", crit6_gradient_fd},
    {7, "lowrank_det_ratio", crit7_det_ratio},
    {8, "matrix_tree_oracle", crit8_matrix_tree},
    {9, "saddle_asymptotics", crit9_saddle},
    {10, "greens_bound_chain", crit10_greens_bound},
    {11, "regime_probe", crit11_probe},
    {12, "sandwich_structure", crit12_sandwich},
    {13, "errw_exactness", crit13_errw},
    {14, "artifact_determinism", crit14_determinism},
};

} // namespace

int main(int argc, char** argv) {
    setenv("H22_LOG", "quiet", 1); // criterion lines are the only intended output
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        std::string list;
        if (a == "--criteria" && i + 1 < argc) list = argv[++i];
        else if (a.rfind("--criteria=", 0) == 0) list = a.substr(11);
        else {
            std::fprintf(stderr, "usage: %s [--criteria N,M,...]\n", argv[0]);
            return 2;
        }
        std::stringstream ss(list);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            int id = std::atoi(tok.c_str());
            if (id < 1 || id > 14) {
                std::fprintf(stderr, "unknown criterion '%s'\n", tok.c_str());
                return 2;
            }
            wanted.push_back(id);
        }
    }
    if (wanted.empty())
        for (const auto& c : kCriteria) wanted.push_back(c.id);

    int failed = 0;
    for (int id : wanted)
        for (const auto& c : kCriteria) {
            if (c.id != id) continue;
            Outcome o = c.fn();
            std::printf("[%s] criterion %2d %-26s %s\n", o.pass ? "PASS" : "FAIL", c.id,
                        c.name, o.detail.c_str());
            for (const auto& n : o.notes) std::printf("       | %s\n", n.c_str());
            std::fflush(stdout);
            if (!o.pass) ++failed;
        }
    std::printf("%zu criteria run, %d failed\n", wanted.size(), failed);
    return failed == 0 ? 0 : 1;
}
