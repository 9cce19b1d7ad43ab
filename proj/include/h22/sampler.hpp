#pragma once
// Markov chain samplers for the effective action: random-scan single-site
// Metropolis with low-rank determinant-ratio updates, and a Metropolis-adjusted
// Langevin step using exact action differences.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include <h22/accumulator.hpp>
#include <h22/action.hpp>
#include <h22/elliptic.hpp>
#include <h22/errors.hpp>
#include <h22/lattice.hpp>
#include <h22/rng.hpp>
#include <h22/saddle.hpp>

namespace h22 {

struct SamplerConfig {
    int warmup_sweeps = 500;
    int measure_sweeps = 2000;
    int thin = 1;            // measure every thin-th sweep
    int mala_every = 0;      // insert one Langevin update after every k local sweeps; 0 = never
    int shift_every = 1;     // global constant-shift proposal cadence; 0 = never
    double local_width = 0.7; // uniform proposal half-width
    double mala_step = 0.02;  // Langevin time step
    double shift_width = 1.0; // half-width of the global-shift proposal
    int refresh_interval = 64; // exact inverse/logdet resync cadence, in sweeps
    bool adapt = true;         // step-size adaptation during warmup only
    double init_t = std::numeric_limits<double>::quiet_NaN(); // NaN: saddle (torus) or 0
    double logdet_scale = 1.0; // corruption hook for mutation tests; 1 = physical
    uint64_t seed = 1;
    int chains = 1;
};

struct ChainDiagnostics {
    long long local_proposed = 0, local_accepted = 0;
    long long mala_proposed = 0, mala_accepted = 0;
    long long shift_proposed = 0, shift_accepted = 0;
    double local_width_final = 0.0, mala_step_final = 0.0, shift_width_final = 0.0;
    double local_rate() const {
        return local_proposed ? double(local_accepted) / double(local_proposed) : 0.0;
    }
    double mala_rate() const {
        return mala_proposed ? double(mala_accepted) / double(mala_proposed) : 0.0;
    }
    double shift_rate() const {
        return shift_proposed ? double(shift_accepted) / double(shift_proposed) : 0.0;
    }
};

// One chain: owns the field, the assembled operator, a dense inverse G = D^{-1}
// maintained by Woodbury updates, a running log-determinant, and a sparse
// factorization refreshed lazily (only when a solve or an s-draw needs it).
class ChainState {
public:
    ChainState(const Graph& g, const CouplingMap& c, const SamplerConfig& cfg, double t0)
        : cfg_(cfg),
          op_(assemble(g, c, SiteVector::Constant(g.n, t0))),
          fact_(op_),
          rng_(Rng::substream(cfg.seed, 0)) {
        G_ = fact_.dense_inverse();
        logdet_ = fact_.logdet();
        fact_fresh_ = true;
        width_ = cfg.local_width;
        tau_ = cfg.mala_step;
        shiftw_ = cfg.shift_width;
    }

    const Graph& graph() const { return op_.graph; }
    const CouplingMap& couplings() const { return op_.c; }
    const SiteVector& t() const { return op_.t; }
    const Eigen::MatrixXd& inverse() const { return G_; }
    double logdet() const { return logdet_; }
    const ChainDiagnostics& diagnostics() const { return diag_; }
    Rng& rng() { return rng_; }

    // replace the whole field (used for custom initialization), then resync
    void set_field(const SiteVector& t) {
        if (t.size() != op_.graph.n) throw ConfigError("set_field: wrong field size");
        op_ = assemble(op_.graph, op_.c, t);
        refresh();
    }

    // exact resync: refactorize, recompute logdet and the dense inverse
    void refresh() {
        fact_.refactorize(op_);
        logdet_ = fact_.logdet();
        G_ = fact_.dense_inverse();
        fact_fresh_ = true;
    }

    Factorization& factorization() {
        if (!fact_fresh_) {
            fact_.refactorize(op_);
            fact_fresh_ = true;
        }
        return fact_;
    }

    // ln det(D') - ln det(D) for the proposal t_k -> t_k + delta, via the
    // determinant identity on the touched block S = {k} u N(k):
    //   det D'/det D = det(I_S + G_SS dD_SS)
    double local_log_det_ratio(int k, double delta) const {
        std::vector<int> S;
        Eigen::MatrixXd dD;
        touched_block(k, delta, S, dD);
        int m = int(S.size());
        Eigen::MatrixXd GSS(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) GSS(a, b) = G_(S[size_t(a)], S[size_t(b)]);
        double det = (Eigen::MatrixXd::Identity(m, m) + GSS * dD).determinant();
        if (!(det > 0.0) || !std::isfinite(det))
            return -std::numeric_limits<double>::infinity();
        return std::log(det);
    }

    // exact F(t') - F(t) for a single-site proposal (local terms + logdet term)
    double local_delta_F(int k, double delta) const {
        return local_delta_F_parts(k, delta) - 0.5 * local_log_det_ratio(k, delta);
    }

    // Metropolis decision; maintains G, logdet, and the staleness flag
    bool try_local(int k, double delta) {
        ++diag_.local_proposed;
        double tk = op_.t[k];
        if (!std::isfinite(delta) || std::abs(tk + delta) > 350.0) return false;

        std::vector<int> S;
        Eigen::MatrixXd dD;
        touched_block(k, delta, S, dD);
        int m = int(S.size());
        Eigen::MatrixXd GSS(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) GSS(a, b) = G_(S[size_t(a)], S[size_t(b)]);
        double r = (Eigen::MatrixXd::Identity(m, m) + GSS * dD).determinant();
        if (!(r > 0.0) || !std::isfinite(r)) return false; // unfactorizable: auto-reject

        double log_r = std::log(r);
        double ln_acc = -local_delta_F_parts(k, delta) + 0.5 * cfg_.logdet_scale * log_r;
        if (ln_acc < 0.0 && rng_.uniform() >= std::exp(ln_acc)) return false;

        // accept: Woodbury-downdate G, advance logdet, mark factorization stale
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) + dD * GSS;
        Eigen::MatrixXd C = A.partialPivLu().solve(dD);
        C = 0.5 * (C + C.transpose()).eval();
        Eigen::MatrixXd GS(G_.rows(), m);
        for (int a = 0; a < m; ++a) GS.col(a) = G_.col(S[size_t(a)]);
        Eigen::MatrixXd W(GS.rows(), m);
        W.noalias() = GS * C;
        G_.noalias() -= W * GS.transpose();
        op_.update_site(k, tk + delta);
        logdet_ += log_r;
        fact_fresh_ = false;
        ++diag_.local_accepted;
        return true;
    }

    // one random-scan sweep: n single-site proposals at uniformly chosen sites
    void sweep_local() {
        int n = op_.graph.n;
        for (int rep = 0; rep < n; ++rep) {
            int k = int(rng_.uniform_index(uint64_t(n)));
            double delta = rng_.uniform(-width_, width_);
            try_local(k, delta);
        }
    }

    // Metropolis-adjusted Langevin over the full field; exact F difference
    bool try_mala() {
        ++diag_.mala_proposed;
        if (tau_ <= 0.0) { // degenerate step: proposal equals the current state
            ++diag_.mala_accepted;
            return true;
        }
        refresh(); // exact gradient and logdet at the current state
        int n = op_.graph.n;
        SiteVector grad = scaled_gradient();
        SiteVector xi(n);
        for (int k = 0; k < n; ++k) xi[k] = rng_.normal();
        SiteVector tp = op_.t - tau_ * grad + std::sqrt(2.0 * tau_) * xi;
        if (!tp.allFinite() || tp.cwiseAbs().maxCoeff() > 350.0) return false;

        EllipticOperator opp = assemble(op_.graph, op_.c, tp);
        double logdet_p;
        Eigen::MatrixXd Gp;
        try {
            Factorization fp(opp);
            logdet_p = fp.logdet();
            Gp = fp.dense_inverse();
        } catch (const NumericalError&) {
            return false; // unfactorizable proposal: auto-reject
        }

        double F0 = scaled_action(op_, logdet_);
        double F1 = scaled_action(opp, logdet_p);
        SiteVector grad_p = scaled_gradient(opp, Gp);
        SiteVector fwd = tp - op_.t + tau_ * grad;   // = sqrt(2 tau) xi
        SiteVector bwd = op_.t - tp + tau_ * grad_p;
        double ln_q = (fwd.squaredNorm() - bwd.squaredNorm()) / (4.0 * tau_);
        double ln_acc = F0 - F1 + ln_q;
        if (ln_acc < 0.0 && rng_.uniform() >= std::exp(ln_acc)) return false;

        op_ = std::move(opp);
        logdet_ = logdet_p;
        G_ = std::move(Gp);
        fact_.refactorize(op_);
        fact_fresh_ = true;
        ++diag_.mala_accepted;
        return true;
    }

    // global shift t -> t + c, c ~ U[-w,w]: the zero mode of the field has a
    // tiny mass at small eps and site moves alone mix it very slowly
    bool try_shift() {
        ++diag_.shift_proposed;
        double c = rng_.uniform(-shiftw_, shiftw_);
        SiteVector tp = op_.t.array() + c;
        if (!tp.allFinite() || tp.cwiseAbs().maxCoeff() > 350.0) return false;
        EllipticOperator opp = assemble(op_.graph, op_.c, tp);
        double logdet_p;
        try {
            Factorization fp(opp);
            logdet_p = fp.logdet();
            double ln_acc = scaled_action(op_, logdet_) - scaled_action(opp, logdet_p);
            if (ln_acc < 0.0 && rng_.uniform() >= std::exp(ln_acc)) return false;
            G_ = fp.dense_inverse();
        } catch (const NumericalError&) {
            return false;
        }
        op_ = std::move(opp);
        logdet_ = logdet_p;
        fact_fresh_ = false;
        ++diag_.shift_accepted;
        return true;
    }

    // fresh conditional Gaussian s | t with covariance D^{-1}
    SiteVector sample_s() {
        Factorization& f = factorization();
        SiteVector xi(op_.graph.n);
        for (int k = 0; k < op_.graph.n; ++k) xi[k] = rng_.normal();
        return f.correlated_normal(xi);
    }

    double action_total() { return scaled_action(op_, logdet_, /*physical=*/true); }

    // warmup-only step-size adaptation toward ~50% local/shift, ~57% Langevin
    void adapt_from_window(long long lp, long long la, long long mp, long long ma,
                           long long sp = 0, long long sa = 0) {
        if (lp > 0) {
            double rate = double(la) / double(lp);
            width_ = std::clamp(width_ * std::exp(0.4 * (rate - 0.5)), 1e-2, 4.0);
        }
        if (mp > 0) {
            double rate = double(ma) / double(mp);
            tau_ = std::clamp(tau_ * std::exp(0.4 * (rate - 0.57)), 1e-7, 1.0);
        }
        if (sp > 0) {
            double rate = double(sa) / double(sp);
            shiftw_ = std::clamp(shiftw_ * std::exp(0.4 * (rate - 0.5)), 1e-3, 6.0);
        }
    }

    double local_width() const { return width_; }
    double mala_step() const { return tau_; }
    double shift_width() const { return shiftw_; }

private:
    // cosh-edge + linear/eps terms of F(t_k + delta) - F(t_k)
    double local_delta_F_parts(int k, double delta) const {
        const Graph& g = op_.graph;
        double tk = op_.t[k], tkp = tk + delta;
        double d = delta;
        for (int j : g.nbr[size_t(k)]) {
            double beta = op_.beta_of(k, j);
            d += beta * (std::cosh(tkp - op_.t[j]) - std::cosh(tk - op_.t[j]));
        }
        d += op_.c.eps_site[size_t(k)] * (std::cosh(tkp) - std::cosh(tk));
        return d;
    }

    // dD on the touched block, local indices follow sorted S
    void touched_block(int k, double delta, std::vector<int>& S, Eigen::MatrixXd& dD) const {
        const Graph& g = op_.graph;
        const auto& nb = g.nbr[size_t(k)];
        S.clear();
        S.reserve(nb.size() + 1);
        size_t q = 0;
        while (q < nb.size() && nb[q] < k) S.push_back(nb[q++]);
        S.push_back(k);
        while (q < nb.size()) S.push_back(nb[q++]);
        int m = int(S.size());
        int pk = int(std::lower_bound(S.begin(), S.end(), k) - S.begin());

        double f = std::exp(op_.t[k]) * std::expm1(delta); // e^{t_k'} - e^{t_k}
        dD = Eigen::MatrixXd::Zero(m, m);
        double diag_k = op_.c.eps_site[size_t(k)];
        for (int a = 0; a < m; ++a) {
            int j = S[size_t(a)];
            if (j == k) continue;
            double wj = op_.beta_of(k, j) * std::exp(op_.t[j]);
            diag_k += wj;
            dD(a, a) = wj * f;
            dD(pk, a) = dD(a, pk) = -wj * f;
        }
        dD(pk, pk) = diag_k * f;
    }

    SiteVector scaled_gradient() const { return scaled_gradient(op_, G_); }

    SiteVector scaled_gradient(const EllipticOperator& op, const Eigen::MatrixXd& G) const {
        SiteVector g = action_gradient(op, G);
        if (cfg_.logdet_scale != 1.0) {
            // gradient of the corrupted action: the logdet term carries the scale
            SiteVector glocal(op.graph.n);
            for (int k = 0; k < op.graph.n; ++k)
                glocal[k] = 1.0 + op.c.eps_site[size_t(k)] * std::sinh(op.t[k]);
            for (size_t e = 0; e < op.graph.edges.size(); ++e) {
                int i = op.graph.edges[e].i, j = op.graph.edges[e].j;
                double sh = op.c.beta_edge[e] * std::sinh(op.t[i] - op.t[j]);
                glocal[i] += sh;
                glocal[j] -= sh;
            }
            g = glocal + cfg_.logdet_scale * (g - glocal);
        }
        return g;
    }

    double scaled_action(const EllipticOperator& op, double logdet, bool physical = false) const {
        ActionValue v = action_parts(op, logdet);
        double scale = physical ? 1.0 : cfg_.logdet_scale;
        return v.local_cosh_part + scale * v.logdet_part + v.linear_eps_part;
    }

    SamplerConfig cfg_;
    EllipticOperator op_;
    Factorization fact_;
    bool fact_fresh_ = false;
    Eigen::MatrixXd G_;
    double logdet_ = 0.0;
    Rng rng_;
    ChainDiagnostics diag_;
    double width_ = 0.7, tau_ = 0.02, shiftw_ = 1.0;
};

struct Hook {
    std::string name;
    std::function<double(ChainState&)> fn;
};

struct ChainResult {
    std::map<std::string, Accumulator> acc;
    ChainDiagnostics diag;
    SiteVector final_t;
};

inline ChainResult run_chain(const Graph& g, const CouplingMap& c, const SamplerConfig& cfg,
                             const std::vector<Hook>& hooks, double t0) {
    ChainState st(g, c, cfg, t0);
    ChainResult out;
    for (const auto& h : hooks) out.acc[h.name]; // fixed key set up front

    long long lp0 = 0, la0 = 0, mp0 = 0, ma0 = 0, sp0 = 0, sa0 = 0;
    int since_refresh = 0;
    auto one_sweep = [&](int sweep_idx) {
        st.sweep_local();
        if (cfg.shift_every > 0 && (sweep_idx + 1) % cfg.shift_every == 0) st.try_shift();
        if (cfg.mala_every > 0 && (sweep_idx + 1) % cfg.mala_every == 0) st.try_mala();
        if (++since_refresh >= cfg.refresh_interval) {
            st.refresh();
            since_refresh = 0;
        }
    };

    for (int s = 0; s < cfg.warmup_sweeps; ++s) {
        one_sweep(s);
        if (cfg.adapt && (s + 1) % 10 == 0) {
            const auto& d = st.diagnostics();
            st.adapt_from_window(d.local_proposed - lp0, d.local_accepted - la0,
                                 d.mala_proposed - mp0, d.mala_accepted - ma0,
                                 d.shift_proposed - sp0, d.shift_accepted - sa0);
            lp0 = d.local_proposed;
            la0 = d.local_accepted;
            mp0 = d.mala_proposed;
            ma0 = d.mala_accepted;
            sp0 = d.shift_proposed;
            sa0 = d.shift_accepted;
        }
    }

    for (int s = 0; s < cfg.measure_sweeps; ++s) {
        one_sweep(s);
        if ((s + 1) % cfg.thin == 0) {
            try {
                for (const auto& h : hooks) out.acc[h.name].add(h.fn(st));
            } catch (const NumericalError& e) {
                throw NumericalError(std::string(e.what()) + " at measurement sweep " +
                                     std::to_string(s));
            }
        }
    }

    out.diag = st.diagnostics();
    out.diag.local_width_final = st.local_width();
    out.diag.mala_step_final = st.mala_step();
    out.diag.shift_width_final = st.shift_width();
    out.final_t = st.t();
    return out;
}

inline double default_init_t(const Torus& T, const CouplingMap& c, const SamplerConfig& cfg) {
    if (std::isfinite(cfg.init_t)) return cfg.init_t;
    if (c.uniform_beta() > 0.0) {
        double eps0 = c.eps_site.empty() ? 0.0 : c.eps_site[0];
        bool unif = true;
        for (double e : c.eps_site) unif = unif && e == eps0;
        if (unif && eps0 > 0.0) return solve_saddle(T.dim, T.side, c.uniform_beta(), eps0).t_star;
    }
    return 0.0;
}

// independent chains with substreamed seeds, merged in chain order
inline ChainResult run_chains(const Graph& g, const CouplingMap& c, const SamplerConfig& cfg,
                              const std::vector<Hook>& hooks, double t0, int threads = 1) {
    int nc = std::max(1, cfg.chains);
    std::vector<ChainResult> results(static_cast<size_t>(nc));
    auto work = [&](int idx) {
        SamplerConfig ccfg = cfg;
        ccfg.seed = Rng::substream(cfg.seed, uint64_t(idx + 1)).next();
        results[size_t(idx)] = run_chain(g, c, ccfg, hooks, t0);
    };
    if (threads <= 1 || nc == 1) {
        for (int i = 0; i < nc; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nc; ++i) {
            pool.emplace_back(work, i);
            if (int(pool.size()) == threads || i == nc - 1) {
                for (auto& th : pool) th.join();
                pool.clear();
            }
        }
    }
    ChainResult merged = std::move(results[0]);
    for (int i = 1; i < nc; ++i) {
        for (auto& [name, acc] : merged.acc) acc.merge_from(results[size_t(i)].acc.at(name));
        merged.diag.local_proposed += results[size_t(i)].diag.local_proposed;
        merged.diag.local_accepted += results[size_t(i)].diag.local_accepted;
        merged.diag.mala_proposed += results[size_t(i)].diag.mala_proposed;
        merged.diag.mala_accepted += results[size_t(i)].diag.mala_accepted;
    }
    return merged;
}

inline ChainResult run_chains(const Torus& T, const CouplingMap& c, const SamplerConfig& cfg,
                              const std::vector<Hook>& hooks, int threads = 1) {
    return run_chains(T.graph, c, cfg, hooks, default_init_t(T, c, cfg), threads);
}

} // namespace h22
