// Random walk in the environment generated by D_{beta,eps}(t) -- the discrete
// jump chain with per-step death mass eps e^{t_j} -- and the linearly
// edge-reinforced random walk for qualitative comparison.
#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "h22/elliptic.hpp"
#include "h22/errors.hpp"
#include "h22/lattice.hpp"
#include "h22/rng.hpp"

namespace h22 {

// ---------------------------------------------------------------- env walk

struct WalkState {
    int site = 0;
    int start = 0;
    long jumps = 0; // successful jumps; a death step does not count
    bool alive = true;
    std::array<long, 3> disp{0, 0, 0}; // unwrapped lattice displacement (torus walks)
    Rng rng;

    WalkState(int start_site, uint64_t seed) : site(start_site), start(start_site), rng(seed) {}

    double disp2() const {
        return double(disp[0]) * disp[0] + double(disp[1]) * disp[1] + double(disp[2]) * disp[2];
    }
    bool at_unwrapped_origin() const { return disp[0] == 0 && disp[1] == 0 && disp[2] == 0; }
};

// one-step distribution from site i: jump to j ~ i with weight beta e^{t_i+t_j},
// die with weight eps e^{t_i}; the common e^{t_i} cancels in the ratios
struct JumpTable {
    std::vector<int> nbr;
    std::vector<double> p; // aligned with nbr
    double p_death = 0.0;

    double total() const {
        double s = p_death;
        for (double v : p) s += v;
        return s;
    }
};

inline JumpTable env_walk_probs(const Graph& g, const SiteVector& t, double beta, double eps,
                                int i) {
    if (i < 0 || i >= g.n) throw ConfigError("env_walk_probs: site out of range");
    if (t.size() != g.n) throw ConfigError("env_walk_probs: t size mismatch");
    if (!(beta > 0.0)) throw ConfigError("env_walk_probs: need beta > 0");
    if (!(eps >= 0.0)) throw ConfigError("env_walk_probs: need eps >= 0");
    JumpTable J;
    J.nbr = g.nbr[size_t(i)];
    if (J.nbr.empty() && eps == 0.0)
        throw ConfigError("env_walk_probs: isolated site with no death mass");
    double m = 0.0; // shift for overflow safety
    for (int j : J.nbr) m = std::max(m, t[j]);
    double W = eps * std::exp(-m);
    J.p.resize(J.nbr.size());
    for (size_t k = 0; k < J.nbr.size(); ++k) {
        J.p[k] = beta * std::exp(t[J.nbr[k]] - m);
        W += J.p[k];
    }
    for (double& v : J.p) v /= W;
    J.p_death = eps * std::exp(-m) / W;
    return J;
}

inline JumpTable env_walk_probs(const Torus& T, const SiteVector& t, double beta, double eps,
                                int i) {
    return env_walk_probs(T.graph, t, beta, eps, i);
}

namespace detail {

// sample an outcome index in [0, nbr.size()] (== size means death); death mass
// is taken from the top of [0,1) so eps = 0 can never kill through fp dust
inline int pick_outcome(const JumpTable& J, Rng& rng) {
    double u = rng.uniform();
    if (J.p_death > 0.0 && u >= 1.0 - J.p_death) return int(J.p.size());
    double cum = 0.0;
    for (size_t k = 0; k + 1 < J.p.size(); ++k) {
        cum += J.p[k];
        if (u < cum) return int(k);
    }
    return int(J.p.size()) - 1; // last neighbor absorbs rounding dust
}

} // namespace detail

// plain-graph step: no displacement bookkeeping
inline void env_walk_step(const Graph& g, const SiteVector& t, double beta, double eps,
                          WalkState& st) {
    if (!st.alive) return; // dead walks take no further steps
    JumpTable J = env_walk_probs(g, t, beta, eps, st.site);
    int k = detail::pick_outcome(J, st.rng);
    if (k == int(J.p.size())) {
        st.alive = false;
        return;
    }
    st.site = J.nbr[size_t(k)];
    ++st.jumps;
}

// torus step: also tracks the unwrapped displacement of the jump
inline void env_walk_step(const Torus& T, const SiteVector& t, double beta, double eps,
                          WalkState& st) {
    if (!st.alive) return;
    JumpTable J = env_walk_probs(T.graph, t, beta, eps, st.site);
    int k = detail::pick_outcome(J, st.rng);
    if (k == int(J.p.size())) {
        st.alive = false;
        return;
    }
    int j = J.nbr[size_t(k)];
    auto ci = T.coords(st.site), cj = T.coords(j);
    for (int a = 0; a < T.dim; ++a) st.disp[size_t(a)] += T.wrap_delta(cj[a] - ci[a]);
    st.site = j;
    ++st.jumps;
}

// ------------------------------------------------------------- walk survey

struct WalkerRecord {
    int env = 0, walker = 0;
    std::string outcome; // "returned", "died", "exhausted"
    long jumps = 0;
    double disp2 = 0.0;
};

struct WalkSurvey {
    int environments = 0, walkers_per_env = 0;
    long max_jumps = 0;
    double return_probability = 0.0, return_stderr = 0.0; // annealed, unwrapped origin
    std::vector<double> env_return; // quenched per-environment return fractions
    double quenched_spread = 0.0;   // population sd of env_return
    long died = 0, returned = 0, exhausted = 0;
    double mean_survival = 0.0, survival_stderr = 0.0; // jumps among walkers that died
    std::vector<long> checkpoints;
    std::vector<double> msd, msd_stderr; // mean disp^2 of walkers alive at each checkpoint
    std::vector<WalkerRecord> records;
};

// k walkers per frozen environment; return = first revisit of the unwrapped
// origin (finite-size-free), annealed mean plus quenched per-env spread
inline WalkSurvey env_walk_survey(const Torus& T, const std::vector<SiteVector>& envs,
                                  double beta, double eps, int start, int walkers_per_env,
                                  long max_jumps, uint64_t seed,
                                  std::vector<long> checkpoints = {}) {
    if (envs.empty()) throw ConfigError("env_walk_survey: no environments");
    if (walkers_per_env < 1) throw ConfigError("env_walk_survey: need at least one walker");
    if (max_jumps < 1) throw ConfigError("env_walk_survey: need a positive jump budget");
    if (start < 0 || start >= T.num_sites) throw ConfigError("env_walk_survey: start out of range");
    for (const auto& t : envs)
        if (t.size() != T.num_sites) throw ConfigError("env_walk_survey: environment size mismatch");
    if (checkpoints.empty())
        checkpoints = {max_jumps / 8, max_jumps / 4, max_jumps / 2, max_jumps};
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(),
                                     [&](long c) { return c < 1 || c > max_jumps; }),
                      checkpoints.end());

    WalkSurvey out;
    out.environments = int(envs.size());
    out.walkers_per_env = walkers_per_env;
    out.max_jumps = max_jumps;
    out.checkpoints = checkpoints;
    std::vector<double> msd_sum(checkpoints.size(), 0.0), msd_sum2(checkpoints.size(), 0.0);
    std::vector<long> msd_n(checkpoints.size(), 0);
    double surv_sum = 0.0, surv_sum2 = 0.0;

    const int N = T.num_sites;
    std::vector<std::vector<double>> cum(static_cast<size_t>(N)); // cumulative jump probs
    std::vector<double> pdeath(static_cast<size_t>(N));
    std::vector<std::vector<std::array<int8_t, 3>>> step_d(static_cast<size_t>(N));

    for (int e = 0; e < int(envs.size()); ++e) {
        const SiteVector& t = envs[size_t(e)];
        // the environment is frozen: build the per-site tables once
        for (int i = 0; i < N; ++i) {
            JumpTable J = env_walk_probs(T.graph, t, beta, eps, i);
            cum[size_t(i)].resize(J.p.size());
            double c = 0.0;
            for (size_t k = 0; k < J.p.size(); ++k) {
                c += J.p[k];
                cum[size_t(i)][k] = c;
            }
            pdeath[size_t(i)] = J.p_death;
            step_d[size_t(i)].assign(J.nbr.size(), {0, 0, 0});
            auto ci = T.coords(i);
            for (size_t k = 0; k < J.nbr.size(); ++k) {
                auto cj = T.coords(J.nbr[k]);
                for (int a = 0; a < T.dim; ++a)
                    step_d[size_t(i)][k][size_t(a)] = int8_t(T.wrap_delta(cj[a] - ci[a]));
            }
        }
        long env_returns = 0;
        for (int w = 0; w < walkers_per_env; ++w) {
            WalkState st(start, Rng::substream(seed, (uint64_t(e) << 24) ^ uint64_t(w)).next());
            bool ret = false;
            size_t ck = 0;
            while (st.alive && st.jumps < max_jumps) {
                const auto& cu = cum[size_t(st.site)];
                double u = st.rng.uniform();
                if (pdeath[size_t(st.site)] > 0.0 && u >= 1.0 - pdeath[size_t(st.site)]) {
                    st.alive = false;
                    break;
                }
                size_t k = cu.size() - 1;
                for (size_t q = 0; q + 1 < cu.size(); ++q)
                    if (u < cu[q]) { k = q; break; }
                const auto& dd = step_d[size_t(st.site)][k];
                for (int a = 0; a < T.dim; ++a) st.disp[size_t(a)] += dd[size_t(a)];
                st.site = T.graph.nbr[size_t(st.site)][k];
                ++st.jumps;
                if (!ret && st.at_unwrapped_origin()) ret = true;
                while (ck < checkpoints.size() && st.jumps == checkpoints[ck]) {
                    msd_sum[ck] += st.disp2();
                    msd_sum2[ck] += st.disp2() * st.disp2();
                    ++msd_n[ck];
                    ++ck;
                }
            }
            WalkerRecord rec;
            rec.env = e;
            rec.walker = w;
            rec.jumps = st.jumps;
            rec.disp2 = st.disp2();
            if (ret) {
                rec.outcome = "returned";
                ++out.returned;
                ++env_returns;
            } else if (!st.alive) {
                rec.outcome = "died";
            } else {
                rec.outcome = "exhausted";
            }
            if (!st.alive) {
                ++out.died;
                surv_sum += double(st.jumps);
                surv_sum2 += double(st.jumps) * double(st.jumps);
            } else if (!ret) {
                ++out.exhausted;
            }
            out.records.push_back(std::move(rec));
        }
        out.env_return.push_back(double(env_returns) / double(walkers_per_env));
    }

    const double n = double(envs.size()) * double(walkers_per_env);
    out.return_probability = double(out.returned) / n;
    out.return_stderr = std::sqrt(std::max(0.0, out.return_probability *
                                                    (1.0 - out.return_probability) / n));
    double qm = 0.0;
    for (double r : out.env_return) qm += r;
    qm /= double(out.env_return.size());
    double qv = 0.0;
    for (double r : out.env_return) qv += (r - qm) * (r - qm);
    out.quenched_spread = std::sqrt(qv / double(out.env_return.size()));
    if (out.died > 0) {
        out.mean_survival = surv_sum / double(out.died);
        double var = surv_sum2 / double(out.died) - out.mean_survival * out.mean_survival;
        out.survival_stderr = std::sqrt(std::max(0.0, var) / double(out.died));
    }
    for (size_t c = 0; c < checkpoints.size(); ++c) {
        if (msd_n[c] > 0) {
            double mean = msd_sum[c] / double(msd_n[c]);
            double var = msd_sum2[c] / double(msd_n[c]) - mean * mean;
            out.msd.push_back(mean);
            out.msd_stderr.push_back(std::sqrt(std::max(0.0, var) / double(msd_n[c])));
        } else {
            out.msd.push_back(std::numeric_limits<double>::quiet_NaN());
            out.msd_stderr.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

// ---------------------------------------------------------------- ERRW

struct ERRWState {
    int vertex = 0;
    double a = 1.0;
    long steps = 0;
    std::vector<long> edge_count;     // aligned with Graph::edges
    std::vector<long> incident_total; // per-vertex sum of incident edge counts
    Rng rng;

    ERRWState(int start, double a_, uint64_t seed) : vertex(start), a(a_), rng(seed) {}
};

inline ERRWState errw_init(const Graph& g, double a, int start, uint64_t seed) {
    if (!(a > 0.0)) throw ConfigError("errw_init: need a > 0");
    if (start < 0 || start >= g.n) throw ConfigError("errw_init: start out of range");
    if (g.nbr[size_t(start)].empty()) throw ConfigError("errw_init: start vertex has no edges");
    ERRWState st(start, a, seed);
    st.edge_count.assign(g.edges.size(), 0);
    st.incident_total.assign(size_t(g.n), 0);
    return st;
}

namespace detail {

inline size_t errw_edge_index(const Graph& g, int i, int j) {
    Edge e{std::min(i, j), std::max(i, j)};
    auto it = std::lower_bound(g.edges.begin(), g.edges.end(), e);
    if (it == g.edges.end() || !(*it == e))
        throw ConfigError("errw: pair is not an edge of the graph");
    return size_t(it - g.edges.begin());
}

} // namespace detail

// probabilities over incident edges, aligned with g.nbr[state.vertex]:
// (a + n(e)) / S_a(v),  S_a(v) = a deg(v) + sum of incident counts
inline std::vector<double> errw_next_probs(const Graph& g, const ERRWState& st) {
    const auto& nb = g.nbr[size_t(st.vertex)];
    std::vector<double> w(nb.size());
    double S = 0.0;
    long incident = 0;
    for (size_t k = 0; k < nb.size(); ++k) {
        long n = st.edge_count[detail::errw_edge_index(g, st.vertex, nb[k])];
        incident += n;
        w[k] = st.a + double(n);
        S += w[k];
    }
    // counter audit: maintained incident total must reproduce the recount
    if (incident != st.incident_total[size_t(st.vertex)])
        throw NumericalError("errw: incident-count audit failed");
    for (double& v : w) v /= S;
    return w;
}

inline void errw_step(const Graph& g, ERRWState& st) {
    std::vector<double> p = errw_next_probs(g, st); // includes the counter audit
    const auto& nb = g.nbr[size_t(st.vertex)];
    double u = st.rng.uniform(), cum = 0.0;
    size_t pick = nb.size() - 1;
    for (size_t k = 0; k < nb.size(); ++k) {
        cum += p[k];
        if (u < cum) { pick = k; break; }
    }
    int w = nb[pick];
    size_t e = detail::errw_edge_index(g, st.vertex, w);
    ++st.edge_count[e];
    ++st.incident_total[size_t(st.vertex)];
    ++st.incident_total[size_t(w)];
    st.vertex = w;
    ++st.steps;
}

struct ERRWRun {
    int final_vertex = 0;
    long steps = 0;
    std::vector<long> traversals;  // aligned with Graph::edges
    std::vector<double> fraction;  // traversals / steps
};

inline ERRWRun errw_run(const Graph& g, double a, int start, long steps, uint64_t seed) {
    if (steps < 0) throw ConfigError("errw_run: negative step count");
    ERRWState st = errw_init(g, a, start, seed);
    for (long s = 0; s < steps; ++s) errw_step(g, st);
    ERRWRun out;
    out.final_vertex = st.vertex;
    out.steps = st.steps;
    out.traversals = st.edge_count;
    out.fraction.resize(st.edge_count.size());
    for (size_t e = 0; e < st.edge_count.size(); ++e)
        out.fraction[e] = steps > 0 ? double(st.edge_count[e]) / double(steps) : 0.0;
    return out;
}

// exact probability of traversing the given edge sequence from `start`:
// product of (a + n(e))/S_a(v) with counts updated along the way; an edge not
// incident to the walker's position (or absent from the graph) gives 0
inline double errw_path_probability(const Graph& g, double a, int start,
                                    const std::vector<Edge>& path) {
    if (!(a > 0.0)) throw ConfigError("errw_path_probability: need a > 0");
    if (start < 0 || start >= g.n) throw ConfigError("errw_path_probability: start out of range");
    std::vector<long> count(g.edges.size(), 0);
    int v = start;
    double prob = 1.0;
    for (const Edge& step : path) {
        int to;
        if (step.i == v) to = step.j;
        else if (step.j == v) to = step.i;
        else return 0.0; // edge does not touch the walker
        Edge e{std::min(step.i, step.j), std::max(step.i, step.j)};
        auto it = std::lower_bound(g.edges.begin(), g.edges.end(), e);
        if (it == g.edges.end() || !(*it == e)) return 0.0; // not an edge of the graph
        size_t ei = size_t(it - g.edges.begin());
        double S = 0.0;
        for (int nb : g.nbr[size_t(v)])
            S += a + double(count[detail::errw_edge_index(g, v, nb)]);
        prob *= (a + double(count[ei])) / S;
        ++count[ei];
        v = to;
    }
    return prob;
}

} // namespace h22
