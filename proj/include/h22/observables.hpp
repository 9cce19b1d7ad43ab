#pragma once
// Ward-identity oracles and physics measurements: partition-function checks,
// the e^t and sum-rule identities, B-observables with their SUSY identities,
// the NN fluctuation bound, cosh moments, the two-point correlator C_xy, the
// sandwich forms, the B triangle inequality, and the bad-point census.
//
// Measurement hooks are pure functions of a chain configuration; anything that
// needs the auxiliary field draws a fresh conditional Gaussian s per call.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "h22/accumulator.hpp"
#include "h22/action.hpp"
#include "h22/elliptic.hpp"
#include "h22/errors.hpp"
#include "h22/lattice.hpp"
#include "h22/sampler.hpp"

namespace h22 {

// ---------------------------------------------------------------------------
// Reports

// Equality check: pass iff |measured - target| <= max(3 sigma, floor).
struct WardReport {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double error = 0.0;  // one standard error (blocking)
    long long n = 0;
    double floor = 1e-3;
    bool pass() const {
        return std::isfinite(measured) &&
               std::abs(measured - target) <= std::max(3.0 * error, floor);
    }
};

// One-sided check: pass iff measured - 3 sigma does not exceed the bound.
struct BoundReport {
    std::string name;
    double measured = 0.0;
    double error = 0.0;
    double bound = 0.0;
    long long n = 0;
    bool pass() const { return std::isfinite(measured) && measured - 3.0 * error <= bound; }
};

// Plain estimate (no target).
struct Estimate {
    std::string name;
    double mean = 0.0;
    double error = 0.0;
    long long n = 0;
};

inline const Accumulator& find_acc(const ChainResult& r, const std::string& name) {
    auto it = r.acc.find(name);
    if (it == r.acc.end()) throw ConfigError("no accumulator named '" + name + "' in chain result");
    return it->second;
}

inline WardReport ward_from(const ChainResult& r, const std::string& name, double target,
                            double floor = 1e-3) {
    const Accumulator& a = find_acc(r, name);
    return WardReport{name, a.mean(), target, a.stderror(), a.count(), floor};
}

// ---------------------------------------------------------------------------
// Log-space primitives (safe for |t| <= 300)

inline double log_cosh(double d) {
    double a = std::abs(d);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// ln B_xy with B = cosh(t_x - t_y) + (1/2)(s_x - s_y)^2 e^{t_x + t_y},
// assembled as logsumexp of the three exponentials so no factor is ever
// materialized outside log space.
inline double log_B(double tx, double ty, double sx, double sy) {
    double ds2 = (sx - sy) * (sx - sy);
    double ln2 = std::log(2.0);
    double e1 = (tx - ty) - ln2;
    double e2 = (ty - tx) - ln2;
    double e3 = ds2 > 0.0 ? std::log(0.5 * ds2) + tx + ty
                          : -std::numeric_limits<double>::infinity();
    double m = std::max(e1, std::max(e2, e3));
    return m + std::log(std::exp(e1 - m) + std::exp(e2 - m) +
                        (std::isfinite(e3) ? std::exp(e3 - m) : 0.0));
}

inline double B_of(const SiteVector& t, const SiteVector& s, int x, int y) {
    return std::exp(log_B(t[x], t[y], s[x], s[y]));
}

// ---------------------------------------------------------------------------
// Partition function by tensor-product quadrature (1- and 2-site systems)

// Integration window and panel count; lo/hi/panels auto-sized from the
// couplings when left at their defaults (NaN / 0).
struct Quadrature {
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
    int panels = 0;
    double logdet_scale = 1.0;  // corruption hook, mirrors SamplerConfig::logdet_scale
};

namespace detail {

// composite 16-point Gauss-Legendre; panel width ~1 resolves every feature of
// e^{-F} (peak widths are never below ~1/sqrt(max beta) in the tested range,
// and 16 nodes per unit panel give far more resolution than needed)
template <class F>
double integrate_gl(const F& f, double lo, double hi, int panels) {
    static const double xg[8] = {0.0950125098376374, 0.2816035507792589,
                                 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double wg[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double total = 0.0;
    double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        double a = lo + p * h, mid = a + 0.5 * h, half = 0.5 * h;
        double acc = 0.0;
        for (int k = 0; k < 8; ++k)
            acc += wg[k] * (f(mid - half * xg[k]) + f(mid + half * xg[k]));
        total += half * acc;
    }
    return total;
}

inline void auto_window(const CouplingMap& c, const Quadrature& q, double& lo, double& hi,
                        int& panels) {
    double eps_min = *std::min_element(c.eps_site.begin(), c.eps_site.end());
    double L = std::log(1.0 + 2.0 / eps_min);
    lo = std::isfinite(q.lo) ? q.lo : -(L + 12.0);
    hi = std::isfinite(q.hi) ? q.hi : 0.5 * L + 8.0;
    panels = q.panels > 0 ? q.panels : std::max(16, int(hi - lo));
}

// F evaluated from its defining pieces with the spanning-forest determinant
// standing in for the factorization log-determinant (exact for these tiny
// systems, and orders of magnitude cheaper inside a tensor quadrature);
// agreement with effective_action() is asserted by the test suite.
inline double action_total_smallN(const Graph& g, const CouplingMap& c, const SiteVector& t,
                                  double logdet_scale = 1.0) {
    double F = 0.0;
    for (size_t e = 0; e < g.edges.size(); ++e)
        F += c.beta_edge[e] * (std::cosh(t[g.edges[e].i] - t[g.edges[e].j]) - 1.0);
    for (int k = 0; k < g.n; ++k)
        F += t[k] - c.eps_site[size_t(k)] + c.eps_site[size_t(k)] * std::cosh(t[k]);
    F -= 0.5 * logdet_scale * std::log(matrix_tree_det(g, c, t));
    return F;
}

}  // namespace detail

// Integral of e^{-F} prod_k dt_k / sqrt(2 pi); equals 1 exactly for every
// beta >= 0, eps > 0. Refuses N > 2 (tensor-product quadrature only).
inline double brute_force_Z(const Graph& g, const CouplingMap& c, const Quadrature& q = {}) {
    c.validate(g);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
    double lo, hi;
    int panels;
    detail::auto_window(c, q, lo, hi, panels);
    if (g.n == 1) {
        SiteVector t(1);
        auto f = [&](double t0) {
            t[0] = t0;
            return std::exp(-detail::action_total_smallN(g, c, t, q.logdet_scale)) * inv_sqrt_2pi;
        };
        return detail::integrate_gl(f, lo, hi, panels);
    }
    if (g.n == 2) {
        SiteVector t(2);
        auto outer = [&](double t0) {
            auto f = [&](double t1) {
                t[0] = t0;
                t[1] = t1;
                return std::exp(-detail::action_total_smallN(g, c, t, q.logdet_scale)) *
                       inv_sqrt_2pi * inv_sqrt_2pi;
            };
            return detail::integrate_gl(f, lo, hi, panels);
        };
        return detail::integrate_gl(outer, lo, hi, panels);
    }
    throw ConfigError("brute_force_Z: tensor-product quadrature supports at most 2 sites");
}

inline double brute_force_Z(const Torus& T, const CouplingMap& c, const Quadrature& q = {}) {
    return brute_force_Z(T.graph, c, q);
}

// ---------------------------------------------------------------------------
// Hook name helpers (names double as CSV file stems: [a-z0-9_.-] only)

namespace detail {

inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s(buf);
    for (char& ch : s)
        if (ch == '+') ch = 'p';
        else if (ch == '-') ch = 'm';
        else if (ch == '.') ch = '_';
    return s;
}

inline std::string pair_tag(const std::vector<std::pair<int, int>>& pairs) {
    std::string s;
    for (const auto& p : pairs)
        s += "_" + std::to_string(p.first) + "." + std::to_string(p.second);
    return s;
}

}  // namespace detail

inline std::string exp_t_name(int x) { return "exp_t_" + std::to_string(x); }
inline std::string sum_rule_name(int x) { return "sum_rule_" + std::to_string(x); }
inline std::string wi_name(const std::vector<std::pair<int, int>>& pairs, double m) {
    return "wi_m" + detail::fmt_g(m) + detail::pair_tag(pairs);
}
inline std::string nn_bound_name(const std::vector<std::pair<int, int>>& pairs, double gamma) {
    return "nnb_g" + detail::fmt_g(gamma) + detail::pair_tag(pairs);
}
inline std::string cosh_pair_name(int x, int y, double m) {
    return "cosh_m" + detail::fmt_g(m) + "_" + std::to_string(x) + "." + std::to_string(y);
}
inline std::string cosh_site_name(int x, double p) {
    return "cosht_p" + detail::fmt_g(p) + "_" + std::to_string(x);
}
inline std::string C_entry_name(int x, int y) {
    return "C_" + std::to_string(x) + "." + std::to_string(y);
}
inline std::string C_row_min_name(int x) { return "C_row_min_" + std::to_string(x); }
inline std::string sandwich_name(int x) { return "fCf_" + std::to_string(x); }
inline std::string bad_cube_name(int n) { return "bad_cube_n" + std::to_string(n); }

// ---------------------------------------------------------------------------
// Measurement hooks

// <e^{t_x}> = 1 exactly, any couplings.
inline Hook hook_exp_t(int x) {
    return Hook{exp_t_name(x), [x](ChainState& st) {
                    if (x < 0 || x >= st.graph().n) throw ConfigError("hook_exp_t: site out of range");
                    return std::exp(st.t()[x]);
                }};
}

// eps sum_y e^{t_x + t_y} D^{-1}(x, y); target 1 for uniform eps.
inline Hook hook_sum_rule(int x) {
    return Hook{sum_rule_name(x), [x](ChainState& st) {
                    const CouplingMap& c = st.couplings();
                    for (double e : c.eps_site)
                        if (e != c.eps_site.front())
                            throw ConfigError("hook_sum_rule: requires uniform eps");
                    int n = st.graph().n;
                    if (x < 0 || x >= n) throw ConfigError("hook_sum_rule: site out of range");
                    const SiteVector& t = st.t();
                    const Eigen::MatrixXd& G = st.inverse();
                    double acc = 0.0;
                    for (int y = 0; y < n; ++y) acc += std::exp(t[y]) * G(x, y);
                    return c.eps_site[0] * std::exp(t[x]) * acc;
                }};
}

namespace detail {

// [ (delta_x - delta_y); G (delta_x - delta_y) ] from the dense inverse.
inline double difference_form(const Eigen::MatrixXd& G, int x, int y) {
    return G(x, x) + G(y, y) - 2.0 * G(x, y);
}

}  // namespace detail

// SUSY identity. One pair: B^m (1 - m G_xy) with
//   G_xy = e^{t_x + t_y} [ (dx - dy); D^{-1} (dx - dy) ] / B_xy.
// n pairs: prod_i B_i^m * det(1 - m script-G) with
//   script-G_ij = [ g_i; D^{-1} g_j ],  g_i = B_i^{-1/2} e^{(t_xi + t_yi)/2} (dx_i - dy_i).
// Target 1 exactly. All B factors handled in log space.
inline Hook hook_B_identity(std::vector<std::pair<int, int>> pairs, double m) {
    std::string name = wi_name(pairs, m);
    return Hook{name, [pairs = std::move(pairs), m](ChainState& st) -> double {
                    int nsite = st.graph().n;
                    for (const auto& p : pairs)
                        if (p.first < 0 || p.first >= nsite || p.second < 0 || p.second >= nsite ||
                            p.first == p.second)
                            throw ConfigError("hook_B_identity: bad pair");
                    if (m == 0.0) return 1.0;
                    const SiteVector& t = st.t();
                    SiteVector s = st.sample_s();
                    const Eigen::MatrixXd& G = st.inverse();
                    int np = int(pairs.size());
                    std::vector<double> lnB(static_cast<size_t>(np));
                    for (int i = 0; i < np; ++i)
                        lnB[size_t(i)] = log_B(t[pairs[size_t(i)].first], t[pairs[size_t(i)].second],
                                               s[pairs[size_t(i)].first], s[pairs[size_t(i)].second]);
                    double val;
                    if (np == 1) {
                        int x = pairs[0].first, y = pairs[0].second;
                        double q = detail::difference_form(G, x, y);
                        // G_xy = exp(t_x + t_y + ln q - ln B); q > 0 since D^{-1} is PD
                        double Gxy = q > 0.0 ? std::exp(t[x] + t[y] + std::log(q) - lnB[0]) : 0.0;
                        val = std::exp(m * lnB[0]) * (1.0 - m * Gxy);
                    } else {
                        Eigen::MatrixXd script(np, np);
                        for (int i = 0; i < np; ++i)
                            for (int j = i; j < np; ++j) {
                                int xi = pairs[size_t(i)].first, yi = pairs[size_t(i)].second;
                                int xj = pairs[size_t(j)].first, yj = pairs[size_t(j)].second;
                                double comb = G(xi, xj) - G(xi, yj) - G(yi, xj) + G(yi, yj);
                                double pref = 0.5 * (t[xi] + t[yi] + t[xj] + t[yj]) -
                                              0.5 * (lnB[size_t(i)] + lnB[size_t(j)]);
                                double v = comb == 0.0
                                               ? 0.0
                                               : (comb > 0.0 ? std::exp(pref + std::log(comb))
                                                             : -std::exp(pref + std::log(-comb)));
                                script(i, j) = v;
                                script(j, i) = v;
                            }
                        Eigen::MatrixXd A =
                            Eigen::MatrixXd::Identity(np, np) - m * script;
                        double lnBsum = 0.0;
                        for (double lb : lnB) lnBsum += lb;
                        val = std::exp(m * lnBsum) * A.determinant();
                    }
                    if (!std::isfinite(val)) {
                        std::string msg = "hook_B_identity: non-finite value; t =";
                        for (const auto& p : pairs)
                            msg += " (" + std::to_string(t[p.first]) + "," +
                                   std::to_string(t[p.second]) + ")";
                        throw NumericalError(msg);
                    }
                    return val;
                }};
}

// exp(beta gamma sum_j (B_j - 1)) for NN pairs at uniform beta.
inline Hook hook_nn_bound(std::vector<std::pair<int, int>> pairs, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("hook_nn_bound: need 0 < gamma < 1");
    std::string name = nn_bound_name(pairs, gamma);
    return Hook{name, [pairs = std::move(pairs), gamma](ChainState& st) -> double {
                    const CouplingMap& c = st.couplings();
                    if (c.beta_edge.empty() || !c.uniform_beta() || c.beta_edge.front() <= 0.0)
                        throw ConfigError("hook_nn_bound: requires uniform positive beta");
                    double beta = c.beta_edge.front();
                    const Graph& g = st.graph();
                    for (const auto& p : pairs)
                        if (!std::binary_search(g.nbr[size_t(p.first)].begin(),
                                                g.nbr[size_t(p.first)].end(), p.second))
                            throw ConfigError("hook_nn_bound: pair is not an edge");
                    const SiteVector& t = st.t();
                    SiteVector s = st.sample_s();
                    double expo = 0.0;
                    for (const auto& p : pairs)
                        expo += std::exp(log_B(t[p.first], t[p.second], s[p.first], s[p.second])) - 1.0;
                    double val = std::exp(beta * gamma * expo);
                    if (!std::isfinite(val))
                        throw NumericalError("hook_nn_bound: non-finite value at beta*gamma*sum = " +
                                             std::to_string(beta * gamma * expo));
                    return val;
                }};
}

// cosh^m(t_x - t_y), log-space.
inline Hook hook_cosh_pair(int x, int y, double m) {
    return Hook{cosh_pair_name(x, y, m), [x, y, m](ChainState& st) {
                    if (m == 0.0 || x == y) return 1.0;
                    return std::exp(m * log_cosh(st.t()[x] - st.t()[y]));
                }};
}

// cosh^p(t_x), log-space.
inline Hook hook_cosh_site(int x, double p) {
    return Hook{cosh_site_name(x, p), [x, p](ChainState& st) {
                    if (p == 0.0) return 1.0;
                    return std::exp(p * log_cosh(st.t()[x]));
                }};
}

// Per-configuration C entry e^{t_x + t_y} D^{-1}(x, y) (positive pointwise).
inline Hook hook_C_entry(int x, int y) {
    return Hook{C_entry_name(x, y), [x, y](ChainState& st) {
                    const SiteVector& t = st.t();
                    return std::exp(t[x] + t[y]) * st.inverse()(x, y);
                }};
}

// Minimum over y of the per-configuration C row at x; the chain minimum of
// this hook certifies pointwise positivity on every sampled configuration.
inline Hook hook_C_row_min(int x) {
    return Hook{C_row_min_name(x), [x](ChainState& st) {
                    const SiteVector& t = st.t();
                    const Eigen::MatrixXd& G = st.inverse();
                    int n = st.graph().n;
                    double mn = std::numeric_limits<double>::infinity();
                    for (int y = 0; y < n; ++y)
                        mn = std::min(mn, std::exp(t[x] + t[y]) * G(x, y));
                    return mn;
                }};
}

// [f; C f] per configuration: v^T D^{-1} v with v = f .* e^t.
inline Hook hook_sandwich_form(const SiteVector& f, int x) {
    if ((f.array() < 0.0).any())
        throw ConfigError("hook_sandwich_form: f must be nonnegative");
    return Hook{sandwich_name(x), [f](ChainState& st) {
                    if (f.size() != st.graph().n)
                        throw ConfigError("hook_sandwich_form: f has wrong size");
                    SiteVector v = f.array() * st.t().array().exp();
                    return double(v.dot(st.inverse() * v));
                }};
}

// ---------------------------------------------------------------------------
// Report builders over finished chains

inline WardReport ward_exp_t(const ChainResult& r, int x) {
    return ward_from(r, exp_t_name(x), 1.0);
}

inline WardReport ward_sum_rule(const ChainResult& r, int x) {
    return ward_from(r, sum_rule_name(x), 1.0);
}

inline WardReport ward_B_identity(const ChainResult& r,
                                  const std::vector<std::pair<int, int>>& pairs, double m) {
    return ward_from(r, wi_name(pairs, m), 1.0);
}

inline BoundReport nn_bound_check(const ChainResult& r,
                                  const std::vector<std::pair<int, int>>& pairs, double gamma) {
    const Accumulator& a = find_acc(r, nn_bound_name(pairs, gamma));
    double bound = std::pow(1.0 - gamma, -double(pairs.size()));
    return BoundReport{nn_bound_name(pairs, gamma), a.mean(), a.stderror(), bound, a.count()};
}

inline BoundReport cosh_moment(const ChainResult& r, int x, int y, double m) {
    const Accumulator& a = find_acc(r, cosh_pair_name(x, y, m));
    return BoundReport{cosh_pair_name(x, y, m), a.mean(), a.stderror(), 2.0, a.count()};
}

inline BoundReport cosh_site_moment(const ChainResult& r, int x, double p) {
    const Accumulator& a = find_acc(r, cosh_site_name(x, p));
    return BoundReport{cosh_site_name(x, p), a.mean(), a.stderror(), 2.5, a.count()};
}

inline Estimate correlation_C(const ChainResult& r, int x, int y) {
    const Accumulator& a = find_acc(r, C_entry_name(x, y));
    return Estimate{C_entry_name(x, y), a.mean(), a.stderror(), a.count()};
}

// ---------------------------------------------------------------------------
// Sandwich forms: K'^{-1} [ft; G0 ft] <= [f; Cf] <= K [f; Gt0 f]
// with G0 = (-beta Laplace + eps)^{-1}, Gt0 = (-beta Laplace + eps/2)^{-1} and
// ft(j) = (1 + |j - x|^alpha)^{-1} f(j). Constants are reported, not asserted.

struct SandwichReport {
    double fCf = 0.0;
    double fCf_error = 0.0;
    double f_Gtilde_f = 0.0;   // [f; Gt0 f]
    double ftilde_G0_ftilde = 0.0;  // [ft; G0 ft]
    double Khat = 0.0;         // [f; Cf] / [f; Gt0 f]
    double Khat_prime = 0.0;   // [ft; G0 ft] / [f; Cf]
    long long n = 0;
    bool pass() const {
        return std::isfinite(fCf) && fCf > 0.0 && f_Gtilde_f > 0.0 && ftilde_G0_ftilde > 0.0 &&
               std::isfinite(Khat) && Khat > 0.0 && std::isfinite(Khat_prime) && Khat_prime > 0.0;
    }
};

inline SandwichReport sandwich_check(const ChainResult& r, const Torus& T, const CouplingMap& c,
                                     const SiteVector& f, int x, double alpha) {
    if ((f.array() < 0.0).any()) throw ConfigError("sandwich_check: f must be nonnegative");
    if (f.size() != T.graph.n) throw ConfigError("sandwich_check: f has wrong size");
    const Accumulator& a = find_acc(r, sandwich_name(x));

    SiteVector zero = SiteVector::Zero(T.graph.n);
    Factorization G0(assemble(T, c, zero));
    CouplingMap ch = c;
    for (double& e : ch.eps_site) e *= 0.5;
    Factorization Gt0(assemble(T, ch, zero));

    SiteVector ft(T.graph.n);
    for (int j = 0; j < T.graph.n; ++j)
        ft[j] = f[j] / (1.0 + std::pow(torus_distance_euclid(T, x, j), alpha));

    SandwichReport rep;
    rep.fCf = a.mean();
    rep.fCf_error = a.stderror();
    rep.n = a.count();
    rep.f_Gtilde_f = f.dot(Gt0.solve(f));
    rep.ftilde_G0_ftilde = ft.dot(G0.solve(ft));
    rep.Khat = rep.fCf / rep.f_Gtilde_f;
    rep.Khat_prime = rep.ftilde_G0_ftilde / rep.fCf;
    return rep;
}

// ---------------------------------------------------------------------------
// Triangle inequality for B (hyperbolic law of cosines): B_xy < 2 B_xc B_cy.

inline double triangle_log_margin(const SiteVector& t, const SiteVector& s, int x, int y, int c) {
    return std::log(2.0) + log_B(t[x], t[c], s[x], s[c]) + log_B(t[c], t[y], s[c], s[y]) -
           log_B(t[x], t[y], s[x], s[y]);
}

inline bool triangle_check_B(const SiteVector& t, const SiteVector& s, int x, int y, int c) {
    return triangle_log_margin(t, s, x, y, c) > 0.0;
}

// ---------------------------------------------------------------------------
// Bad-point census. A point x is n-good when B_xy <= a |x - y|^alpha for every
// y at Euclidean distance in [1, 4^n]; the census estimates the probability
// that the cube of side 4^n at the origin contains no n-good point, against
// the reference curve 2^{-(n+1) alpha m}.

inline bool is_n_good(const Torus& T, const SiteVector& t, const SiteVector& s, double a,
                      double alpha, int n, int x) {
    double rad = std::pow(4.0, n);
    double lna = std::log(a);
    for (int y = 0; y < T.graph.n; ++y) {
        if (y == x) continue;
        double d = torus_distance_euclid(T, x, y);
        if (d < 1.0 || d > rad) continue;
        if (log_B(t[x], t[y], s[x], s[y]) > lna + alpha * std::log(d)) return false;
    }
    return true;
}

inline double bad_cube_indicator(const Torus& T, const SiteVector& t, const SiteVector& s,
                                 double a, double alpha, int n) {
    long side = 1;
    for (int k = 0; k < n; ++k) side *= 4;
    if (side > T.side) throw ConfigError("bad_cube_indicator: cube side exceeds lattice side");
    for (int x = 0; x < T.graph.n; ++x) {
        auto cc = T.coords(x);
        bool inside = true;
        for (int ax = 0; ax < T.dim; ++ax)
            if (cc[size_t(ax)] >= side) inside = false;
        if (!inside) continue;
        if (is_n_good(T, t, s, a, alpha, n, x)) return 0.0;
    }
    return 1.0;
}

inline Hook hook_bad_cube(const Torus& T, double a, double alpha, int n) {
    return Hook{bad_cube_name(n), [T, a, alpha, n](ChainState& st) {
                    if (T.graph.n != st.graph().n)
                        throw ConfigError("hook_bad_cube: torus does not match chain");
                    SiteVector s = st.sample_s();
                    return bad_cube_indicator(T, st.t(), s, a, alpha, n);
                }};
}

inline double census_reference(int n, double alpha, double m) {
    return std::pow(2.0, -double(n + 1) * alpha * m);
}

struct CensusEntry {
    int n = 0;
    double freq = 0.0;
    double error = 0.0;
    long long count = 0;
    double reference = 0.0;
};

// Frequency table over scales n = 0..n_max from bad-cube hooks in the result.
inline std::vector<CensusEntry> bad_point_census(const ChainResult& r, int n_max, double alpha,
                                                 double m) {
    std::vector<CensusEntry> table;
    for (int n = 0; n <= n_max; ++n) {
        const Accumulator& a = find_acc(r, bad_cube_name(n));
        table.push_back(CensusEntry{n, a.mean(), a.stderror(), a.count(),
                                    census_reference(n, alpha, m)});
    }
    return table;
}

}  // namespace h22
