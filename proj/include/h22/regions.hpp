// Delta-admissible diamond (double-cone) regions around a site pair, Poincare
// constants of their Neumann Laplacians, Neumann Green's functions with
// zero-mode deflation, and the local conductance bound
//   A_xy(ij) = B_xy e^{-t_x-t_y} e^{t_i+t_j},  A^{-1} <= 8 cosh(t_i-t_z)cosh(t_j-t_z).
#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "h22/elliptic.hpp"
#include "h22/errors.hpp"
#include "h22/lattice.hpp"
#include "h22/observables.hpp"
#include "h22/rng.hpp"

namespace h22 {

// Double cone about the segment x->y in the wrapped Euclidean metric, with
// near-endpoint balls of radius min(10,|x-y|) guaranteeing NN-connectedness
// (at small separations the balls dominate and the half-angle never binds).
// delta is the achieved volume-growth constant: vol{R_z(r)} >= delta r^3 for
// all 1 <= r <= max(1, |x-y|/sqrt(2)) and z in {x,y}.
struct DiamondRegion {
    int x = -1, y = -1;
    double theta = 0.0;      // opening half-angle
    double separation = 0.0; // wrapped Euclidean |x-y|
    double cap = 0.0;        // shell radius |x-y|/sqrt(2)
    double delta = 0.0;      // achieved admissibility constant
    std::vector<int> sites;  // sorted, contains x and y
    std::vector<int> Rx, Ry; // shells: region sites with 1 <= |j-z| <= cap
    std::vector<double> dist_x, dist_y; // sorted |j-z| over region sites j != z

    bool contains(int j) const { return std::binary_search(sites.begin(), sites.end(), j); }

    // vol{R_z(r)} = #{j in region : 1 <= |j-z| <= r}
    int vol(int z, double r) const {
        const std::vector<double>* ds = nullptr;
        if (z == x) ds = &dist_x;
        else if (z == y) ds = &dist_y;
        else throw ConfigError("DiamondRegion::vol: z must be an endpoint");
        return int(std::upper_bound(ds->begin(), ds->end(), r + 1e-9) - ds->begin());
    }
};

namespace detail {

inline double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// one greedy lattice step from cur toward target: largest wrapped component
// first, smallest axis on ties (deterministic staircase)
inline int step_toward(const Torus& T, int cur, int target) {
    auto cc = T.coords(cur), ct = T.coords(target);
    int axis = -1, mag = 0, sgn = 0;
    for (int a = 0; a < T.dim; ++a) {
        int d = T.wrap_delta(ct[a] - cc[a]);
        if (std::abs(d) > mag) { mag = std::abs(d); axis = a; sgn = d > 0 ? 1 : -1; }
    }
    return axis < 0 ? cur : T.shift(cur, axis, sgn);
}

inline std::vector<char> reach_in_mask(const Torus& T, const std::vector<char>& mask, int root) {
    std::vector<char> vis(mask.size(), 0);
    std::queue<int> q;
    vis[size_t(root)] = 1;
    q.push(root);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : T.graph.nbr[v])
            if (mask[size_t(w)] && !vis[size_t(w)]) { vis[size_t(w)] = 1; q.push(w); }
    }
    return vis;
}

// largest delta with count(<=r) >= delta r^3 for all r in [1, rmax], given the
// sorted distance multiset restricted to <= rmax (conservative at ties)
inline double volume_envelope(const std::vector<double>& ds, double rmax) {
    if (ds.empty() || ds.front() > 1.0 + 1e-9) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < ds.size(); ++k) {
        double rnext = (k + 1 < ds.size()) ? std::min(ds[k + 1], rmax) : rmax;
        rnext = std::max(rnext, std::max(ds[k], 1.0));
        best = std::min(best, double(k + 1) / (rnext * rnext * rnext));
    }
    return best;
}

} // namespace detail

inline DiamondRegion build_diamond(const Torus& T, int x, int y, double theta) {
    if (T.dim != 3) throw ConfigError("build_diamond: torus must be 3-dimensional");
    if (x < 0 || x >= T.num_sites || y < 0 || y >= T.num_sites)
        throw ConfigError("build_diamond: endpoint out of range");
    if (x == y) throw ConfigError("build_diamond: endpoints coincide");
    if (!(theta >= M_PI / 10.0 - 1e-12 && theta <= M_PI / 2.0 + 1e-12))
        throw ConfigError("build_diamond: half-angle must lie in [pi/10, pi/2]");
    const double d = torus_distance_euclid(T, x, y);
    if (d > T.side / 2.0 + 1e-9)
        throw ConfigError("build_diamond: separation exceeds L/2 (cone self-overlaps around the torus)");

    const double cap = d / std::sqrt(2.0);
    const double r0 = std::min(10.0, d); // connectivity ball radius
    const double cth = std::cos(theta);
    const int N = T.num_sites;
    std::vector<char> mask(size_t(N), 0);
    mask[size_t(x)] = mask[size_t(y)] = 1;
    for (int j = 0; j < N; ++j) {
        if (j == x || j == y) continue;
        auto ux = torus_displacement(T, x, j);
        auto uy = torus_displacement(T, y, j);
        double dx = detail::norm3(ux), dy = detail::norm3(uy);
        int z = (dx <= dy) ? x : y, other = (dx <= dy) ? y : x;
        double dz = std::min(dx, dy);
        const auto& u = (dx <= dy) ? ux : uy;
        if (dz > cap + 1e-9) continue;
        bool in = dz <= r0 + 1e-9;
        if (!in) {
            auto ax = torus_displacement(T, z, other);
            double dot = u[0] * ax[0] + u[1] * ax[1] + u[2] * ax[2];
            in = dot >= cth * dz * d - 1e-9; // angle(jz, z->other) <= theta
        }
        if (in) mask[size_t(j)] = 1;
    }

    // canonical staircase spine between the endpoints (argument-order independent)
    const int a = std::min(x, y), b = std::max(x, y);
    for (int cur = a; cur != b;) {
        cur = detail::step_toward(T, cur, b);
        mask[size_t(cur)] = 1;
    }
    // connect any stray components by greedy staircases toward the spine root
    for (int guard = 0; guard < N; ++guard) {
        auto vis = detail::reach_in_mask(T, mask, a);
        int bad = -1;
        for (int s = 0; s < N; ++s)
            if (mask[size_t(s)] && !vis[size_t(s)]) { bad = s; break; }
        if (bad < 0) break;
        for (int cur = bad; !vis[size_t(cur)];) {
            cur = detail::step_toward(T, cur, a);
            mask[size_t(cur)] = 1;
        }
    }

    DiamondRegion R;
    R.x = x;
    R.y = y;
    R.theta = theta;
    R.separation = d;
    R.cap = cap;
    for (int s = 0; s < N; ++s)
        if (mask[size_t(s)]) R.sites.push_back(s);

    const double rmax = std::max(cap, 1.0);
    std::vector<double> env_x, env_y;
    for (int j : R.sites) {
        if (j != x) {
            double dj = torus_distance_euclid(T, x, j);
            R.dist_x.push_back(dj);
            if (dj <= rmax + 1e-9) env_x.push_back(dj);
            if (dj >= 1.0 - 1e-9 && dj <= cap + 1e-9) R.Rx.push_back(j);
        }
        if (j != y) {
            double dj = torus_distance_euclid(T, y, j);
            R.dist_y.push_back(dj);
            if (dj <= rmax + 1e-9) env_y.push_back(dj);
            if (dj >= 1.0 - 1e-9 && dj <= cap + 1e-9) R.Ry.push_back(j);
        }
    }
    std::sort(R.dist_x.begin(), R.dist_x.end());
    std::sort(R.dist_y.begin(), R.dist_y.end());
    std::sort(env_x.begin(), env_x.end());
    std::sort(env_y.begin(), env_y.end());
    R.delta = std::min(detail::volume_envelope(env_x, rmax), detail::volume_envelope(env_y, rmax));
    return R;
}

// 1/lambda_2 of the Neumann graph Laplacian on the induced subgraph.  Dense
// eigensolve up to 4096 sites; deflated inverse iteration beyond.
inline double poincare_constant(const Graph& host, const std::vector<int>& R) {
    if (R.empty()) throw ConfigError("poincare_constant: empty region");
    std::vector<int> sorted(R);
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> inv(size_t(host.n), -1);
    for (size_t r = 0; r < sorted.size(); ++r) {
        if (sorted[r] < 0 || sorted[r] >= host.n || inv[size_t(sorted[r])] != -1)
            throw ConfigError("poincare_constant: bad region");
        inv[size_t(sorted[r])] = int(r);
    }
    const int m = int(sorted.size());
    if (m < 2) throw ConfigError("poincare_constant: need at least 2 sites");
    std::vector<Edge> es;
    for (const auto& e : host.edges) {
        int i = inv[size_t(e.i)], j = inv[size_t(e.j)];
        if (i >= 0 && j >= 0) es.push_back({std::min(i, j), std::max(i, j)});
    }
    Graph g = Graph::from_edges(m, std::move(es));
    if (!g.connected()) throw ConfigError("poincare_constant: region not NN-connected");

    if (m <= 4096) {
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
        for (const auto& e : g.edges) {
            L(e.i, e.i) += 1.0;
            L(e.j, e.j) += 1.0;
            L(e.i, e.j) -= 1.0;
            L(e.j, e.i) -= 1.0;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2;
        es2.compute(L, Eigen::EigenvaluesOnly);
        if (es2.info() != Eigen::Success) throw NumericalError("poincare_constant: eigensolve failed");
        double lam2 = es2.eigenvalues()[1];
        if (!(lam2 > 1e-12)) throw NumericalError("poincare_constant: lambda_2 not positive");
        return 1.0 / lam2;
    }

    // inverse iteration on the mean-zero subspace (L is the eps = 0, t = 0,
    // beta = 1 operator, i.e. the unweighted Laplacian of g)
    EllipticOperator lap = assemble(g, CouplingMap::uniform(g, 1.0, 0.0), SiteVector::Zero(m));
    DeflatedFactorization DF(lap);
    Rng rng(0x9e3779b97f4a7c15ull);
    SiteVector v(m);
    for (int i = 0; i < m; ++i) v[i] = rng.uniform(-1.0, 1.0);
    v.array() -= v.mean();
    v /= v.norm();
    double rq = lap.quadratic_form(v), prev = -1.0;
    for (int it = 0; it < 2000; ++it) {
        SiteVector w = DF.solve(v);
        double nw = w.norm();
        if (!(nw > 0.0)) throw NumericalError("poincare_constant: inverse iteration collapsed");
        v = w / nw;
        prev = rq;
        rq = lap.quadratic_form(v);
        if (it > 4 && std::abs(rq - prev) <= 1e-12 * rq) break;
    }
    if (!(rq > 1e-12)) throw NumericalError("poincare_constant: lambda_2 not positive");
    return 1.0 / rq;
}

inline double poincare_constant(const Torus& T, const DiamondRegion& R) {
    return poincare_constant(T.graph, R.sites);
}

// Constructive check of the Neumann comparison chain 0 <= G_xy <= G^N_xy and
// the beta-scaling of the Neumann bound, under the growth hypothesis
// cosh(t_j - t_z) <= a|j-z|^alpha on both shells.
struct BoundChainReport {
    bool hypothesis_ok = true;
    int violating_site = -1;     // first offending site (host index), -1 if none
    int violating_endpoint = -1; // endpoint whose shell failed
    double violating_value = 0.0, violating_allowed = 0.0;
    double G = std::numeric_limits<double>::quiet_NaN();
    double GN = std::numeric_limits<double>::quiet_NaN();
    double beta = 0.0;
    double beta_times_GN = std::numeric_limits<double>::quiet_NaN();
    bool chain_ok = false;

    bool pass() const {
        return hypothesis_ok && chain_ok && std::isfinite(G) && std::isfinite(GN);
    }
    std::string message() const {
        char buf[160];
        if (!hypothesis_ok) {
            std::snprintf(buf, sizeof buf,
                          "hypothesis violated at site %d (endpoint %d): cosh = %.6g > allowed %.6g",
                          violating_site, violating_endpoint, violating_value, violating_allowed);
            return buf;
        }
        std::snprintf(buf, sizeof buf, "G = %.6g <= G_N = %.6g, beta*G_N = %.6g%s", G, GN,
                      beta_times_GN, chain_ok ? "" : " [CHAIN VIOLATED]");
        return buf;
    }
};

inline BoundChainReport greens_bound_check(const Torus& T, const DiamondRegion& R, const SiteVector& t,
                                       double a, double alpha, double beta, double eps) {
    if (!(a > 1.0)) throw ConfigError("greens_bound_check: need a > 1");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("greens_bound_check: need 0 < alpha < 1/2");
    if (!(beta > 0.0)) throw ConfigError("greens_bound_check: need beta > 0");
    if (!(eps > 0.0)) throw ConfigError("greens_bound_check: need eps > 0");
    if (t.size() != T.num_sites) throw ConfigError("greens_bound_check: t size mismatch");

    BoundChainReport rep;
    rep.beta = beta;
    for (int pass_z = 0; pass_z < 2; ++pass_z) {
        int z = pass_z == 0 ? R.x : R.y;
        const auto& shell = pass_z == 0 ? R.Rx : R.Ry;
        for (int j : shell) {
            double dz = torus_distance_euclid(T, z, j);
            double allowed = a * std::pow(dz, alpha);
            double val = std::cosh(t[j] - t[z]);
            if (val > allowed * (1.0 + 1e-12) + 1e-12) {
                rep.hypothesis_ok = false;
                rep.violating_site = j;
                rep.violating_endpoint = z;
                rep.violating_value = val;
                rep.violating_allowed = allowed;
                return rep; // hypothesis violated: stop before the solves
            }
        }
    }

    SiteVector v = SiteVector::Zero(T.num_sites);
    v[R.x] = 1.0;
    v[R.y] = -1.0;
    Factorization F(assemble(T, CouplingMap::uniform(T.graph, beta, eps), t));
    double pref = std::exp(t[R.x] + t[R.y]) / std::cosh(t[R.x] - t[R.y]);
    rep.G = pref * greens_form(F, v);

    EllipticOperator op0 = assemble(T, CouplingMap::uniform(T.graph, beta, 0.0), t);
    EllipticOperator ropN = neumann_restrict(op0, R.sites);
    DeflatedFactorization DF(ropN);
    int px = int(std::lower_bound(R.sites.begin(), R.sites.end(), R.x) - R.sites.begin());
    int py = int(std::lower_bound(R.sites.begin(), R.sites.end(), R.y) - R.sites.begin());
    SiteVector vr = SiteVector::Zero(int(R.sites.size()));
    vr[px] = 1.0;
    vr[py] = -1.0;
    rep.GN = pref * DF.greens_form(vr);
    rep.beta_times_GN = beta * rep.GN;
    rep.chain_ok = std::isfinite(rep.G) && std::isfinite(rep.GN) && rep.G >= -1e-12 &&
                   rep.G <= rep.GN * (1.0 + 1e-9) + 1e-12;
    return rep;
}

inline std::vector<BoundChainReport> greens_bound_beta_scan(const Torus& T, const DiamondRegion& R,
                                                  const SiteVector& t, double a, double alpha,
                                                  const std::vector<double>& betas, double eps) {
    std::vector<BoundChainReport> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back(greens_bound_check(T, R, t, a, alpha, b, eps));
    return out;
}

namespace detail {

inline double conductance_impl(const SiteVector& t, const SiteVector* s, int x, int y, int i, int j) {
    const int n = int(t.size());
    auto chk = [n](int k, const char* who) {
        if (k < 0 || k >= n) throw ConfigError(std::string("conductance_bound: ") + who + " out of range");
    };
    chk(x, "x");
    chk(y, "y");
    chk(i, "i");
    chk(j, "j");
    if (x == y) throw ConfigError("conductance_bound: x == y");
    if (s && s->size() != t.size()) throw ConfigError("conductance_bound: s size mismatch");
    double lnB = s ? log_B(t[x], t[y], (*s)[x], (*s)[y]) : log_cosh(t[x] - t[y]);
    double lnA = lnB - t[x] - t[y] + t[i] + t[j];
    for (int z : {x, y}) {
        double rhs = std::log(8.0) + log_cosh(t[i] - t[z]) + log_cosh(t[j] - t[z]);
        if (-lnA > rhs + 1e-9)
            throw NumericalError("conductance_bound: local conductance bound violated");
    }
    return std::exp(lnA);
}

} // namespace detail

// A_xy(ij) = B_xy e^{-t_x-t_y} e^{t_i+t_j}; verifies A^{-1} <= 8 cosh(t_i-t_z)cosh(t_j-t_z)
// for both endpoints z on every call.  Without s the B_xy s-part is zero.
inline double conductance_bound(const SiteVector& t, int x, int y, int i, int j) {
    return detail::conductance_impl(t, nullptr, x, y, i, j);
}
inline double conductance_bound(const SiteVector& t, const SiteVector& s, int x, int y, int i, int j) {
    return detail::conductance_impl(t, &s, x, y, i, j);
}

// JSON site-list export for external visualization
inline std::string region_to_json(const DiamondRegion& R) {
    std::string out = "{";
    char buf[96];
    std::snprintf(buf, sizeof buf, "\"x\":%d,\"y\":%d,\"theta\":%.17g,\"separation\":%.17g,",
                  R.x, R.y, R.theta, R.separation);
    out += buf;
    std::snprintf(buf, sizeof buf, "\"delta\":%.17g,\"sites\":[", R.delta);
    out += buf;
    for (size_t k = 0; k < R.sites.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%d", k ? "," : "", R.sites[k]);
        out += buf;
    }
    out += "]}";
    return out;
}

} // namespace h22
