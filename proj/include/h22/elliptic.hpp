#pragma once
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "errors.hpp"
#include "lattice.hpp"

namespace h22 {

using SpMat = Eigen::SparseMatrix<double>;

struct CouplingMap {
    std::vector<double> beta_edge; // aligned with Graph::edges
    std::vector<double> eps_site;

    static CouplingMap uniform(const Graph& g, double beta, double eps) {
        CouplingMap c;
        c.beta_edge.assign(g.edges.size(), beta);
        c.eps_site.assign(size_t(g.n), eps);
        return c;
    }
    bool uniform_beta() const {
        for (double b : beta_edge)
            if (b != beta_edge.front()) return false;
        return true;
    }
    double eps_total() const { return std::accumulate(eps_site.begin(), eps_site.end(), 0.0); }

    void validate(const Graph& g) const {
        if (beta_edge.size() != g.edges.size() || eps_site.size() != size_t(g.n))
            throw ConfigError("CouplingMap: size mismatch with graph");
        for (double b : beta_edge)
            if (!(b >= 0.0)) throw ConfigError("CouplingMap: beta_edge must be >= 0");
        for (double e : eps_site)
            if (!(e >= 0.0)) throw ConfigError("CouplingMap: eps_site must be >= 0");
    }
};

// D_{beta,eps}(t): off-diagonal -beta_ij e^{t_i+t_j}, diagonal
// sum_j beta_ij e^{t_i+t_j} + eps_i e^{t_i}.  Quadratic form
// [v;Dv] = sum_edges beta_ij e^{t_i+t_j}(v_i-v_j)^2 + sum_k eps_k e^{t_k} v_k^2.
struct EllipticOperator {
    Graph graph;
    CouplingMap c;
    SiteVector t;
    SpMat M;

    double quadratic_form(const SiteVector& v) const { return v.dot(M * v); }

    // refresh all entries touched by a change of t[k] (exact recompute, no drift)
    void update_site(int k, double tk) {
        t[k] = tk;
        refresh_row(k);
        for (int j : graph.nbr[k]) refresh_diag(j);
    }

    void refresh_row(int k) {
        double diag = c.eps_site[k] * std::exp(t[k]);
        for (int j : graph.nbr[k]) {
            double w = edge_weight(k, j);
            diag += w;
            M.coeffRef(k, j) = -w;
            M.coeffRef(j, k) = -w;
        }
        M.coeffRef(k, k) = diag;
    }
    void refresh_diag(int j) {
        double diag = c.eps_site[j] * std::exp(t[j]);
        for (int i : graph.nbr[j]) diag += edge_weight(i, j);
        M.coeffRef(j, j) = diag;
    }
    double edge_weight(int i, int j) const {
        return beta_of(i, j) * std::exp(t[i] + t[j]);
    }
    double beta_of(int i, int j) const {
        Edge e{std::min(i, j), std::max(i, j)};
        auto it = std::lower_bound(graph.edges.begin(), graph.edges.end(), e);
        return c.beta_edge[size_t(it - graph.edges.begin())];
    }
};

inline EllipticOperator assemble(const Graph& g, const CouplingMap& c, const SiteVector& t) {
    c.validate(g);
    if (t.size() != g.n) throw ConfigError("assemble: t size mismatch");
    for (int i = 0; i < t.size(); ++i)
        if (!std::isfinite(t[i])) throw NumericalError("assemble: non-finite t");
    EllipticOperator op{g, c, t, SpMat(g.n, g.n)};
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.n + 2 * g.edges.size());
    std::vector<double> diag(size_t(g.n));
    for (int k = 0; k < g.n; ++k) diag[size_t(k)] = c.eps_site[size_t(k)] * std::exp(t[k]);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        int i = g.edges[e].i, j = g.edges[e].j;
        double w = c.beta_edge[e] * std::exp(t[i] + t[j]);
        diag[size_t(i)] += w;
        diag[size_t(j)] += w;
        trip.emplace_back(i, j, -w);
        trip.emplace_back(j, i, -w);
    }
    for (int k = 0; k < g.n; ++k) trip.emplace_back(k, k, diag[size_t(k)]);
    op.M.setFromTriplets(trip.begin(), trip.end());
    op.M.makeCompressed();
    return op;
}

inline EllipticOperator assemble(const Torus& T, const CouplingMap& c, const SiteVector& t) {
    return assemble(T.graph, c, t);
}

// Sparse LDL^T with AMD ordering; logdet from the diagonal factor.  The
// symbolic pattern is reused across refactorizations (the chain changes t,
// never the graph).
class Factorization {
public:
    explicit Factorization(const EllipticOperator& op) {
        if (op.c.eps_total() <= 0.0 && op.graph.connected())
            throw ConfigError("Factorization: eps == 0 everywhere, operator is singular on constants");
        solver_.analyzePattern(op.M);
        refactorize(op);
    }

    void refactorize(const EllipticOperator& op) {
        n_ = int(op.M.rows());
        solver_.factorize(op.M);
        if (solver_.info() != Eigen::Success)
            throw NumericalError("Factorization: sparse LDL^T failed");
        const auto& d = solver_.vectorD();
        logdet_ = 0.0;
        for (int k = 0; k < d.size(); ++k) {
            if (!(d[k] > 0.0)) throw NumericalError("Factorization: non-positive pivot");
            logdet_ += std::log(d[k]);
        }
    }

    double logdet() const { return logdet_; }
    int size() const { return n_; }

    SiteVector solve(const SiteVector& b) const { return solver_.solve(b); }

    // z with covariance D^{-1}: z = P^T L^{-T} Dg^{-1/2} xi for iid normal xi
    SiteVector correlated_normal(const SiteVector& xi) const {
        SiteVector y = solver_.vectorD().cwiseSqrt().cwiseInverse().asDiagonal() * xi;
        y = solver_.matrixU().solve(y);
        return solver_.permutationPinv() * y;
    }

    Eigen::MatrixXd dense_inverse() const {
        Eigen::MatrixXd inv(n_, n_);
        SiteVector e = SiteVector::Zero(n_);
        for (int k = 0; k < n_; ++k) {
            e[k] = 1.0;
            inv.col(k) = solver_.solve(e);
            e[k] = 0.0;
        }
        return inv;
    }

private:
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
    double logdet_ = 0.0;
    int n_ = 0;
};

inline double logdet(const Factorization& F) { return F.logdet(); }
inline SiteVector solve(const Factorization& F, const SiteVector& b) { return F.solve(b); }

inline double greens_entry(const Factorization& F, int x, int y) {
    SiteVector e = SiteVector::Zero(F.size());
    e[y] = 1.0;
    return F.solve(e)[x];
}

inline double greens_form(const Factorization& F, const SiteVector& v) {
    return v.dot(F.solve(v));
}

// entries of D^{-1} on an explicit (row, col) pattern via per-column solves,
// solving each needed column once
inline std::vector<double> selected_inverse(const Factorization& F,
                                            const std::vector<std::pair<int, int>>& pattern) {
    std::vector<int> cols;
    cols.reserve(pattern.size());
    for (auto& p : pattern) cols.push_back(p.second);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    std::vector<SiteVector> colsol(cols.size());
    SiteVector e = SiteVector::Zero(F.size());
    for (size_t c = 0; c < cols.size(); ++c) {
        e[cols[c]] = 1.0;
        colsol[c] = F.solve(e);
        e[cols[c]] = 0.0;
    }
    std::vector<double> out;
    out.reserve(pattern.size());
    for (auto& p : pattern) {
        size_t c = size_t(std::lower_bound(cols.begin(), cols.end(), p.second) - cols.begin());
        out.push_back(colsol[c][p.first]);
    }
    return out;
}

// D~ = e^{-t} D e^{-t}; equals -beta*Lap + beta*V(t) + eps*e^{-t} for uniform beta
inline EllipticOperator conjugate_tilde(const EllipticOperator& op) {
    if (!op.c.uniform_beta())
        throw ConfigError("conjugate_tilde: requires uniform beta");
    EllipticOperator out = op;
    SiteVector s = (-op.t.array()).exp().matrix();
    out.M = s.asDiagonal() * op.M * s.asDiagonal();
    return out;
}

// det D as a sum over rooted spanning forests:
// sum_{forests F} prod_{e in F} beta_e e^{t_i+t_j} * prod_{trees C} (sum_{k in C} eps_k e^{t_k})
namespace detail {
struct Dsu {
    std::vector<int> parent, size;
    std::vector<std::pair<int, int>> hist; // (child_root, parent_root)
    explicit Dsu(int n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) const {
        while (parent[size_t(x)] != x) x = parent[size_t(x)];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a); b = find(b);
        if (a == b) return false;
        if (size[size_t(a)] < size[size_t(b)]) std::swap(a, b);
        parent[size_t(b)] = a;
        size[size_t(a)] += size[size_t(b)];
        hist.emplace_back(b, a);
        return true;
    }
    void rollback() {
        auto [b, a] = hist.back();
        hist.pop_back();
        parent[size_t(b)] = b;
        size[size_t(a)] -= size[size_t(b)];
    }
};

inline double forest_sum(const Graph& g, const std::vector<double>& ew,
                         const std::vector<double>& rootw, size_t ei, Dsu& dsu, double w) {
    if (ei == g.edges.size()) {
        // each tree may be rooted at any of its vertices: factor sum of eps e^t per component
        double prod = w;
        std::vector<double> comp(size_t(g.n), 0.0);
        for (int k = 0; k < g.n; ++k) comp[size_t(dsu.find(k))] += rootw[size_t(k)];
        for (int k = 0; k < g.n; ++k)
            if (dsu.find(k) == k) prod *= comp[size_t(k)];
        return prod;
    }
    double total = forest_sum(g, ew, rootw, ei + 1, dsu, w);
    if (dsu.unite(g.edges[ei].i, g.edges[ei].j)) {
        total += forest_sum(g, ew, rootw, ei + 1, dsu, w * ew[ei]);
        dsu.rollback();
    }
    return total;
}
} // namespace detail

inline double matrix_tree_det(const Graph& g, const CouplingMap& c, const SiteVector& t) {
    if (g.n > 8) throw ConfigError("matrix_tree_det: exhaustive enumeration limited to N <= 8");
    c.validate(g);
    std::vector<double> ew(g.edges.size()), rootw(size_t(g.n));
    for (size_t e = 0; e < g.edges.size(); ++e)
        ew[e] = c.beta_edge[e] * std::exp(t[g.edges[e].i] + t[g.edges[e].j]);
    for (int k = 0; k < g.n; ++k) rootw[size_t(k)] = c.eps_site[size_t(k)] * std::exp(t[k]);
    detail::Dsu dsu(g.n);
    return detail::forest_sum(g, ew, rootw, 0, dsu, 1.0);
}

inline double matrix_tree_det(const Torus& T, const CouplingMap& c, const SiteVector& t) {
    return matrix_tree_det(T.graph, c, t);
}

// Neumann restriction: keep edges interior to R and the eps-diagonal of R.
// R must be sorted; result indices follow R's order.
inline EllipticOperator neumann_restrict(const EllipticOperator& op, const std::vector<int>& R) {
    if (R.empty()) throw ConfigError("neumann_restrict: empty region");
    std::vector<int> inv(size_t(op.graph.n), -1);
    for (size_t r = 0; r < R.size(); ++r) {
        if (R[r] < 0 || R[r] >= op.graph.n || inv[size_t(R[r])] != -1)
            throw ConfigError("neumann_restrict: bad region");
        inv[size_t(R[r])] = int(r);
    }
    std::vector<Edge> es;
    std::vector<double> be;
    for (size_t e = 0; e < op.graph.edges.size(); ++e) {
        int i = inv[size_t(op.graph.edges[e].i)], j = inv[size_t(op.graph.edges[e].j)];
        if (i >= 0 && j >= 0) {
            es.push_back({std::min(i, j), std::max(i, j)});
            be.push_back(op.c.beta_edge[e]);
        }
    }
    Graph g = Graph::from_edges(int(R.size()), es);
    if (!g.connected()) throw ConfigError("neumann_restrict: region not NN-connected");
    // from_edges sorts; realign beta with the sorted edge order
    CouplingMap c;
    c.beta_edge.resize(g.edges.size());
    {
        std::vector<Edge> orig;
        for (auto& e : es) orig.push_back({std::min(e.i, e.j), std::max(e.i, e.j)});
        for (size_t k = 0; k < orig.size(); ++k) {
            auto it = std::lower_bound(g.edges.begin(), g.edges.end(), orig[k]);
            c.beta_edge[size_t(it - g.edges.begin())] = be[k];
        }
    }
    c.eps_site.resize(R.size());
    SiteVector tr(int(R.size()));
    for (size_t r = 0; r < R.size(); ++r) {
        c.eps_site[r] = op.c.eps_site[size_t(R[r])];
        tr[int(r)] = op.t[R[r]];
    }
    return assemble(g, c, tr);
}

// Zero-mode-deflated factorization for eps == 0 operators (kernel = constants):
// ground one site, solve the principal minor; pdet = n * det(minor) by the
// matrix-tree theorem.
class DeflatedFactorization {
public:
    explicit DeflatedFactorization(const EllipticOperator& op) : n_(op.graph.n) {
        if (op.c.eps_total() != 0.0)
            throw ConfigError("DeflatedFactorization: expects eps == 0 (use Factorization otherwise)");
        if (!op.graph.connected())
            throw ConfigError("DeflatedFactorization: graph must be connected");
        if (n_ < 2) throw ConfigError("DeflatedFactorization: need at least 2 sites");
        SpMat minor(n_ - 1, n_ - 1);
        std::vector<Eigen::Triplet<double>> trip;
        for (int col = 0; col < op.M.outerSize(); ++col)
            for (SpMat::InnerIterator it(op.M, col); it; ++it)
                if (it.row() > 0 && it.col() > 0)
                    trip.emplace_back(int(it.row()) - 1, int(it.col()) - 1, it.value());
        minor.setFromTriplets(trip.begin(), trip.end());
        solver_.compute(minor);
        if (solver_.info() != Eigen::Success)
            throw NumericalError("DeflatedFactorization: minor factorization failed");
        logpdet_ = std::log(double(n_));
        const auto& d = solver_.vectorD();
        for (int k = 0; k < d.size(); ++k) {
            if (!(d[k] > 0.0)) throw NumericalError("DeflatedFactorization: non-positive pivot");
            logpdet_ += std::log(d[k]);
        }
    }

    // pseudo-inverse action restricted to mean-zero b; returns the mean-zero solution
    SiteVector solve(const SiteVector& b) const {
        double s = b.sum();
        if (std::abs(s) > 1e-10 * (1.0 + b.cwiseAbs().maxCoeff()))
            throw NumericalError("DeflatedFactorization::solve: rhs not mean-zero");
        SiteVector x(n_);
        x[0] = 0.0;
        x.tail(n_ - 1) = solver_.solve(b.tail(n_ - 1));
        x.array() -= x.mean();
        return x;
    }

    double greens_form(const SiteVector& v) const { return v.dot(solve(v)); }
    double log_pdet() const { return logpdet_; }

private:
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
    double logpdet_ = 0.0;
    int n_ = 0;
};

} // namespace h22
