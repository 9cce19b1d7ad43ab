#pragma once
#include <cmath>

#include "elliptic.hpp"

namespace h22 {

struct ActionValue {
    double local_cosh_part = 0.0;
    double logdet_part = 0.0;
    double linear_eps_part = 0.0;
    double total = 0.0;
};

// F = sum_edges beta_ij (cosh(t_i-t_j)-1)  -  (1/2) ln Det D  +  sum_k (t_k - eps_k + eps_k cosh t_k)
inline ActionValue action_parts(const EllipticOperator& op, double logdet_D) {
    ActionValue v;
    for (size_t e = 0; e < op.graph.edges.size(); ++e) {
        double dt = op.t[op.graph.edges[e].i] - op.t[op.graph.edges[e].j];
        v.local_cosh_part += op.c.beta_edge[e] * (std::cosh(dt) - 1.0);
    }
    for (int k = 0; k < op.graph.n; ++k) {
        double eps = op.c.eps_site[size_t(k)];
        v.linear_eps_part += op.t[k] - eps + eps * std::cosh(op.t[k]);
    }
    v.logdet_part = -0.5 * logdet_D;
    v.total = v.local_cosh_part + v.logdet_part + v.linear_eps_part;
    return v;
}

inline ActionValue effective_action(const EllipticOperator& op, const Factorization& F) {
    return action_parts(op, F.logdet());
}

inline ActionValue effective_action(const Torus& T, const CouplingMap& c, const SiteVector& t) {
    auto op = assemble(T, c, t);
    Factorization F(op);
    return effective_action(op, F);
}

inline ActionValue effective_action(const Graph& g, const CouplingMap& c, const SiteVector& t) {
    auto op = assemble(g, c, t);
    Factorization F(op);
    return effective_action(op, F);
}

// eps == 0 variant used by the shift-covariance check: the zero mode (constants)
// is deflated out of the determinant and re-entered analytically as 2*mean(t),
// the scale factor of the kernel direction under t -> t + c.  No eps terms.
inline ActionValue deflated_effective_action(const Graph& g, const CouplingMap& c,
                                             const SiteVector& t) {
    auto op = assemble(g, c, t);
    DeflatedFactorization F(op);
    ActionValue v;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        double dt = t[g.edges[e].i] - t[g.edges[e].j];
        v.local_cosh_part += c.beta_edge[e] * (std::cosh(dt) - 1.0);
    }
    v.linear_eps_part = t.sum();
    v.logdet_part = -0.5 * (F.log_pdet() + 2.0 * t.mean());
    v.total = v.local_cosh_part + v.logdet_part + v.linear_eps_part;
    return v;
}

// gradient component k:
//   beta sum_{j~k} sinh(t_k-t_j) - (1/2) tr(D^{-1} d_k D) + 1 + eps_k sinh t_k
// with tr(D^{-1} d_k D) = sum_{j~k} w_kj [(d_k-d_j); D^{-1}(d_k-d_j)] + eps_k e^{t_k} (D^{-1})_kk
inline SiteVector action_gradient(const EllipticOperator& op, const Factorization& F) {
    const Graph& g = op.graph;
    std::vector<std::pair<int, int>> pattern;
    pattern.reserve(size_t(g.n) + g.edges.size());
    for (int k = 0; k < g.n; ++k) pattern.emplace_back(k, k);
    for (const auto& e : g.edges) pattern.emplace_back(e.i, e.j);
    auto inv = selected_inverse(F, pattern);

    SiteVector grad(g.n);
    for (int k = 0; k < g.n; ++k) {
        double eps = op.c.eps_site[size_t(k)];
        grad[k] = 1.0 + eps * std::sinh(op.t[k]) -
                  0.5 * eps * std::exp(op.t[k]) * inv[size_t(k)];
    }
    for (size_t e = 0; e < g.edges.size(); ++e) {
        int i = g.edges[e].i, j = g.edges[e].j;
        double sh = std::sinh(op.t[i] - op.t[j]);
        grad[i] += op.c.beta_edge[e] * sh;
        grad[j] -= op.c.beta_edge[e] * sh;
        double w = op.c.beta_edge[e] * std::exp(op.t[i] + op.t[j]);
        // q = [(d_i-d_j); D^{-1}(d_i-d_j)]; edge entries stored after the N diagonals
        double q = inv[size_t(i)] + inv[size_t(j)] - 2.0 * inv[size_t(g.n) + e];
        grad[i] -= 0.5 * w * q;
        grad[j] -= 0.5 * w * q;
    }
    return grad;
}

// same gradient from an already-available dense inverse
inline SiteVector action_gradient(const EllipticOperator& op, const Eigen::MatrixXd& G) {
    const Graph& g = op.graph;
    SiteVector grad(g.n);
    for (int k = 0; k < g.n; ++k) {
        double eps = op.c.eps_site[size_t(k)];
        grad[k] = 1.0 + eps * std::sinh(op.t[k]) - 0.5 * eps * std::exp(op.t[k]) * G(k, k);
    }
    for (size_t e = 0; e < g.edges.size(); ++e) {
        int i = g.edges[e].i, j = g.edges[e].j;
        double sh = std::sinh(op.t[i] - op.t[j]);
        grad[i] += op.c.beta_edge[e] * sh;
        grad[j] -= op.c.beta_edge[e] * sh;
        double w = op.c.beta_edge[e] * std::exp(op.t[i] + op.t[j]);
        double q = G(i, i) + G(j, j) - 2.0 * G(i, j);
        grad[i] -= 0.5 * w * q;
        grad[j] -= 0.5 * w * q;
    }
    return grad;
}

inline SiteVector action_gradient(const Torus& T, const CouplingMap& c, const SiteVector& t) {
    auto op = assemble(T, c, t);
    Factorization F(op);
    return action_gradient(op, F);
}

inline SiteVector action_gradient(const Graph& g, const CouplingMap& c, const SiteVector& t) {
    auto op = assemble(g, c, t);
    Factorization F(op);
    return action_gradient(op, F);
}

// the two competing pieces of the action: sum_e beta cosh(t_i-t_j) (whose -beta
// exponent is log-concave) and ln Det D (convex in t)
struct ConvexitySplit {
    double cosh_sum = 0.0; // sum_edges beta_ij cosh(t_i - t_j)
    double logdet = 0.0;   // ln Det D
};

inline ConvexitySplit convexity_split(const Graph& g, const CouplingMap& c, const SiteVector& t) {
    ConvexitySplit s;
    for (size_t e = 0; e < g.edges.size(); ++e)
        s.cosh_sum += c.beta_edge[e] * std::cosh(t[g.edges[e].i] - t[g.edges[e].j]);
    auto op = assemble(g, c, t);
    Factorization F(op);
    s.logdet = F.logdet();
    return s;
}

inline ConvexitySplit convexity_split(const Torus& T, const CouplingMap& c, const SiteVector& t) {
    return convexity_split(T.graph, c, t);
}

} // namespace h22
