#include <catch2/catch_amalgamated.hpp>

#include <h22/elliptic.hpp>
#include <h22/lattice.hpp>
#include <h22/rng.hpp>

#include "oracles.hpp"

using namespace h22;

namespace {
SiteVector random_t(int n, Rng& rng, double scale = 1.0) {
    SiteVector t(n);
    for (int k = 0; k < n; ++k) t[k] = scale * rng.uniform(-1.0, 1.0);
    return t;
}
} // namespace

TEST_CASE("operator assembly matches quadratic form", "[elliptic]") {
    Rng rng = Rng::substream(7, 0);
    auto T = build_torus(2, 3);
    CouplingMap c = CouplingMap::uniform(T.graph, 0.0, 0.0);
    for (size_t e = 0; e < c.beta_edge.size(); ++e) c.beta_edge[e] = rng.uniform(0.2, 2.0);
    for (auto& x : c.eps_site) x = rng.uniform(0.01, 0.5);
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);
    Eigen::MatrixXd Dd = oracle::dense_elliptic(T.graph, c, t);
    REQUIRE((Eigen::MatrixXd(op.M) - Dd).cwiseAbs().maxCoeff() < 1e-14);
    for (int rep = 0; rep < 100; ++rep) {
        SiteVector v = random_t(T.num_sites, rng, 2.0);
        double qf = op.quadratic_form(v);
        // defining sum, accumulated independently
        double ref = 0.0;
        for (size_t e = 0; e < T.graph.edges.size(); ++e) {
            int i = T.graph.edges[e].i, j = T.graph.edges[e].j;
            ref += c.beta_edge[e] * std::exp(t[i] + t[j]) * (v[i] - v[j]) * (v[i] - v[j]);
        }
        for (int k = 0; k < T.num_sites; ++k)
            ref += c.eps_site[size_t(k)] * std::exp(t[k]) * v[k] * v[k];
        REQUIRE(qf == Catch::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("flat-field operator is -beta*Laplacian + eps", "[elliptic]") {
    auto T = build_torus(1, 4);
    auto op = assemble(T, CouplingMap::uniform(T.graph, 1.0, 0.25), SiteVector::Zero(4));
    Eigen::MatrixXd M(op.M);
    for (int i = 0; i < 4; ++i) REQUIRE(M(i, i) == Catch::Approx(2.25));
    REQUIRE(M(0, 1) == Catch::Approx(-1.0));
    REQUIRE(M(0, 3) == Catch::Approx(-1.0));
    REQUIRE(M(0, 2) == 0.0);
    // delta-vector quadratic form on 3d torus: 2d*beta + eps
    auto T3 = build_torus(3, 4);
    auto op3 = assemble(T3, CouplingMap::uniform(T3.graph, 1.5, 0.3), SiteVector::Zero(64));
    SiteVector v = SiteVector::Zero(64);
    v[17] = 1.0;
    REQUIRE(op3.quadratic_form(v) == Catch::Approx(6.0 * 1.5 + 0.3));
}

TEST_CASE("update_site refreshes exactly one site's couplings", "[elliptic]") {
    Rng rng = Rng::substream(7, 1);
    auto T = build_torus(2, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 0.8, 0.1);
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);
    for (int rep = 0; rep < 20; ++rep) {
        int k = int(rng.uniform_index(uint64_t(T.num_sites)));
        double tk = rng.uniform(-1.5, 1.5);
        op.update_site(k, tk);
        t[k] = tk;
        Eigen::MatrixXd ref = oracle::dense_elliptic(T.graph, c, t);
        REQUIRE((Eigen::MatrixXd(op.M) - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("logdet closed forms on one and two sites", "[elliptic]") {
    // single site: D = eps*e^t
    Graph g1 = Graph::from_edges(1, {});
    CouplingMap c1;
    c1.beta_edge = {};
    c1.eps_site = {0.37};
    SiteVector t1(1);
    t1[0] = -0.81;
    Factorization f1(assemble(g1, c1, t1));
    REQUIRE(f1.logdet() == Catch::Approx(std::log(0.37) + (-0.81)).epsilon(1e-14));

    // two sites, one edge: det D = e^{t0+t1}(beta*(eps0*e^{t1'} ...)) -- use
    // det = w*(a+b) + a*b with w = beta*e^{t0+t1}, a = eps0*e^{t0}, b = eps1*e^{t1}
    Graph g2 = Graph::from_edges(2, {{0, 1}});
    CouplingMap c2;
    c2.beta_edge = {1.3};
    c2.eps_site = {0.21, 0.09};
    SiteVector t2(2);
    t2[0] = 0.4;
    t2[1] = -1.1;
    double w = 1.3 * std::exp(t2[0] + t2[1]);
    double a = 0.21 * std::exp(t2[0]), b = 0.09 * std::exp(t2[1]);
    Factorization f2(assemble(g2, c2, t2));
    REQUIRE(f2.logdet() == Catch::Approx(std::log(w * (a + b) + a * b)).epsilon(1e-12));
}

TEST_CASE("logdet agrees with dense eigenvalue sum and flat-field symbol", "[elliptic]") {
    Rng rng = Rng::substream(7, 2);
    auto T = build_torus(3, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.2, 0.05);
    SiteVector t = random_t(T.num_sites, rng, 0.7);
    Factorization f(assemble(T, c, t));
    REQUIRE(f.logdet() == Catch::Approx(oracle::dense_logdet(oracle::dense_elliptic(T.graph, c, t)))
                              .margin(1e-8));
    Factorization f0(assemble(T, c, SiteVector::Zero(T.num_sites)));
    REQUIRE(f0.logdet() == Catch::Approx(oracle::symbol_logdet(T, 1.2, 0.05)).margin(1e-9));
}

TEST_CASE("solve round-trips and matches closed forms", "[elliptic]") {
    Rng rng = Rng::substream(7, 3);
    auto T = build_torus(2, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 0.9, 0.2);
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);
    Factorization f(op);
    for (int rep = 0; rep < 10; ++rep) {
        SiteVector b = random_t(T.num_sites, rng, 3.0);
        SiteVector x = f.solve(b);
        REQUIRE((op.M * x - b).cwiseAbs().maxCoeff() < 1e-11);
    }
    // single site: D^{-1} b = e^{-t} b / eps
    Graph g1 = Graph::from_edges(1, {});
    CouplingMap c1;
    c1.eps_site = {0.5};
    SiteVector t1(1);
    t1[0] = 1.2;
    Factorization f1(assemble(g1, c1, t1));
    SiteVector one(1);
    one[0] = 1.0;
    REQUIRE(f1.solve(one)[0] == Catch::Approx(std::exp(-1.2) / 0.5).epsilon(1e-13));
}

TEST_CASE("flat-field inverse row sums give the mass sum rule", "[elliptic]") {
    // D 1 = eps 1 when t == 0, so eps * sum_y D^{-1}(x,y) = 1 for every x
    auto T = build_torus(3, 3);
    double eps = 0.07;
    Factorization f(assemble(T, CouplingMap::uniform(T.graph, 2.0, eps), SiteVector::Zero(27)));
    SiteVector ones = SiteVector::Ones(27);
    SiteVector r = f.solve(ones);
    for (int x = 0; x < 27; ++x) REQUIRE(eps * r[x] == Catch::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("greens entries and forms", "[elliptic]") {
    Rng rng = Rng::substream(7, 4);
    auto T = build_torus(2, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.1, 0.15);
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);
    Factorization f(op);
    Eigen::MatrixXd Dinv = oracle::dense_elliptic(T.graph, c, t).inverse();
    for (int rep = 0; rep < 10; ++rep) {
        int x = int(rng.uniform_index(16)), y = int(rng.uniform_index(16));
        REQUIRE(greens_entry(f, x, y) == Catch::Approx(Dinv(x, y)).margin(1e-12));
        REQUIRE(Dinv(x, y) > 0.0); // inverse is entrywise positive
    }
    SiteVector v = random_t(T.num_sites, rng);
    REQUIRE(greens_form(f, v) == Catch::Approx(v.dot(Dinv * v)).epsilon(1e-10));
    REQUIRE(greens_form(f, SiteVector::Zero(T.num_sites)) == 0.0);

    // two-site difference form: (a+b)/(w(a+b)+ab)
    Graph g2 = Graph::from_edges(2, {{0, 1}});
    CouplingMap c2;
    c2.beta_edge = {0.7};
    c2.eps_site = {0.3, 0.11};
    SiteVector t2(2);
    t2[0] = -0.2;
    t2[1] = 0.9;
    double w = 0.7 * std::exp(t2[0] + t2[1]);
    double a = 0.3 * std::exp(t2[0]), b = 0.11 * std::exp(t2[1]);
    Factorization f2(assemble(g2, c2, t2));
    SiteVector d(2);
    d[0] = 1.0;
    d[1] = -1.0;
    REQUIRE(greens_form(f2, d) == Catch::Approx((a + b) / (w * (a + b) + a * b)).epsilon(1e-12));
}

TEST_CASE("difference form decreases as beta grows", "[elliptic]") {
    auto T = build_torus(1, 8);
    SiteVector d = SiteVector::Zero(8);
    d[1] = 1.0;
    d[5] = -1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        Factorization f(assemble(T, CouplingMap::uniform(T.graph, beta, 0.3), SiteVector::Zero(8)));
        double q = greens_form(f, d);
        REQUIRE(q < prev);
        prev = q;
    }
}

TEST_CASE("selected inverse matches dense inverse on requested pattern", "[elliptic]") {
    Rng rng = Rng::substream(7, 5);
    auto T = build_torus(3, 3);
    CouplingMap c = CouplingMap::uniform(T.graph, 0.9, 0.12);
    SiteVector t = random_t(T.num_sites, rng, 0.6);
    auto op = assemble(T, c, t);
    Factorization f(op);
    Eigen::MatrixXd Dinv = oracle::dense_elliptic(T.graph, c, t).inverse();
    std::vector<std::pair<int, int>> pat;
    for (int k = 0; k < 27; ++k) pat.emplace_back(k, k);
    for (const auto& e : T.graph.edges) pat.emplace_back(e.i, e.j);
    pat.emplace_back(3, 20);
    auto vals = selected_inverse(f, pat);
    REQUIRE(vals.size() == pat.size());
    for (size_t q = 0; q < pat.size(); ++q)
        REQUIRE(vals[q] == Catch::Approx(Dinv(pat[q].first, pat[q].second)).margin(1e-9));
}

TEST_CASE("conjugated operator and its determinant shift", "[elliptic]") {
    Rng rng = Rng::substream(7, 6);
    // flat field: tilde D equals D equals -beta*Laplacian + eps
    auto T = build_torus(2, 3);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.4, 0.2);
    auto op0 = assemble(T, c, SiteVector::Zero(9));
    auto td0 = conjugate_tilde(op0);
    REQUIRE((Eigen::MatrixXd(td0.M) - Eigen::MatrixXd(op0.M)).cwiseAbs().maxCoeff() < 1e-14);

    // random field: explicit entrywise construction and the logdet identity
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);
    auto td = conjugate_tilde(op);
    Eigen::MatrixXd ref =
        Eigen::MatrixXd((-t).array().exp().matrix().asDiagonal()) * oracle::dense_elliptic(T.graph, c, t) *
        Eigen::MatrixXd((-t).array().exp().matrix().asDiagonal());
    REQUIRE((Eigen::MatrixXd(td.M) - ref).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(oracle::dense_logdet(Eigen::MatrixXd(td.M)) ==
            Catch::Approx(Factorization(op).logdet() - 2.0 * t.sum()).margin(1e-9));
}

TEST_CASE("single-edge K-matrix eigenvalues lie in [0,1]", "[elliptic]") {
    Rng rng = Rng::substream(7, 7);
    auto T = build_torus(2, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.7, 0.08);
    for (int rep = 0; rep < 5; ++rep) {
        SiteVector t = random_t(T.num_sites, rng);
        Factorization f(assemble(T, c, t));
        // K_ee' = [g_e; D^{-1} g_e'] with g_e = sqrt(beta) e^{(t_i+t_j)/2}... built
        // from un-normalized edge gradients; operator bound 0 <= K <= Id
        std::vector<int> picks = {0, 5, 9, 14, 20};
        int m = int(picks.size());
        Eigen::MatrixXd K(m, m);
        std::vector<SiteVector> gs;
        for (int p : picks) {
            const Edge& e = T.graph.edges[size_t(p)];
            SiteVector g = SiteVector::Zero(T.num_sites);
            double amp = std::sqrt(1.7) * std::exp(0.5 * (t[e.i] + t[e.j]));
            g[e.i] = amp;
            g[e.j] = -amp;
            gs.push_back(g);
        }
        for (int aa = 0; aa < m; ++aa) {
            SiteVector sol = f.solve(gs[size_t(aa)]);
            for (int bb = 0; bb < m; ++bb) K(aa, bb) = gs[size_t(bb)].dot(sol);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((K + K.transpose()) / 2.0);
        REQUIRE(es.eigenvalues().minCoeff() > -1e-9);
        REQUIRE(es.eigenvalues().maxCoeff() < 1.0 + 1e-9);
    }
}

TEST_CASE("factorization refuses a massless connected operator", "[elliptic]") {
    auto T = build_torus(1, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.0, 0.0);
    REQUIRE_THROWS_AS(Factorization(assemble(T, c, SiteVector::Zero(4))), ConfigError);
}

TEST_CASE("factorization reconstruction quality", "[elliptic]") {
    Rng rng = Rng::substream(7, 8);
    auto T = build_torus(3, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.0, 0.02);
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);
    double scale = Eigen::MatrixXd(op.M).cwiseAbs().maxCoeff();
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(op.M);
    REQUIRE(ldlt.info() == Eigen::Success);
    SpMat L = ldlt.matrixL();
    Eigen::MatrixXd rec = Eigen::MatrixXd(L) *
                          Eigen::MatrixXd(ldlt.vectorD().asDiagonal()) *
                          Eigen::MatrixXd(L).transpose();
    Eigen::MatrixXd perm = ldlt.permutationP() * Eigen::MatrixXd(op.M) *
                           ldlt.permutationP().transpose();
    REQUIRE((rec - perm).cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

TEST_CASE("matrix-tree determinant", "[elliptic]") {
    Rng rng = Rng::substream(7, 9);
    // single site
    Graph g1 = Graph::from_edges(1, {});
    CouplingMap c1;
    c1.eps_site = {0.6};
    SiteVector t1(1);
    t1[0] = 0.3;
    REQUIRE(matrix_tree_det(g1, c1, t1) == Catch::Approx(0.6 * std::exp(0.3)).epsilon(1e-14));

    // two sites closed form
    Graph g2 = Graph::from_edges(2, {{0, 1}});
    CouplingMap c2;
    c2.beta_edge = {1.3};
    c2.eps_site = {0.21, 0.09};
    SiteVector t2(2);
    t2[0] = 0.4;
    t2[1] = -1.1;
    double w = 1.3 * std::exp(t2[0] + t2[1]);
    double a = 0.21 * std::exp(t2[0]), b = 0.09 * std::exp(t2[1]);
    REQUIRE(matrix_tree_det(g2, c2, t2) == Catch::Approx(w * (a + b) + a * b).epsilon(1e-13));

    // random small graphs against the dense determinant
    std::vector<std::vector<Edge>> shapes = {
        {{0, 1}, {1, 2}},                        // path
        {{0, 1}, {1, 2}, {0, 2}},                // triangle
        {{0, 1}, {1, 2}, {2, 3}, {0, 3}},        // 4-cycle
        {{0, 1}, {0, 2}, {0, 3}},                // star
        {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}} // chord
    };
    for (const auto& es : shapes) {
        int n = 0;
        for (const auto& e : es) n = std::max({n, e.i + 1, e.j + 1});
        Graph g = Graph::from_edges(n, es);
        CouplingMap c;
        c.beta_edge.resize(g.edges.size());
        c.eps_site.resize(size_t(n));
        for (auto& x : c.beta_edge) x = rng.uniform(0.2, 2.0);
        for (auto& x : c.eps_site) x = rng.uniform(0.05, 0.8);
        SiteVector t = random_t(n, rng);
        double ref = oracle::dense_elliptic(g, c, t).determinant();
        REQUIRE(matrix_tree_det(g, c, t) == Catch::Approx(ref).epsilon(1e-10));
    }

    auto T = build_torus(3, 4);
    REQUIRE_THROWS_AS(matrix_tree_det(T.graph, CouplingMap::uniform(T.graph, 1.0, 0.1),
                                      SiteVector::Zero(T.num_sites)),
                      ConfigError);
}

TEST_CASE("restriction to a subregion", "[elliptic]") {
    Rng rng = Rng::substream(7, 10);
    auto T = build_torus(2, 4);
    CouplingMap c = CouplingMap::uniform(T.graph, 1.0, 0.0);
    for (size_t e = 0; e < c.beta_edge.size(); ++e) c.beta_edge[e] = rng.uniform(0.5, 1.5);
    SiteVector t = random_t(T.num_sites, rng);
    auto op = assemble(T, c, t);

    // full region reproduces the operator
    std::vector<int> all(size_t(T.num_sites));
    for (int k = 0; k < T.num_sites; ++k) all[size_t(k)] = k;
    auto full = neumann_restrict(op, all);
    REQUIRE((Eigen::MatrixXd(full.M) - Eigen::MatrixXd(op.M)).cwiseAbs().maxCoeff() < 1e-14);

    // strict sub-square: interior edges only, correct weights
    std::vector<int> R;
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) R.push_back(T.index({x, y, 0}));
    auto sub = neumann_restrict(op, R);
    REQUIRE(sub.graph.n == 4);
    REQUIRE(sub.graph.edges.size() == 4); // 2x2 block of a 4-torus: 4 interior bonds
    // Dirichlet-vs-Neumann ordering: extending by zero into the full torus only
    // adds boundary terms, so [v; D_R v] <= [v~; D v~]
    for (int rep = 0; rep < 20; ++rep) {
        SiteVector v(4);
        for (int k = 0; k < 4; ++k) v[k] = rng.uniform(-1.0, 1.0);
        SiteVector vfull = SiteVector::Zero(T.num_sites);
        for (size_t q = 0; q < R.size(); ++q) vfull[R[q]] = v[int(q)];
        REQUIRE(sub.quadratic_form(v) <= op.quadratic_form(vfull) + 1e-12);
    }

    REQUIRE_THROWS_AS(neumann_restrict(op, std::vector<int>{}), ConfigError);
    // disconnected restriction: two opposite corners of the 4-torus
    REQUIRE_THROWS_AS(neumann_restrict(op, std::vector<int>{0, T.index({2, 2, 0})}), ConfigError);
}

TEST_CASE("deflated massless factorization", "[elliptic]") {
    Rng rng = Rng::substream(7, 11);
    auto T = build_torus(1, 5);
    CouplingMap c = CouplingMap::uniform(T.graph, 0.0, 0.0);
    for (size_t e = 0; e < c.beta_edge.size(); ++e) c.beta_edge[e] = rng.uniform(0.4, 1.8);
    SiteVector t = random_t(5, rng);
    auto op = assemble(T, c, t);
    DeflatedFactorization df(op);

    // pseudo-determinant against dense nonzero-eigenvalue product
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense_elliptic(T.graph, c, t));
    double ref = 0.0;
    for (int k = 1; k < 5; ++k) ref += std::log(es.eigenvalues()[k]);
    REQUIRE(df.log_pdet() == Catch::Approx(ref).margin(1e-10));

    // mean-zero solve: D x = b, x mean-zero
    SiteVector b = random_t(5, rng);
    b.array() -= b.mean();
    SiteVector x = df.solve(b);
    REQUIRE(std::abs(x.mean()) < 1e-12);
    REQUIRE((op.M * x - b).cwiseAbs().maxCoeff() < 1e-10);

    SiteVector bad = SiteVector::Ones(5);
    REQUIRE_THROWS_AS(df.solve(bad), NumericalError);
    CouplingMap cm = CouplingMap::uniform(T.graph, 1.0, 0.1);
    REQUIRE_THROWS_AS(DeflatedFactorization(assemble(T, cm, t)), ConfigError);
}
