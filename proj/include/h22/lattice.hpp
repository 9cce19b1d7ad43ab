#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace h22 {

using SiteVector = Eigen::VectorXd;

struct Edge {
    int i, j; // i < j after normalization
    bool operator==(const Edge& o) const { return i == o.i && j == o.j; }
    bool operator<(const Edge& o) const { return i != o.i ? i < o.i : j < o.j; }
};

// Plain undirected graph: the elliptic operator, matrix-tree enumeration and
// the ERRW run on these; Torus supplies the periodic hypercubic instance.
struct Graph {
    int n = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> nbr; // sorted adjacency

    static Graph from_edges(int n, std::vector<Edge> es) {
        Graph g;
        g.n = n;
        for (auto& e : es) {
            if (e.i == e.j || e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
                throw std::invalid_argument("Graph: bad edge");
            if (e.i > e.j) std::swap(e.i, e.j);
        }
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        g.edges = std::move(es);
        g.nbr.assign(n, {});
        for (const auto& e : g.edges) {
            g.nbr[e.i].push_back(e.j);
            g.nbr[e.j].push_back(e.i);
        }
        for (auto& v : g.nbr) std::sort(v.begin(), v.end());
        return g;
    }

    bool connected() const {
        if (n == 0) return false;
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int cnt = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : nbr[v])
                if (!seen[w]) { seen[w] = 1; ++cnt; q.push(w); }
        }
        return cnt == n;
    }
};

struct Torus {
    int dim = 0;
    int side = 0;
    int num_sites = 0;
    Graph graph;

    // row-major, axis 0 fastest
    int index(const std::array<int, 3>& c) const {
        int idx = 0;
        for (int a = dim - 1; a >= 0; --a) idx = idx * side + mod(c[a]);
        return idx;
    }
    std::array<int, 3> coords(int site) const {
        std::array<int, 3> c{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
            c[a] = site % side;
            site /= side;
        }
        return c;
    }
    int shift(int site, int axis, int delta) const {
        auto c = coords(site);
        c[axis] += delta;
        return index(c);
    }

    int mod(int x) const {
        int r = x % side;
        return r < 0 ? r + side : r;
    }
    // wrapped per-axis difference in (-L/2, L/2]
    int wrap_delta(int d) const {
        int r = mod(d);
        return r > side / 2 ? r - side : r;
    }
};

inline Torus build_torus(int dim, int side) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("build_torus: dim must be 1, 2, or 3");
    if (side < 2) throw std::invalid_argument("build_torus: side must be >= 2");
    Torus T;
    T.dim = dim;
    T.side = side;
    T.num_sites = 1;
    for (int a = 0; a < dim; ++a) T.num_sites *= side;
    std::vector<Edge> es;
    es.reserve(size_t(dim) * T.num_sites);
    for (int s = 0; s < T.num_sites; ++s)
        for (int a = 0; a < dim; ++a)
            es.push_back({s, T.shift(s, a, +1)}); // L=2 duplicates removed in from_edges
    T.graph = Graph::from_edges(T.num_sites, std::move(es));
    return T;
}

// L1 torus metric (per-axis min(|d|, L-|d|))
inline int torus_distance(const Torus& T, int x, int y) {
    auto cx = T.coords(x), cy = T.coords(y);
    int d = 0;
    for (int a = 0; a < T.dim; ++a) d += std::abs(T.wrap_delta(cy[a] - cx[a]));
    return d;
}

// wrapped displacement y-x as a Euclidean vector
inline std::array<double, 3> torus_displacement(const Torus& T, int x, int y) {
    auto cx = T.coords(x), cy = T.coords(y);
    std::array<double, 3> d{0, 0, 0};
    for (int a = 0; a < T.dim; ++a) d[a] = double(T.wrap_delta(cy[a] - cx[a]));
    return d;
}

inline double torus_distance_euclid(const Torus& T, int x, int y) {
    auto d = torus_displacement(T, x, y);
    return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
}

} // namespace h22
