#pragma once
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"

namespace h22 {

struct SaddleResult {
    double t_star = 0.0;
    double mass2 = 0.0; // eps e^{-t*}
    double g0xx = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

namespace detail {
// (1/L) sum_k 1/(z + 2 beta (1 - cos(2 pi k / L))) = coth(L u / 2) / (2 beta sinh u),
// cosh u = 1 + z/(2 beta).  Exact partial-fraction resummation of the 1D symbol;
// lets the 3D diagonal run at O(L^2) instead of O(L^3).
inline double axis_kernel(int L, double beta, double z) {
    if (beta == 0.0) return 1.0 / z;
    double d = z / (2.0 * beta);
    double u = std::log1p(d + std::sqrt(d * (d + 2.0)));
    double x = 0.5 * double(L) * u;
    double coth = x > 350.0 ? 1.0 : 1.0 / std::tanh(x);
    return coth / (2.0 * beta * std::sinh(u));
}

// folded axis eigenvalues lambda_k = 2(1-cos(2 pi k/L)) with multiplicities
inline void folded_axis(int L, std::vector<double>& lam, std::vector<double>& mult) {
    lam.clear();
    mult.clear();
    for (int k = 0; k <= L / 2; ++k) {
        lam.push_back(2.0 * (1.0 - std::cos(2.0 * M_PI * double(k) / double(L))));
        bool self_paired = (k == 0) || (2 * k == L);
        mult.push_back(self_paired ? 1.0 : 2.0);
    }
}
} // namespace detail

// diagonal of (-beta*Lap + mass^2)^{-1} on the d-dimensional side-L torus:
// (1/N) sum_k 1/(beta lambda_k + mass^2)
inline double g0_diag(int dim, int side, double beta, double mass2) {
    if (dim < 1 || dim > 3 || side < 1) throw ConfigError("g0_diag: bad lattice");
    if (!(mass2 > 0.0)) throw ConfigError("g0_diag: mass^2 must be > 0");
    if (dim == 1) return detail::axis_kernel(side, beta, mass2);
    std::vector<double> lam, mult;
    detail::folded_axis(side, lam, mult);
    double sum = 0.0;
    if (dim == 2) {
        for (size_t a = 0; a < lam.size(); ++a)
            sum += mult[a] * detail::axis_kernel(side, beta, mass2 + beta * lam[a]);
        return sum / double(side);
    }
    for (size_t a = 0; a < lam.size(); ++a) {
        double za = mass2 + beta * lam[a];
        double inner = 0.0;
        for (size_t b = 0; b < lam.size(); ++b)
            inner += mult[b] * detail::axis_kernel(side, beta, za + beta * lam[b]);
        sum += mult[a] * inner;
    }
    return sum / (double(side) * double(side));
}

inline double g0_diag(const Torus& T, double beta, double mass2) {
    return g0_diag(T.dim, T.side, beta, mass2);
}

// monotone bisection for 1 - e^{2t} = G_0(x,x; mass^2 = eps e^{-t}); root is unique,
// h(t) = 1 - e^{2t} - G_0 is strictly decreasing in t with h(0) < 0
inline SaddleResult solve_saddle(int dim, int side, double beta, double eps) {
    if (!(beta > 0.0) || !(eps > 0.0)) throw ConfigError("solve_saddle: need beta > 0, eps > 0");
    auto h = [&](double t) { return 1.0 - std::exp(2.0 * t) - g0_diag(dim, side, beta, eps * std::exp(-t)); };
    double hi = 0.0, lo = -1.0;
    int iters = 0;
    while (h(lo) <= 0.0) {
        lo *= 2.0;
        if (++iters > 60 || lo < -700.0)
            throw NumericalError("solve_saddle: bracket failure");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0) lo = mid; else hi = mid;
        ++iters;
    }
    SaddleResult r;
    r.t_star = 0.5 * (lo + hi);
    r.mass2 = eps * std::exp(-r.t_star);
    r.g0xx = g0_diag(dim, side, beta, r.mass2);
    r.iterations = iters;
    r.residual = std::abs(1.0 - std::exp(2.0 * r.t_star) - r.g0xx);
    return r;
}

inline SaddleResult solve_saddle(const Torus& T, double beta, double eps) {
    return solve_saddle(T.dim, T.side, beta, eps);
}

struct ScanRow {
    int dim = 0;
    int side = 0;
    double beta = 0.0, eps = 0.0;
    double t_star = 0.0, mass2 = 0.0, g0xx = 0.0, residual = 0.0;
    double beta_lambda_min = 0.0; // finite-size guard: compare against mass2
};

inline std::vector<ScanRow> asymptotics_scan(int dim, int side, const std::vector<double>& betas,
                                             const std::vector<double>& epss) {
    std::vector<ScanRow> rows;
    double lam_min = 2.0 * (1.0 - std::cos(2.0 * M_PI / double(side)));
    for (double beta : betas)
        for (double eps : epss) {
            auto s = solve_saddle(dim, side, beta, eps);
            rows.push_back({dim, side, beta, eps, s.t_star, s.mass2, s.g0xx, s.residual,
                            beta * lam_min});
        }
    return rows;
}

// least-squares slope of y against x
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace h22
