#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "interphase/tensor.hpp"
#include "interphase/util.hpp"

namespace interphase {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
    require(n >= 1, "gauss_legendre: need at least one node");
    std::vector<std::pair<double, double>> nw(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nw[i] = {x, w};
        nw[n - 1 - i] = {-x, w};
    }
    return nw;
}

struct QuadratureOptions {
    double tolerance = 1e-10;  // absolute, relative to the integrand scale
    int max_depth = 40;
};

namespace detail {

using MatFn = std::function<SymMat(double)>;

inline SymMat gl_panel(const MatFn& f, double a, double b,
                       const std::vector<std::pair<double, double>>& nw, int dim) {
    SymMat acc(dim);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (auto [x, w] : nw) acc = acc + f(mid + half * x) * (w * half);
    return acc;
}

inline SymMat adapt(const MatFn& f, double a, double b, double budget, int depth,
                    const std::vector<std::pair<double, double>>& nw, int dim, int max_depth) {
    SymMat whole = gl_panel(f, a, b, nw, dim);
    double mid = 0.5 * (a + b);
    SymMat left = gl_panel(f, a, mid, nw, dim);
    SymMat right = gl_panel(f, mid, b, nw, dim);
    SymMat refined = left + right;
    double err = (whole - refined).max_abs();
    if (err <= budget) return refined;
    if (depth >= max_depth)
        throw QuadratureError("adaptive quadrature failed to converge", err);
    return adapt(f, a, mid, budget / 2, depth + 1, nw, dim, max_depth) +
           adapt(f, mid, b, budget / 2, depth + 1, nw, dim, max_depth);
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre integration of a matrix-valued function
/// over [a, b]. Panels are aligned with the supplied interior breakpoints so
/// piecewise integrands are handled exactly panel by panel. The tolerance is
/// absolute, scaled by the largest integrand entry encountered in a scan.
inline SymMat integrate_matrix(const detail::MatFn& f, double a, double b, int dim,
                               std::vector<double> breakpoints = {},
                               const QuadratureOptions& opts = {}) {
    require(b > a, "integrate_matrix: empty or reversed interval");
    static const auto nw7 = gauss_legendre(7);

    std::vector<double> cuts{a};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double z : breakpoints)
        if (z > a && z < b) cuts.push_back(z);
    cuts.push_back(b);

    double scale = 0;
    for (size_t p = 0; p + 1 < cuts.size(); ++p)
        for (int s = 0; s <= 4; ++s) {
            double z = cuts[p] + (cuts[p + 1] - cuts[p]) * s / 4.0;
            scale = std::max(scale, f(z).max_abs());
        }
    double total_budget = opts.tolerance * std::max(scale, 1e-300) * (b - a);

    SymMat acc(dim);
    for (size_t p = 0; p + 1 < cuts.size(); ++p) {
        double budget = total_budget * (cuts[p + 1] - cuts[p]) / (b - a);
        acc = acc + detail::adapt(f, cuts[p], cuts[p + 1], budget, 0, nw7, dim, opts.max_depth);
    }
    return acc;
}

}  // namespace interphase
