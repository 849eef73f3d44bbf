#pragma once

// Finite differences on uniform line grids.
//
// Stencil weights come from Fornberg's recursion, so centered and one-sided
// closures share one code path at any order. Default accuracy is 6: the
// ground-state equation residual check needs max truncation error below 1e-8
// at h ~ 7.3e-3, and |Q''''''| ~ 1.5e3 puts the fourth-order 5-point stencil
// at ~5e-8 there. Accuracy 4 remains available for the refinement-order
// tests.

#include <array>

#include "core.hpp"

namespace gkdvlab {

// Weights w[j] such that f^(m)(x0) ~ sum_j w[j] f(x[j]).
// Fornberg, "Generation of finite difference formulas on arbitrarily spaced
// grids", Math. Comp. 51 (1988).
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& x, int m) {
    const int n = (int)x.size();
    if (n < m + 1) throw ConfigInvalid("fornberg_weights: too few nodes");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = c[j][m];
    return w;
}

// m-th derivative on a line grid, accuracy acc (4 or 6), one-sided at the
// boundary with the same stencil width.
inline Field fd_derivative(const Field& f, int m, int acc = 6) {
    const LineGrid& g = f.line();
    if (m < 1 || m > 3) throw ConfigInvalid("fd_derivative: order must be 1..3");
    if (acc != 4 && acc != 6) throw ConfigInvalid("fd_derivative: accuracy 4 or 6");
    int npts = m + acc;
    if (npts % 2 == 0) npts -= 1; // centered stencil for even m saves a node
    if (g.n < npts) throw ConfigInvalid("fd_derivative: grid too small for stencil");

    const double h = g.h();
    std::vector<double> nodes(npts);
    for (int j = 0; j < npts; ++j) nodes[j] = j * h;

    // One weight pattern per shift of the evaluation point inside the window.
    std::vector<std::vector<double>> w(npts);
    for (int s = 0; s < npts; ++s) w[s] = fornberg_weights(s * h, nodes, m);

    const int half = (npts - 1) / 2;
    Field out(f.grid);
    for (int i = 0; i < g.n; ++i) {
        int start = i - half;
        if (start < 0) start = 0;
        if (start > g.n - npts) start = g.n - npts;
        const int s = i - start;
        double acc_v = 0.0;
        for (int j = 0; j < npts; ++j) acc_v += w[s][j] * f[start + j];
        out[i] = acc_v;
    }
    return out;
}

// Scaling generators: Lambda_k f = ((1-k)/2) f + y f', with Lambda = Lambda_0.
inline Field scaling_generator(const Field& f, int k = 0, int acc = 6) {
    const LineGrid& g = f.line();
    Field fp = fd_derivative(f, 1, acc);
    Field out(f.grid);
    const double a = 0.5 * (1.0 - k);
    for (int i = 0; i < g.n; ++i) out[i] = a * f[i] + g.y(i) * fp[i];
    return out;
}

} // namespace gkdvlab
