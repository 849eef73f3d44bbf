#pragma once

// Composite quadrature on the two grid kinds.
//
// LineGrid uses the trapezoid rule with fourth-order Gregory end corrections
// (end weights 3/8, 7/6, 23/24): exact on cubics, and spectrally accurate for
// smooth integrands that have decayed at both ends, which covers every
// profile-type integrand in the library. PeriodicGrid uses the rectangle
// rule, which is spectrally accurate for smooth periodic integrands.
//
// Cumulative integrals integrate a degree-6 interpolant cell by cell
// (order 6 global), one-sided within three cells of the ends; they feed the
// profile pipeline's primitives, whose defining equations are later checked
// with sixth-order finite differences, so the two rules must agree well
// below the check tolerances even on fields of size ~1e4.

#include <numeric>

#include "core.hpp"

namespace gkdvlab {

// Node weights for the line rule; multiply by h.
inline std::vector<double> gregory_weights(int n) {
    if (n < 8) throw ConfigInvalid("gregory_weights: n >= 8 required");
    std::vector<double> w(n, 1.0);
    const double e0 = 3.0 / 8.0, e1 = 7.0 / 6.0, e2 = 23.0 / 24.0;
    w[0] = w[n - 1] = e0;
    w[1] = w[n - 2] = e1;
    w[2] = w[n - 3] = e2;
    return w;
}

inline double integrate(const Field& f) {
    if (f.on_line()) {
        const LineGrid& g = f.line();
        auto w = gregory_weights(g.n);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) s += w[i] * f[i];
        return s * g.h();
    }
    const PeriodicGrid& g = f.periodic();
    return g.h() * std::accumulate(f.values.begin(), f.values.end(), 0.0);
}

// L2 inner product by the same rule.
inline double inner(const Field& a, const Field& b) {
    if (a.grid != b.grid) throw ConfigInvalid("inner: grid mismatch");
    return integrate(a * b);
}

inline double norm_l2(const Field& f) { return std::sqrt(inner(f, f)); }

inline double norm_inf(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

// Inner product against a pointwise weight: integral of a*b*w.
inline double inner_weighted(const Field& a, const Field& b, const Field& w) {
    return integrate(a * b * w);
}

// Cumulative integral from the left end: out[i] = integral over [y_min, y_i].
// Each step integrates the degree-6 interpolant through seven nodes centred
// on the cell, shifting the window at the ends; weights are exact rationals.
inline Field cumulative_from_left(const Field& f) {
    const LineGrid& g = f.line();
    const int n = g.n;
    const double h = g.h();
    // Window [0..6], cells [0,1], [1,2], [2,3]; interior cells reuse the
    // third row re-centred, and the right end mirrors the left.
    static constexpr double we[3][7] = {
        {19087.0 / 60480.0, 2713.0 / 2520.0, -15487.0 / 20160.0, 586.0 / 945.0,
         -6737.0 / 20160.0, 263.0 / 2520.0, -863.0 / 60480.0},
        {-863.0 / 60480.0, 349.0 / 840.0, 5221.0 / 6720.0, -254.0 / 945.0,
         811.0 / 6720.0, -29.0 / 840.0, 271.0 / 60480.0},
        {271.0 / 60480.0, -23.0 / 504.0, 10273.0 / 20160.0, 586.0 / 945.0,
         -2257.0 / 20160.0, 67.0 / 2520.0, -191.0 / 60480.0},
    };
    // Interior cell [i, i+1] with window [i-3 .. i+3].
    static constexpr double wc[7] = {-191.0 / 60480.0, 67.0 / 2520.0,
                                     -2257.0 / 20160.0, 586.0 / 945.0,
                                     10273.0 / 20160.0, -23.0 / 504.0,
                                     271.0 / 60480.0};
    Field out(f.grid);
    out[0] = 0.0;
    auto& v = f.values;
    for (int i = 0; i + 1 < n; ++i) {
        double seg = 0.0;
        if (i < 3) {
            for (int k = 0; k < 7; ++k) seg += we[i][k] * v[k];
        } else if (i >= n - 4) {
            for (int k = 0; k < 7; ++k) seg += we[n - 2 - i][k] * v[n - 1 - k];
        } else {
            for (int k = 0; k < 7; ++k) seg += wc[k] * v[i - 3 + k];
        }
        out[i + 1] = out[i] + h * seg;
    }
    return out;
}

// Cumulative integral toward the right end: out[i] = integral over [y_i, y_max].
// Used as the tail primitive for right-decaying sources, where the truncated
// part beyond y_max is below 1e-12 by domain choice.
inline Field cumulative_from_right(const Field& f) {
    const LineGrid& g = f.line();
    Field rev(f.grid);
    for (int i = 0; i < g.n; ++i) rev[i] = f[g.n - 1 - i];
    Field c = cumulative_from_left(rev);
    Field out(f.grid);
    for (int i = 0; i < g.n; ++i) out[i] = c[g.n - 1 - i];
    return out;
}

} // namespace gkdvlab
