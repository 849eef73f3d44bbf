#pragma once

// Smooth cutoff functions built from the standard C^infinity transition
// u(x) = e^{-1/x} (x > 0). Only the support/plateau structure matters for
// the estimates; the concrete blend is recorded via the measured plateau
// mass C0 = ||theta0||^2_{L2}, which enters reports but is never asserted.
//
//   theta0 : even, 1 on |x| <= 5/4, 0 on |x| >= 7/4, monotone shoulders
//   chi    : nondecreasing step, 0 on x <= -2, 1 on x >= -1
//
// First and second derivatives are analytic: the parameter chain rule needs
// the first, and the residual assembles profile curvature through the
// stage equations plus these cutoff curvatures instead of stacking finite
// differences (which would amplify roundoff by 1/h per stacked pass).

#include <algorithm>

#include "core.hpp"

namespace gkdvlab {

inline double bump_u(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double bump_u_prime(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }
inline double bump_u_second(double x) {
    return x > 0.0 ? std::exp(-1.0 / x) * (1.0 - 2.0 * x) / (x * x * x * x) : 0.0;
}

namespace detail {
// Second derivative of a/(a+b) given both factors and their derivatives.
inline double blend_second(double a, double ap, double app, double b, double bp, double bpp) {
    const double s = a + b;
    const double sp = ap + bp, spp = app + bpp;
    return (app * s - a * spp) / (s * s) - 2.0 * (ap * s - a * sp) * sp / (s * s * s);
}
} // namespace detail

// 0 for x <= 0, 1 for x >= 1, C^infinity monotone in between.
inline double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = bump_u(x), b = bump_u(1.0 - x);
    return a / (a + b);
}
inline double smooth_step_prime(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = bump_u(x), b = bump_u(1.0 - x);
    const double ap = bump_u_prime(x), bp = -bump_u_prime(1.0 - x);
    const double s = a + b;
    return (ap * s - a * (ap + bp)) / (s * s);
}
inline double smooth_step_second(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return detail::blend_second(bump_u(x), bump_u_prime(x), bump_u_second(x),
                                bump_u(1.0 - x), -bump_u_prime(1.0 - x), bump_u_second(1.0 - x));
}

// Even plateau bump: u(7/4-|x|) / (u(7/4-|x|) + u(|x|-5/4)).
inline double theta0(double x) {
    const double ax = std::abs(x);
    if (ax <= 1.25) return 1.0;
    if (ax >= 1.75) return 0.0;
    const double a = bump_u(1.75 - ax), b = bump_u(ax - 1.25);
    return a / (a + b);
}
inline double theta0_prime(double x) {
    const double ax = std::abs(x);
    if (ax <= 1.25 || ax >= 1.75) return 0.0;
    const double a = bump_u(1.75 - ax), b = bump_u(ax - 1.25);
    const double ap = -bump_u_prime(1.75 - ax), bp = bump_u_prime(ax - 1.25);
    const double s = a + b;
    const double d = (ap * s - a * (ap + bp)) / (s * s);
    return x >= 0.0 ? d : -d;
}

// theta0 is even, so its second derivative is the |x|-derivative taken twice.
inline double theta0_second(double x) {
    const double ax = std::abs(x);
    if (ax <= 1.25 || ax >= 1.75) return 0.0;
    return detail::blend_second(bump_u(1.75 - ax), -bump_u_prime(1.75 - ax), bump_u_second(1.75 - ax),
                                bump_u(ax - 1.25), bump_u_prime(ax - 1.25), bump_u_second(ax - 1.25));
}

// chi(x) = smooth_step(x + 2): 0 below -2, 1 above -1.
inline double chi_step(double x) { return smooth_step(x + 2.0); }
inline double chi_step_prime(double x) { return smooth_step_prime(x + 2.0); }
inline double chi_step_second(double x) { return smooth_step_second(x + 2.0); }

// C0 = integral of theta0^2 (plateau mass of the bump actually used).
inline double theta0_mass2() {
    static const double c0 = [] {
        const int n = 1 << 13;
        const double lo = -2.0, hi = 2.0, h = (hi - lo) / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double t = theta0(lo + h * i);
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            s += w * t * t;
        }
        return s * h; // integrand is smooth with compact support: trapezoid converges fast
    }();
    return c0;
}

struct CutoffConfig {
    double delta = 0.05;
    double gamma = 0.75; // refined-profile cutoff exponent in chi(|b|^gamma y)
    bool loose = false;  // relax parameter windows for scaling studies

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigInvalid("CutoffConfig: delta in (0,1)");
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigInvalid("CutoffConfig: gamma in (0,1)");
    }
};

} // namespace gkdvlab
