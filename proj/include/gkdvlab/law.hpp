#pragma once

// Formal parameter dynamics of the scale/translation system
//
//   lambda_s / lambda = -beta_tilde(lambda),   sigma_s = lambda,   dt = lambda^3 ds,
//   beta_tilde(lambda) = -2 lambda^{1/2} + c2 lambda + c3 lambda^{3/2}
//                        + c4s lambda^2 log lambda,
//
// condensed through the decreasing integral
//
//   G(lambda) = int_lambda^{lambda0} d eta / (eta^{3/2} D(eta)),
//   D(eta)    = 2 - c2 eta^{1/2} - c3 eta - c4s eta^{3/2} log eta,
//
// so that lambda_s G'(lambda) = -1 integrates to G(lambda(s)) = -s, with
// G(lambda0) = 0 anchoring s = 0 at lambda = lambda0. The eta = xi^2
// substitution removes the eta^{-3/2} endpoint; splitting off the D = 2 part
// leaves a bounded remainder integrand and makes the zero-coefficient case
// exact:
//
//   G = lambda^{-1/2} - lambda0^{-1/2}
//       + int_{sqrt(lambda)}^{sqrt(lambda0)} (c2 + c3 xi + 2 c4s xi^2 log xi)
//                                            / (xi D(xi^2)) dxi.
//
// Accumulated position and physical time have exact xi-forms via the change
// of variables s -> lambda (ds = G'(lambda) d lambda), absorbing the whole
// infinite tail with no asymptote splicing:
//
//   sigma(s) = int_{-inf}^s lambda ds'   = int_0^{sqrt(lambda)} 2 dxi / D(xi^2),
//   t(s)     = int_{-inf}^s lambda^3 ds' = int_0^{sqrt(lambda)} 2 xi^4 dxi / D(xi^2).
//
// Sign conventions for the position: two appear in the literature for this
// system. The stored sigma is the accumulated-length one (positive,
// increasing, sigma ~ 1/|s|), which matches the moving-frame evolution
// diagnostics; sigma_reflected = -sigma satisfies the display bound
// |sigma_refl - 1/s| <= C log|s| / s^2 and corresponds to the x -> -x
// reflected frame. Both are exposed.

#include <algorithm>
#include <vector>

#include "run_record.hpp"

namespace gkdvlab {

struct LawCoefficients {
    double c2 = 0.0, c3 = 0.0, c4s = 0.0;
    double lambda0 = 0.01;
};

// D(eta) = 2 - c2 sqrt(eta) - c3 eta - c4s eta^{3/2} log eta; D(0) = 2.
inline double law_denominator(double eta, const LawCoefficients& c) {
    if (eta <= 0.0) return 2.0;
    const double r = std::sqrt(eta);
    return 2.0 - c.c2 * r - c.c3 * eta - c.c4s * eta * r * std::log(eta);
}

namespace detail {

// 12-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric halves).
inline constexpr double kGlx[6] = {0.1252334085114689, 0.3678314989981802,
                                   0.5873179542866175, 0.7699026741943047,
                                   0.9041172563704749, 0.9815606342467192};
inline constexpr double kGlw[6] = {0.2491470458134028, 0.2334925365383548,
                                   0.2031674267230659, 0.1600783285433462,
                                   0.1069393259953184, 0.0471753363865118};

// Composite Gauss-Legendre with panel doubling to a fixed relative target.
// Integrands here are smooth, so convergence is fast and deterministic.
template <class F>
double adaptive_panels(F&& f, double a, double b, double rel = 1e-13) {
    if (!(b > a)) return 0.0;
    double prev = 0.0;
    for (int panels = 8; panels <= (1 << 16); panels *= 2) {
        const double hp = (b - a) / panels;
        double s = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + hp * (p + 0.5), half = 0.5 * hp;
            for (int k = 0; k < 6; ++k)
                s += kGlw[k] * (f(mid - half * kGlx[k]) + f(mid + half * kGlx[k]));
        }
        s *= 0.5 * hp;
        if (panels > 8 && std::abs(s - prev) <= rel * (1.0 + std::abs(s))) return s;
        prev = s;
    }
    return prev;
}

inline void require_denominator(double lo, double hi, const LawCoefficients& c) {
    // Positivity margin > 1 on the integration range, sampled log-uniformly.
    const double a = std::max(lo, 1e-300);
    const int m = 64;
    const double step = (std::log(hi) - std::log(a)) / m;
    for (int i = 0; i <= m; ++i) {
        const double eta = std::exp(std::log(a) + step * i);
        if (!(law_denominator(eta, c) > 1.0))
            throw DenominatorVanishes("law: denominator <= 1 at eta = " + std::to_string(eta));
    }
}

} // namespace detail

// Largest lambda0 <= cap with denominator > 1.5 on (0, lambda0]. D(0+) = 2,
// so the admissible set is a nonempty interval and bisection applies.
inline LawCoefficients make_law(double c2, double c3, double c4s, double cap = 0.01) {
    LawCoefficients c{c2, c3, c4s, cap};
    auto admissible = [&](double l0) {
        const int m = 2048;
        for (int i = 0; i <= m; ++i) {
            const double eta = std::exp(std::log(1e-12) + (std::log(l0) - std::log(1e-12)) * i / m);
            if (!(law_denominator(eta, c) > 1.5)) return false;
        }
        return true;
    };
    if (!admissible(cap)) {
        double lo = 1e-12, hi = cap;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (admissible(mid) ? lo : hi) = mid;
        }
        c.lambda0 = lo;
    }
    return c;
}

inline double law_G(double lam, const LawCoefficients& c) {
    if (!(lam > 0.0 && lam <= c.lambda0))
        throw ConfigInvalid("law_G: need 0 < lambda <= lambda0");
    detail::require_denominator(lam, c.lambda0, c);
    const double closed = 1.0 / std::sqrt(lam) - 1.0 / std::sqrt(c.lambda0);
    if (c.c2 == 0.0 && c.c3 == 0.0 && c.c4s == 0.0) return closed;
    // Remainder in u = log xi: bounded smooth integrand on a short interval.
    auto f = [&](double u) {
        const double xi = std::exp(u);
        return (c.c2 + c.c3 * xi + 2.0 * c.c4s * xi * xi * u) / law_denominator(xi * xi, c);
    };
    const double rem = detail::adaptive_panels(f, 0.5 * std::log(lam), 0.5 * std::log(c.lambda0));
    return closed + rem;
}

// dG/dlambda, explicit from the integrand.
inline double law_G_prime(double lam, const LawCoefficients& c) {
    return -1.0 / (lam * std::sqrt(lam) * law_denominator(lam, c));
}

// Monotone inversion of G on (0, lambda0]: bracket by halving, tighten by
// bisection, finish with Newton kept inside the bracket.
inline double invert_G(double v, const LawCoefficients& c) {
    if (!(v >= 0.0)) throw ConfigInvalid("invert_G: v >= 0 required");
    if (v == 0.0) return c.lambda0;
    const double tol = 1e-11 * (1.0 + v);
    double lo = std::min(c.lambda0, 1.0 / ((v + 1.0 / std::sqrt(c.lambda0)) *
                                           (v + 1.0 / std::sqrt(c.lambda0))));
    while (law_G(lo, c) < v) lo *= 0.5; // G grows as lambda -> 0
    double hi = c.lambda0;
    for (int it = 0; it < 20; ++it) {
        const double mid = std::sqrt(lo * hi);
        (law_G(mid, c) >= v ? lo : hi) = mid;
    }
    double x = std::sqrt(lo * hi);
    for (int it = 0; it < 60; ++it) {
        const double g = law_G(x, c);
        if (std::abs(g - v) <= tol) return x;
        (g >= v ? lo : hi) = x;
        double step = (g - v) / law_G_prime(x, c);
        double next = x - step;
        if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
        x = next;
    }
    return x;
}

struct FormalTrajectory {
    LawCoefficients coeff;
    std::vector<double> s;               // rescaled times, increasing, all < 0
    std::vector<double> lam;             // lambda(s) = invert_G(-s), increasing
    std::vector<double> sigma;           // accumulated position, positive convention
    std::vector<double> sigma_reflected; // -sigma, satisfies the 1/s display
    std::vector<double> t;               // physical time, t -> 0 as s -> -inf
};

// Sample the formal flow on a log-spaced grid of rescaled times. steps is
// the number of intervals; steps + 1 rows are produced.
inline FormalTrajectory integrate_formal(const LawCoefficients& c, double s_start, double s_end,
                                         int steps) {
    if (!(s_start < s_end && s_end < -1.0))
        throw ConfigInvalid("integrate_formal: need s_start < s_end < -1");
    if (steps < 8) throw ConfigInvalid("integrate_formal: steps >= 8");
    FormalTrajectory tr;
    tr.coeff = c;
    const double u0 = std::log(-s_start), u1 = std::log(-s_end);
    for (int i = 0; i <= steps; ++i) {
        const double s = -std::exp(u0 + (u1 - u0) * i / steps);
        const double lam = invert_G(-s, c);
        const double r = std::sqrt(lam);
        detail::require_denominator(1e-12 * lam, lam, c);
        const double sig = detail::adaptive_panels(
            [&](double xi) { return 2.0 / law_denominator(xi * xi, c); }, 0.0, r);
        const double t = detail::adaptive_panels(
            [&](double xi) {
                const double x2 = xi * xi;
                return 2.0 * x2 * x2 / law_denominator(x2, c);
            },
            0.0, r);
        tr.s.push_back(s);
        tr.lam.push_back(lam);
        tr.sigma.push_back(sig);
        tr.sigma_reflected.push_back(-sig);
        tr.t.push_back(t);
    }
    return tr;
}

inline double beta_tilde(double lam, const LawCoefficients& c) {
    const double r = std::sqrt(lam);
    return -2.0 * r + c.c2 * lam + c.c3 * lam * r + c.c4s * lam * lam * std::log(lam);
}

struct LawAsymptotics {
    double lam_exponent = 0.0;   // slope of log lambda vs log t, deep end
    double sigma_exponent = 0.0; // slope of log sigma vs log t, deep end
    double ratio_envelope = 0.0; // max |lambda/(5t)^{2/5} - 1| / (t^{1/5}|log t|)
};

// Fit the physical-time exponents over the deepest 40% of the log|s| span,
// where the log-corrections of the law have decayed.
inline LawAsymptotics physical_asymptotics(const FormalTrajectory& tr) {
    const int n = (int)tr.s.size();
    if (n < 16) throw ConfigInvalid("physical_asymptotics: trajectory too short");
    const double lo = std::log(-tr.s.front()), hi = std::log(-tr.s.back());
    const double cut = lo + 0.4 * (hi - lo); // log|s| >= cut is the deep end
    auto slope = [&](const std::vector<double>& f) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int i = 0; i < n; ++i) {
            if (std::log(-tr.s[i]) < cut) continue;
            const double x = std::log(tr.t[i]), y = std::log(f[i]);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
            ++m;
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    LawAsymptotics out;
    out.lam_exponent = slope(tr.lam);
    out.sigma_exponent = slope(tr.sigma);
    for (int i = 0; i < n; ++i) {
        if (std::log(-tr.s[i]) < cut) continue;
        const double t = tr.t[i];
        const double dev = std::abs(tr.lam[i] / std::pow(5.0 * t, 0.4) - 1.0);
        out.ratio_envelope =
            std::max(out.ratio_envelope, dev / (std::pow(t, 0.2) * std::abs(std::log(t))));
    }
    return out;
}

// Standard check panel for a computed trajectory. C-stability checks compare
// the fitted prefactor of a log|s|/|s|^k bound between the shallow and deep
// halves of the window; the law's own constants drift slowly (the fitted C
// approaches |c2| from below), so a factor-3 window is the honest rendering
// of "stable".
inline RunRecord law_record(const FormalTrajectory& tr) {
    RunRecord rec;
    rec.experiment = "law";
    const LawCoefficients& c = tr.coeff;
    const int n = (int)tr.s.size();

    // Defining relation G(lambda(s)) = -s on a thinned subset (G is costly).
    double grel = 0.0;
    for (int i = 0; i < n; i += std::max(1, n / 16)) {
        grel = std::max(grel,
                        std::abs(law_G(tr.lam[i], c) + tr.s[i]) / (1.0 + std::abs(tr.s[i])));
    }
    rec.checks.push_back(check_below("G(lambda(s)) = -s", "G(lambda(s)) + s = 0", grel, 1e-9));

    // Monotonicity of the three series.
    bool mono = true;
    for (int i = 1; i < n; ++i)
        mono = mono && tr.lam[i] > tr.lam[i - 1] && tr.sigma[i] > tr.sigma[i - 1] &&
               tr.t[i] > tr.t[i - 1];
    rec.checks.push_back(check_below("lambda, sigma, t monotone in s",
                                     "lambda_s > 0, sigma_s = lambda > 0, t_s = lambda^3 > 0",
                                     mono ? 0.0 : 1.0, 0.5));

    // Midpoint difference quotients on a log-spaced grid carry an O(h^2)
    // relative error, h the log|s| spacing.
    const double hlog = std::log(tr.s.front() / tr.s.back()) / (n - 1);
    const double fd_tol = 20.0 * hlog * hlog;

    // lambda_s/lambda + beta_tilde = 0: midpoint differences of the sampled
    // trajectory against the closed rate, relative to the rate itself.
    double rode = 0.0;
    for (int i = 1; i < n; ++i) {
        const double lm = 0.5 * (tr.lam[i] + tr.lam[i - 1]);
        const double rate = (tr.lam[i] - tr.lam[i - 1]) / (tr.s[i] - tr.s[i - 1]) / lm;
        rode = std::max(rode, std::abs(rate + beta_tilde(lm, c)) / std::abs(beta_tilde(lm, c)));
    }
    rec.checks.push_back(
        check_below("lambda_s/lambda + beta_tilde = 0", "midpoint rate vs -beta_tilde", rode,
                    fd_tol));

    // lambda^2 dsigma/dt = 1 along the flow (exact identity of the system).
    double rsig = 0.0;
    for (int i = 1; i < n; ++i) {
        const double lm = 0.5 * (tr.lam[i] + tr.lam[i - 1]);
        const double v = lm * lm * (tr.sigma[i] - tr.sigma[i - 1]) / (tr.t[i] - tr.t[i - 1]);
        rsig = std::max(rsig, std::abs(v - 1.0));
    }
    rec.checks.push_back(check_below("lambda^2 dsigma/dt = 1", "midpoint slope of sigma vs t",
                                     rsig, fd_tol));

    // |s^2 lambda - 1| <= C log|s|/|s| with C stable across the window.
    double cmax_sh = 0.0, cmax_dp = 0.0, cmin_dp = 1e300;
    const double mid_logs = 0.5 * (std::log(-tr.s.front()) + std::log(-tr.s.back()));
    for (int i = 0; i < n; ++i) {
        const double as = -tr.s[i];
        if (as < 10.0) continue;
        const double cfit = std::abs(as * as * tr.lam[i] - 1.0) * as / std::log(as);
        if (std::log(as) > mid_logs)
            cmax_dp = std::max(cmax_dp, cfit), cmin_dp = std::min(cmin_dp, cfit);
        else
            cmax_sh = std::max(cmax_sh, cfit);
    }
    const double cball = std::max(cmax_sh, cmax_dp);
    rec.checks.push_back(check_below("|s^2 lambda - 1| <= C log|s|/|s|, C bounded",
                                     "fitted C stays O(|c2|)", cball,
                                     10.0 * (1.0 + std::abs(c.c2) + std::abs(c.c3))));
    rec.checks.push_back(check_below("s^2 lambda prefactor stability",
                                     "deep-half fitted C within factor 3", cmax_dp / cmin_dp,
                                     3.0));

    // |sigma_reflected - 1/s| <= C log|s|/s^2, C bounded.
    double csig = 0.0;
    for (int i = 0; i < n; ++i) {
        const double as = -tr.s[i];
        if (as < 10.0) continue;
        csig = std::max(csig, std::abs(tr.sigma_reflected[i] - 1.0 / tr.s[i]) * as * as /
                                  std::log(as));
    }
    rec.checks.push_back(check_below("|sigma_refl - 1/s| <= C log|s|/s^2",
                                     "reflected position against 1/s", csig,
                                     10.0 * (1.0 + std::abs(c.c2) + std::abs(c.c3))));

    // 5 t |s|^5 -> 1. The deviation is intrinsically ~ 2|c2| log|s|/|s|
    // (plus a lambda0^{-1/2}/|s| offset that survives even with zero
    // coefficients), so at |s| = 100 it sits near 0.5 and crosses 0.1 only
    // around |s| ~ 3e3. Monotone decay and smallness at the deep end are the
    // attainable facts; the fixed 0.1-from-100-on gate is also reported and
    // fails for any admissible coefficient set.
    double dev_at_end = 0.0, dev_max_100 = 0.0;
    bool dev_decreasing = true, first = true;
    double prev_dev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double as = -tr.s[i];
        if (as < 100.0) continue;
        const double dev = std::abs(5.0 * tr.t[i] * std::pow(as, 5.0) - 1.0);
        // rows run deep -> shallow, so the deviation should grow along i
        dev_max_100 = std::max(dev_max_100, dev);
        if (first) dev_at_end = dev, first = false;
        else if (dev < prev_dev) dev_decreasing = false;
        prev_dev = dev;
    }
    rec.checks.push_back(check_below("5 t |s|^5 deviation decreasing in |s|",
                                     "|5 t |s|^5 - 1| monotone on |s| >= 100",
                                     dev_decreasing ? 0.0 : 1.0, 0.5));
    rec.checks.push_back(check_below("5 t |s|^5 -> 1 at the deep end",
                                     "|5 t |s|^5 - 1| at max |s|", dev_at_end, 0.1));
    rec.checks.push_back(check_below("max |5 t |s|^5 - 1| on |s| >= 100",
                                     "fixed 0.1 window from |s| = 100 on", dev_max_100, 0.1));

    const LawAsymptotics a = physical_asymptotics(tr);
    rec.checks.push_back(
        check_abs("lambda(t) exponent", "lambda ~ (5t)^{2/5}", a.lam_exponent, 0.4, 0.005));
    rec.checks.push_back(
        check_abs("sigma(t) exponent", "sigma ~ (5t)^{1/5}", a.sigma_exponent, 0.2, 0.005));
    rec.checks.push_back(check_below("lambda/(5t)^{2/5} envelope",
                                     "|ratio - 1| <= C t^{1/5}|log t|", a.ratio_envelope,
                                     10.0 * (1.0 + std::abs(c.c2))));
    return rec;
}

} // namespace gkdvlab
