#pragma once

// Localized Lyapunov weights psi_B, phi_B and the weighted norms built on
// them. The unit-scale pieces are
//
//   psi(x) = e^x (x < -1),            1 (x > -1/2)
//   phi(x) = e^x (x < -1),  x + 1 (-1/2 < x < 1/2),  2 - e^{-x} (x > 1)
//
// both nondecreasing, bridged across the gap intervals by C^2 interpolants,
// and scaled as psi_B(y) = psi(y/B), phi_B(y) = phi(y/B) with B >= 100.
// The sampled inequality suite the construction must satisfy:
//
//   (1/2) e^{y/B} <= psi_B <= 3 e^{y/B}            (y < 0)
//   (1/3) e^{y/B} <= phi_B <= 3 e^{y/B}            (y < 0)
//   (1/3) e^{-|y|/B} <= B phi_B' <= 3 e^{-|y|/B} <= 9 phi_B   (all y)
//   (1/2) phi_B <= psi_B <= 3 phi_B                (all y)
//   psi_B' + B^2|psi_B'''| + B^2|phi_B'''| <= C phi_B'  (all y, C "O(1)")
//
// psi's gap takes the plain C^2 quintic Hermite (it is monotone there). For
// phi the quintic violates the phi' lower bound - the gap mean slope 0.264
// sits far below both end slopes, so the quintic dips negative - hence phi
// is built in derivative space: phi' = cubic Hermite ramp, constant plateau,
// cubic Hermite ramp, with the plateau level solved exactly from the area
// constraint (phi then matches value, slope and curvature of both pieces).
//
// Norms: N_B(f) = (int ((d_y f)^2 + f^2) phi_B)^{1/2} and the solitonic
// L^2 norm with weight e^{-|y|/10}.

#include "fft.hpp"
#include "quadrature.hpp"
#include "run_record.hpp"

namespace gkdvlab {

namespace detail {

// Quintic Hermite on [0,1] from scaled data (value, h*d1, h^2*d2) per end.
struct Quintic {
    double a0, a1, a2, a3, a4, a5;
    static Quintic fit(double v0, double m0, double k0, double v1, double m1, double k1) {
        const double d = v1 - v0 - m0 - 0.5 * k0;
        const double r2 = m1 - m0 - k0, r3 = k1 - k0;
        return {v0,
                m0,
                0.5 * k0,
                10.0 * d - 4.0 * r2 + 0.5 * r3,
                -15.0 * d + 7.0 * r2 - r3,
                6.0 * d - 3.0 * r2 + 0.5 * r3};
    }
    double eval(double t, int m) const {
        switch (m) {
            case 0: return a0 + t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
            case 1:
                return a1 + t * (2 * a2 + t * (3 * a3 + t * (4 * a4 + t * 5 * a5)));
            case 2: return 2 * a2 + t * (6 * a3 + t * (12 * a4 + t * 20 * a5));
            default: return 6 * a3 + t * (24 * a4 + t * 60 * a5);
        }
    }
};

// Cubic c0 + c1 t + c2 t^2 + c3 t^3 on [a, a+w] (t = (x-a)/w), as a slope
// profile; integral() is its exact area in x.
struct Ramp {
    double a, w, c0, c1, c2, c3;
    static Ramp fit(double a, double w, double va, double ma, double vb, double mb) {
        // ma, mb are slopes in x; Hermite in t needs them scaled by w
        return {a,
                w,
                va,
                ma * w,
                3.0 * (vb - va) - (2.0 * ma + mb) * w,
                -2.0 * (vb - va) + (ma + mb) * w};
    }
    double eval(double x, int m) const {
        const double t = (x - a) / w;
        double v;
        switch (m) {
            case 0: v = c0 + t * (c1 + t * (c2 + t * c3)); break;
            case 1: v = c1 + t * (2 * c2 + t * 3 * c3); break;
            default: v = 2 * c2 + t * 6 * c3; break;
        }
        return v / std::pow(w, m);
    }
    double integral(double x) const { // int_a^x
        const double t = (x - a) / w;
        return w * (t * (c0 + t * (c1 / 2 + t * (c2 / 3 + t * c3 / 4))));
    }
    double integral() const { return integral(a + w); }
};

struct WeightShapes {
    Quintic psi_gap;          // psi on [-1,-1/2]
    Ramp p1l, p1r, p2l, p2r;  // phi' ramps on the two gaps
    double mu1, mu2;          // phi' plateau levels
    double w;                 // ramp width
    // cumulative phi values at the interior breakpoints
    double phi_m1, phi_p1l_end, phi_plat1_end, phi_p05;
    double phi_05, phi_p2l_end, phi_plat2_end;

    WeightShapes() {
        const double e1 = std::exp(-1.0);
        psi_gap = Quintic::fit(e1, 0.5 * e1, 0.25 * e1, 1.0, 0.0, 0.0);

        w = 0.05;
        const double area = 0.5 - e1; // both gaps carry the same increment
        // mu (L - w) = area - (g0 + g1) w/2 - (g0' - g1') w^2/12, L = 1/2
        mu1 = (area - (e1 + 1.0) * w / 2 - e1 * w * w / 12) / (0.5 - w);
        mu2 = (area - (1.0 + e1) * w / 2 - e1 * w * w / 12) / (0.5 - w);

        p1l = Ramp::fit(-1.0, w, e1, e1, mu1, 0.0);
        p1r = Ramp::fit(-0.5 - w, w, mu1, 0.0, 1.0, 0.0);
        p2l = Ramp::fit(0.5, w, 1.0, 0.0, mu2, 0.0);
        p2r = Ramp::fit(1.0 - w, w, mu2, 0.0, e1, -e1);

        phi_m1 = e1;
        phi_p1l_end = phi_m1 + p1l.integral();
        phi_plat1_end = phi_p1l_end + mu1 * (0.5 - 2 * w);
        phi_p05 = phi_plat1_end + p1r.integral(); // = 1/2 by construction
        phi_05 = 1.5;
        phi_p2l_end = phi_05 + p2l.integral();
        phi_plat2_end = phi_p2l_end + mu2 * (0.5 - 2 * w);
    }
};

inline const WeightShapes& weight_shapes() {
    static WeightShapes s;
    return s;
}

} // namespace detail

// Unit-scale weights and derivatives (m = 0..3); psi_B(y) = psi_unit(y/B).
inline double psi_unit(double x, int m = 0) {
    if (x < -1.0) return std::exp(x);
    if (x >= -0.5) return m == 0 ? 1.0 : 0.0;
    const double h = 0.5;
    return detail::weight_shapes().psi_gap.eval((x + 1.0) / h, m) / std::pow(h, m);
}

inline double phi_unit(double x, int m = 0) {
    const auto& s = detail::weight_shapes();
    if (x < -1.0) return std::exp(x);
    if (x >= -0.5 && x <= 0.5) {
        if (m == 0) return x + 1.0;
        return m == 1 ? 1.0 : 0.0;
    }
    if (x > 1.0) {
        const double e = std::exp(-x);
        return m == 0 ? 2.0 - e : (m == 1 ? e : (m == 2 ? -e : e));
    }
    // gap interiors: phi' is the ramp/plateau profile
    const detail::Ramp* ramp = nullptr;
    double base = 0.0, plat_start = 0.0, plat_base = 0.0;
    bool in_plateau = false;
    double mu = 0.0;
    if (x < -0.5) {
        mu = s.mu1;
        if (x < -1.0 + s.w) ramp = &s.p1l, base = s.phi_m1;
        else if (x < -0.5 - s.w)
            in_plateau = true, plat_start = -1.0 + s.w, plat_base = s.phi_p1l_end;
        else ramp = &s.p1r, base = s.phi_plat1_end;
    } else {
        mu = s.mu2;
        if (x < 0.5 + s.w) ramp = &s.p2l, base = s.phi_05;
        else if (x < 1.0 - s.w)
            in_plateau = true, plat_start = 0.5 + s.w, plat_base = s.phi_p2l_end;
        else ramp = &s.p2r, base = s.phi_plat2_end;
    }
    if (in_plateau) {
        if (m == 0) return plat_base + mu * (x - plat_start);
        return m == 1 ? mu : 0.0;
    }
    if (m == 0) return base + ramp->integral(x);
    return ramp->eval(x, m - 1);
}

inline double psi_B(double y, double B, int m = 0) { return psi_unit(y / B, m) / std::pow(B, m); }
inline double phi_B(double y, double B, int m = 0) { return phi_unit(y / B, m) / std::pow(B, m); }

struct WeightNorms {
    double NB = 0.0;    // (int ((d_y f)^2 + f^2) phi_B)^{1/2}
    double L2sol = 0.0; // (int f^2 e^{-|y|/10})^{1/2}
};

inline double l2sol_norm(const Field& f) {
    const LineGrid& g = f.line();
    Field w2{f.grid, std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) {
        const double y = g.y(i);
        w2.values[i] = f.values[i] * f.values[i] * std::exp(-std::abs(y) / 10.0);
    }
    return std::sqrt(std::max(0.0, integrate(w2)));
}

inline WeightNorms weight_norms(const Field& f, double B) {
    if (!(B >= 100.0)) throw ConfigInvalid("weight_norms: B >= 100");
    const LineGrid& g = f.line();
    const Field df = differentiate(f, 1);
    Field nb{f.grid, std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) {
        const double y = g.y(i);
        nb.values[i] =
            (df.values[i] * df.values[i] + f.values[i] * f.values[i]) * phi_B(y, B, 0);
    }
    WeightNorms out;
    out.NB = std::sqrt(std::max(0.0, integrate(nb)));
    out.L2sol = l2sol_norm(f);
    return out;
}

// Sampled inequality suite at scale B: run over x = y/B in [-8, 8].
inline std::vector<Check> weight_checks(double B, int samples = 16001) {
    std::vector<Check> out;
    double r1 = 1e300, r2 = 1e300, r3 = 1e300, r4 = 1e300, r5 = 1e300; // min of lhs-slack
    double u1 = -1e300, u2 = -1e300, u3 = -1e300, u4 = -1e300;         // max of upper-slack
    double mono = 1e300, third = 0.0, chain = 1e300;
    for (int i = 0; i < samples; ++i) {
        const double x = -8.0 + 16.0 * i / (samples - 1);
        const double y = B * x;
        const double ps = psi_B(y, B, 0), ph = phi_B(y, B, 0);
        const double ps1 = psi_B(y, B, 1), ph1 = phi_B(y, B, 1);
        const double ps3 = psi_B(y, B, 3), ph3 = phi_B(y, B, 3);
        const double ex = std::exp(x), emx = std::exp(-std::abs(x));
        if (y < 0.0) {
            r1 = std::min(r1, ps / ex - 0.5);
            u1 = std::max(u1, ps / ex - 3.0);
            r2 = std::min(r2, ph / ex - 1.0 / 3.0);
            u2 = std::max(u2, ph / ex - 3.0);
        }
        r3 = std::min(r3, B * ph1 / emx - 1.0 / 3.0);
        u3 = std::max(u3, B * ph1 / emx - 3.0);
        chain = std::min(chain, 9.0 * ph - 3.0 * emx);
        r4 = std::min(r4, ps / ph - 0.5);
        u4 = std::max(u4, ps / ph - 3.0);
        mono = std::min(mono, std::min(ps1, ph1));
        third = std::max(third, (ps1 + B * B * (std::abs(ps3) + std::abs(ph3))) / ph1);
        r5 = std::min(r5, ph1);
    }
    out.push_back(check_below("psi lower bound (y<0)", "(1/2)e^{y/B} <= psi_B", -r1, 0.0));
    out.push_back(check_below("psi upper bound (y<0)", "psi_B <= 3e^{y/B}", u1, 0.0));
    out.push_back(check_below("phi lower bound (y<0)", "(1/3)e^{y/B} <= phi_B", -r2, 0.0));
    out.push_back(check_below("phi upper bound (y<0)", "phi_B <= 3e^{y/B}", u2, 0.0));
    out.push_back(
        check_below("phi' lower bound", "(1/3)e^{-|y|/B} <= B phi_B'", -r3, 0.0));
    out.push_back(check_below("phi' upper bound", "B phi_B' <= 3e^{-|y|/B}", u3, 0.0));
    out.push_back(check_below("phi' chains to phi", "3e^{-|y|/B} <= 9 phi_B", -chain, 0.0));
    out.push_back(check_below("psi/phi lower", "(1/2) phi_B <= psi_B", -r4, 0.0));
    out.push_back(check_below("psi/phi upper", "psi_B <= 3 phi_B", u4, 0.0));
    out.push_back(check_below("weights nondecreasing", "psi_B', phi_B' >= 0", -mono, 0.0));
    out.push_back(check_below("third-derivative control",
                              "psi_B' + B^2|psi_B'''| + B^2|phi_B'''| <= C phi_B'", third,
                              2e4));
    out.push_back(check_below("phi' positive", "phi strictly increasing", -r5, 0.0));
    return out;
}

} // namespace gkdvlab
