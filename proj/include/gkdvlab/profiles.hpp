#pragma once

// The blow-up profile hierarchy. Starting from the ground state this builds,
// in dependency order: the resonance profile R (L R = 5Q^4, so L(1+R) = 1),
// the dilation profile P ((L P)' = Lam Q with constant left limit 2 m0), the
// bounded odd step A1 = P - m0 (1 + R), and the correctors A2..A5, A5s that
// cancel the expansion of the rescaled flow order by order. Each stage j
// assembles a source F_j from the previous profiles, picks the free constant
// (c2, c3, c4s) so that (F_j, Q) = 0, and solves (L A_j)' = F_j.
//
// Left-tail bookkeeping: a profile in class k has a degree-<=k polynomial
// asymptote at y -> -infinity (k = -1 means decay). Solving (L A)' = F for a
// source of class k uses the splitting A = Atilde - T with tail primitive
// T(y) = int_y^inf F and reduced source S = F' - 5 Q^4 T of class k - 2, so
// that L Atilde = S is a bordered problem of the standard kind and L A = -T.

#include <array>
#include <string>

#include "cutoffs.hpp"
#include "linearized.hpp"
#include "quadrature.hpp"

namespace gkdvlab {

struct ProfileSet {
    GroundState gs;
    Field R, P, A1, A2, A3, A4, A5, A5s;
    Field V1, V2, V3, V4, V5, V4s, V5s;
    double c1 = -2.0, c2 = 0.0, c3 = 0.0, c4s = 0.0;
    AsymptoticClass cls_R, cls_P, cls_A1, cls_A2, cls_A3, cls_A4, cls_A5, cls_A5s;

    LinearizedOp linearized() const { return make_linearized(gs); }
};

struct SourceBundle {
    Field F2, F3, F4, F5, F5s;
    Field G2;              // int_{-inf}^y F2, the stage-2 right side
    Field S3, S4, S5, S5s; // reduced sources L Atilde = S
    Field M2, M3, M4, M5, M5s;
    AsymptoticClass cls_F2, cls_F3, cls_F4, cls_F5, cls_F5s;
};

struct OmegaReport {
    int j = 0;
    double computed = 0.0;
    double predicted = 0.0;
    double rel_err = 0.0;
};

// Declared left-tail degrees. Sources: F2 decays, F3/F4/F5s have constant
// tails, F5 a linear one. Profiles: A2 decays, A3/A4/A5s are linear-tailed,
// A5 quadratic; P and A1 have constant limits 2 m0 and m0.
inline int source_degree(int stage, bool star = false) {
    if (star) return 0;
    switch (stage) {
        case 2: return -1;
        case 3:
        case 4: return 0;
        case 5: return 1;
    }
    throw ConfigInvalid("source_degree: stage must be 2..5");
}

inline int profile_degree(int stage, bool star = false) {
    if (star) return 1;
    switch (stage) {
        case 2: return -1;
        case 3:
        case 4: return 1;
        case 5: return 2;
    }
    throw ConfigInvalid("profile_degree: stage must be 2..5");
}

// Fit the left tail at the declared degree and confirm membership: the fit
// must track the field over the leftmost 10%, and (optionally) the right
// tail must decay. Returns the fitted class.
inline AsymptoticClass check_left_class(const Field& f, int k, const std::string& what,
                                        double tol = 1e-6, bool check_right = true) {
    const LineGrid& g = f.line();
    AsymptoticClass cls;
    cls.k = k;
    if (k >= 0) cls.left_poly = fit_left_tail(f, k).coeffs;
    const int m10 = g.n / 10;
    double dev = 0.0;
    for (int i = kEdgeSkip; i < m10; ++i)
        dev = std::max(dev, std::abs(f[i] - polyval(cls.left_poly, g.y(i))));
    if (dev > tol)
        throw ClassViolation(what + ": left tail off its degree-" + std::to_string(k) +
                             " polynomial by " + std::to_string(dev));
    if (check_right) {
        double rdev = 0.0;
        for (int i = g.n - m10; i < g.n - kEdgeSkip; ++i) rdev = std::max(rdev, std::abs(f[i]));
        if (rdev > tol) throw ClassViolation(what + ": right tail fails to decay: " + std::to_string(rdev));
    }
    return cls;
}

// Replace the far tails by the known asymptotics. Beyond |y| ~ 0.55 y_max
// every profile differs from its left polynomial (resp. from its right
// limit) by an exponentially small remainder, ~5e-15 on the default grid,
// so whatever the solver left there is pure numerical floor. Left in place
// it gets re-amplified by the y f' terms and the stage constants of later
// sources; ramping it out keeps subsequent tails polynomial to machine
// precision. The ramp sits inside |y| < 0.65 y_max so the tail-fit and
// membership windows further out see pure asymptote. The genuine
// membership test always runs on the raw solve first.
inline Field pin_tails(const Field& f, const std::vector<double>& left_poly,
                       double right_limit = 0.0) {
    const LineGrid& g = f.line();
    const double start = 0.55 * g.y_max, stop = 0.65 * g.y_max;
    Field out = f;
    for (int i = 0; i < g.n; ++i) {
        const double y = g.y(i);
        if (y < -start) {
            const double base = polyval(left_poly, y);
            out[i] = base + (f[i] - base) * smooth_step((y + stop) / (stop - start));
        } else if (y > start) {
            out[i] = right_limit + (f[i] - right_limit) * smooth_step((stop - y) / (stop - start));
        }
    }
    return out;
}

// Sources inherit the floor of every profile they combine; pin them the
// same way (fit at the declared degree) before the stage solve.
inline Field pin_source(const Field& F, int stage, bool star = false) {
    const int deg = source_degree(stage, star);
    std::vector<double> poly;
    if (deg >= 0) poly = fit_left_tail(F, deg).coeffs;
    return pin_tails(F, poly);
}

// Generic coefficient of (log lambda)^l theta^j in (Q+V)^5 with V0 := Q:
// the sum over ordered 5-tuples of factors drawn from {V0..V5, V4s, V5s},
// evaluated by multiset enumeration with multinomial weights.
inline Field m_coefficient(const ProfileSet& ps, int l, int j) {
    const Field* f[8] = {&ps.gs.Q, &ps.V1, &ps.V2, &ps.V3, &ps.V4, &ps.V5, &ps.V4s, &ps.V5s};
    static constexpr int kThetaW[8] = {0, 1, 2, 3, 4, 5, 4, 5};
    static constexpr int kLogW[8] = {0, 0, 0, 0, 0, 0, 1, 1};
    static constexpr double kFact[6] = {1, 1, 2, 6, 24, 120};

    Field acc(Grid{ps.gs.grid});
    const int n = ps.gs.grid.n;
    for (int i1 = 0; i1 < 8; ++i1)
        for (int i2 = i1; i2 < 8; ++i2)
            for (int i3 = i2; i3 < 8; ++i3)
                for (int i4 = i3; i4 < 8; ++i4)
                    for (int i5 = i4; i5 < 8; ++i5) {
                        const int idx[5] = {i1, i2, i3, i4, i5};
                        int tw = 0, lw = 0;
                        int count[8] = {0};
                        for (int t = 0; t < 5; ++t) {
                            tw += kThetaW[idx[t]];
                            lw += kLogW[idx[t]];
                            ++count[idx[t]];
                        }
                        if (tw != j || lw != l) continue;
                        double mult = 120.0;
                        for (int q = 0; q < 8; ++q) mult /= kFact[count[q]];
                        for (int p = 0; p < n; ++p) {
                            double v = mult;
                            for (int t = 0; t < 5; ++t) v *= (*f[idx[t]])[p];
                            acc[p] += v;
                        }
                    }
    return acc;
}

// M_j = [theta^j](Q+V)^5 - 5 Q^4 V_j for j = 2..5 (the linear part is
// handled exactly by L and is excluded from the sources).
inline Field m_nonlinear(const ProfileSet& ps, int j) {
    const Field* vj[6] = {nullptr, &ps.V1, &ps.V2, &ps.V3, &ps.V4, &ps.V5};
    Field m = m_coefficient(ps, 0, j);
    const Field& q = ps.gs.Q;
    for (int p = 0; p < m.n(); ++p) {
        const double q2 = q[p] * q[p];
        m[p] -= 5.0 * q2 * q2 * (*vj[j])[p];
    }
    return m;
}

inline Field m_nonlinear_star(const ProfileSet& ps) {
    // 20 Q^3 V1 V4s
    Field m = ps.gs.Q3 * ps.V1 * ps.V4s;
    for (double& v : m.values) v *= 20.0;
    return m;
}

inline void materialize_v(ProfileSet& ps) {
    ps.V1 = ps.c1 * ps.A1;
    ps.V2 = ps.c2 * ps.P + ps.A2;
    ps.V3 = ps.c3 * ps.P + ps.A3;
    ps.V4 = ps.A4;
    ps.V5 = ps.A5;
    ps.V4s = ps.c4s * ps.P;
    ps.V5s = ps.A5s;
}

// F2 = c1 L1 V1 + M2',            F3 = c2 L1 V1 + c1 L2 V2 + M3',
// F4 = c3 L1 V1 + c2 L2 V2 + c1 L3 V3 + M4',
// F5 = c3 L2 V2 + c2 L3 V3 + c1 L4 V4 - c1 V4s + M5',
// F5s = c4s L1 V1 + c1 L4 V4s + M5s',   where Lk f = (1-k)/2 f + y f'.
inline Field assemble_source(const ProfileSet& ps, int stage, bool star = false) {
    auto d1 = [](const Field& f) { return fd_derivative(f, 1); };
    if (star)
        return ps.c4s * scaling_generator(ps.V1, 1) + ps.c1 * scaling_generator(ps.V4s, 4) +
               d1(m_nonlinear_star(ps));
    switch (stage) {
        case 2:
            return ps.c1 * scaling_generator(ps.V1, 1) + d1(m_nonlinear(ps, 2));
        case 3:
            return ps.c2 * scaling_generator(ps.V1, 1) + ps.c1 * scaling_generator(ps.V2, 2) +
                   d1(m_nonlinear(ps, 3));
        case 4:
            return ps.c3 * scaling_generator(ps.V1, 1) + ps.c2 * scaling_generator(ps.V2, 2) +
                   ps.c1 * scaling_generator(ps.V3, 3) + d1(m_nonlinear(ps, 4));
        case 5:
            return ps.c3 * scaling_generator(ps.V2, 2) + ps.c2 * scaling_generator(ps.V3, 3) +
                   ps.c1 * scaling_generator(ps.V4, 4) + (-ps.c1) * ps.V4s +
                   d1(m_nonlinear(ps, 5));
    }
    throw ConfigInvalid("assemble_source: stage must be 2..5");
}

inline double& stage_constant(ProfileSet& ps, int stage) {
    switch (stage) {
        case 3: return ps.c2;
        case 4: return ps.c3;
        case 5: return ps.c4s;
    }
    throw ConfigInvalid("stage_constant: stage must be 3..5");
}

// The source at each stage is affine in its free constant, so the value
// zeroing (F, Q) follows from two evaluations. This avoids transcribing the
// per-stage decompositions (F = c.F_1 + F_2) and is exact for affine maps.
inline double choose_constant(ProfileSet& ps, int stage) {
    double& c = stage_constant(ps, stage);
    c = 0.0;
    materialize_v(ps);
    const double a = inner(assemble_source(ps, stage), ps.gs.Q);
    c = 1.0;
    materialize_v(ps);
    const double b = inner(assemble_source(ps, stage), ps.gs.Q);
    const double scale = std::abs(a) + std::abs(b) + 1.0;
    if (std::abs(b - a) < 1e-12 * scale)
        throw DenominatorVanishes("choose_constant: (F,Q) insensitive to the stage constant");
    c = a / (a - b);
    materialize_v(ps);
    return c;
}

inline Field build_P(const LinearizedOp& op) {
    const GroundState& gs = *op.gs;
    Field h = cumulative_from_left(gs.LamQ);
    for (double& v : h.values) v += 2.0 * gs.m0;
    AsymptoticClass cls{0, {2.0 * gs.m0}};
    return invert_L(op, h, cls);
}

inline Field build_A1(const Field& P, const Field& R, double m0) {
    Field a1 = P - m0 * R;
    for (double& v : a1.values) v -= m0;
    const int n = a1.n();
    double parity = 0.0;
    for (int i = 0; i < n; ++i) parity = std::max(parity, std::abs(a1[i] + a1[n - 1 - i]));
    if (parity > 1e-6)
        throw OddnessViolation("A1 parity error " + std::to_string(parity) +
                               " (upstream boundary-value solve is off)");
    return a1;
}

// Solve (L A)' = F. Stage 2 integrates the (odd, decaying) source from the
// left and inverts directly; later stages use the tail-primitive splitting.
// The tail primitive int_y^inf F is cumulative quadrature from the right
// with zero start: the sources decay exponentially on the right, so the
// neglected remainder beyond y_max is below 1e-12.
inline Field build_A(const ProfileSet& ps, int stage, const Field& F, bool star = false) {
    const LinearizedOp op = ps.linearized();
    const std::string tag = star ? "A5s" : "A" + std::to_string(stage);
    if (stage == 2 && !star) {
        const Field G2 = cumulative_from_left(F);
        Field A = invert_L(op, G2, AsymptoticClass::decaying());
        const AsymptoticClass cls = check_left_class(A, -1, tag);
        return pin_tails(A, cls.left_poly);
    }
    const Field T = cumulative_from_right(F);
    const int k_a = profile_degree(stage, star);
    Field S = fd_derivative(F, 1);
    for (int i = 0; i < S.n(); ++i) {
        const double q2 = ps.gs.Q[i] * ps.gs.Q[i];
        S[i] -= 5.0 * q2 * q2 * T[i];
    }
    const Field At = invert_L(op, S, AsymptoticClass::poly_degree(k_a - 2));
    Field A = At - T;
    const AsymptoticClass cls = check_left_class(A, k_a, tag);
    return pin_tails(A, cls.left_poly);
}

// Omega_j = (L_{j-1} P + y A1' + 20 (Q^3 A1 P)', Q); the identity
// Omega_j = (5-j)/2 m0^2 is what forces the log-lambda terms at stage 5.
inline Field omega_integrand(const ProfileSet& ps, int j) {
    const LineGrid& g = ps.gs.grid;
    const Field a1p = fd_derivative(ps.A1, 1);
    Field out = scaling_generator(ps.P, j - 1);
    const Field cross = fd_derivative(ps.gs.Q3 * ps.A1 * ps.P, 1);
    for (int i = 0; i < g.n; ++i) out[i] += g.y(i) * a1p[i] + 20.0 * cross[i];
    return out;
}

inline OmegaReport compute_omega(int j, const ProfileSet& ps) {
    OmegaReport rep;
    rep.j = j;
    rep.computed = inner(omega_integrand(ps, j), ps.gs.Q);
    const double m0sq = ps.gs.m0 * ps.gs.m0;
    rep.predicted = 0.5 * (5 - j) * m0sq;
    rep.rel_err = std::abs(rep.computed - rep.predicted) /
                  (rep.predicted != 0.0 ? std::abs(rep.predicted) : m0sq);
    return rep;
}

inline ProfileSet build_profiles(const LineGrid& grid) {
    ProfileSet ps;
    ps.gs = build_ground_state(grid);
    const LinearizedOp op = ps.linearized();

    ps.R = invert_L(op, 5.0 * (ps.gs.Q3 * ps.gs.Q), AsymptoticClass::decaying());
    ps.R = pin_tails(ps.R, check_left_class(ps.R, -1, "R").left_poly);
    ps.P = build_P(op);
    ps.P = pin_tails(ps.P, check_left_class(ps.P, 0, "P").left_poly);
    ps.A1 = build_A1(ps.P, ps.R, ps.gs.m0);

    // zero placeholders so every source assembly below is well-defined
    const Field zero(Grid{grid});
    ps.A2 = ps.A3 = ps.A4 = ps.A5 = ps.A5s = zero;
    materialize_v(ps);

    ps.A2 = build_A(ps, 2, pin_source(assemble_source(ps, 2), 2));
    materialize_v(ps);

    ps.c2 = choose_constant(ps, 3);
    ps.A3 = build_A(ps, 3, pin_source(assemble_source(ps, 3), 3));
    materialize_v(ps);

    ps.c3 = choose_constant(ps, 4);
    ps.A4 = build_A(ps, 4, pin_source(assemble_source(ps, 4), 4));
    materialize_v(ps);

    ps.c4s = choose_constant(ps, 5);
    ps.A5 = build_A(ps, 5, pin_source(assemble_source(ps, 5), 5));
    ps.A5s = build_A(ps, 5, pin_source(assemble_source(ps, 5, true), 5, true), true);
    materialize_v(ps);

    ps.cls_R = check_left_class(ps.R, -1, "R");
    ps.cls_P = check_left_class(ps.P, 0, "P");
    ps.cls_A1 = check_left_class(ps.A1, 0, "A1", 1e-6, false); // right limit is -m0
    ps.cls_A2 = check_left_class(ps.A2, -1, "A2");
    ps.cls_A3 = check_left_class(ps.A3, 1, "A3");
    ps.cls_A4 = check_left_class(ps.A4, 1, "A4");
    ps.cls_A5 = check_left_class(ps.A5, 2, "A5");
    ps.cls_A5s = check_left_class(ps.A5s, 1, "A5s");
    return ps;
}

// Re-assemble every source (and its reduced form) from a finished set; used
// by the verifier and by consumers that need the F fields themselves.
inline SourceBundle build_all_sources(const ProfileSet& ps) {
    SourceBundle sb;
    sb.M2 = m_nonlinear(ps, 2);
    sb.M3 = m_nonlinear(ps, 3);
    sb.M4 = m_nonlinear(ps, 4);
    sb.M5 = m_nonlinear(ps, 5);
    sb.M5s = m_nonlinear_star(ps);
    sb.F2 = assemble_source(ps, 2);
    sb.F3 = assemble_source(ps, 3);
    sb.F4 = assemble_source(ps, 4);
    sb.F5 = assemble_source(ps, 5);
    sb.F5s = assemble_source(ps, 5, true);
    sb.G2 = cumulative_from_left(sb.F2);

    auto reduce = [&ps](const Field& F) {
        const Field T = cumulative_from_right(F);
        Field S = fd_derivative(F, 1);
        for (int i = 0; i < S.n(); ++i) {
            const double q2 = ps.gs.Q[i] * ps.gs.Q[i];
            S[i] -= 5.0 * q2 * q2 * T[i];
        }
        return S;
    };
    sb.S3 = reduce(sb.F3);
    sb.S4 = reduce(sb.F4);
    sb.S5 = reduce(sb.F5);
    sb.S5s = reduce(sb.F5s);

    sb.cls_F2 = check_left_class(sb.F2, source_degree(2), "F2", 1e-5);
    sb.cls_F3 = check_left_class(sb.F3, source_degree(3), "F3", 1e-5);
    sb.cls_F4 = check_left_class(sb.F4, source_degree(4), "F4", 1e-5);
    sb.cls_F5 = check_left_class(sb.F5, source_degree(5), "F5", 1e-5);
    sb.cls_F5s = check_left_class(sb.F5s, source_degree(5, true), "F5s", 1e-5);
    return sb;
}

} // namespace gkdvlab
