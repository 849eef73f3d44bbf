#pragma once

// The explicit ground state Q(y) = (3 sech^2(2y))^{1/4}, the unique even
// positive decaying solution of -Q'' + Q - Q^5 = 0, together with its
// closed-form derivative fields, mass functionals, and the traveling
// soliton solution on a periodic box.

#include "fft.hpp"
#include "quadrature.hpp"

namespace gkdvlab {

inline double q_value(double y) {
    return std::pow(3.0, 0.25) * std::sqrt(1.0 / std::cosh(2.0 * y));
}
inline double q_prime_value(double y) { return -q_value(y) * std::tanh(2.0 * y); }
inline double lam_q_value(double y) {
    return q_value(y) * (0.5 - y * std::tanh(2.0 * y));
}

// Flush magnitudes below the threshold to zero; keeps far-tail noise out of
// the bordered solves without affecting any quadrature at double precision.
inline Field flush_tails(Field f, double threshold = 1e-14) {
    for (double& v : f.values)
        if (std::abs(v) < threshold) v = 0.0;
    return f;
}

struct GroundState {
    LineGrid grid;
    Field Q, Qp, Q3, LamQ;
    double mass = 0.0; // integral of Q^2
    double m0 = 0.0;   // (1/4) integral of Q
};

inline GroundState build_ground_state(const LineGrid& g) {
    if (!g.symmetric()) throw ConfigInvalid("build_ground_state: grid must be symmetric");
    GroundState gs{g,
                   flush_tails(sample(g, q_value)),
                   flush_tails(sample(g, q_prime_value)),
                   flush_tails(sample(g, [](double y) {
                       double q = q_value(y);
                       return q * q * q;
                   })),
                   flush_tails(sample(g, lam_q_value))};
    gs.mass = integrate(gs.Q * gs.Q);
    gs.m0 = 0.25 * integrate(gs.Q);
    return gs;
}

// (mass, energy) = (int u^2, 1/2 int (du)^2 - 1/6 int u^6).
inline std::pair<double, double> mass_energy(const Field& u) {
    const Field du = differentiate(u, 1);
    const Field u2 = u * u;
    const Field u6 = u2 * u2 * u2;
    return {integrate(u2), 0.5 * integrate(du * du) - integrate(u6) / 6.0};
}

// Soliton solution of the evolution equation: lambda^{-1/2} Q((x - t/lambda^2
// - sigma)/lambda), traveling with speed 1/lambda^2.
inline Field soliton(double lambda, double sigma, double t, const PeriodicGrid& g) {
    if (!(lambda > 0.0)) throw ConfigInvalid("soliton: lambda > 0 required");
    const double L = g.length;
    double xc = std::fmod(t / (lambda * lambda) + sigma + 0.5 * L, L);
    if (xc < 0.0) xc += L;
    xc -= 0.5 * L; // wrapped center in [-L/2, L/2)
    const double seam = 0.5 * L - std::abs(xc);
    if (q_value(seam / lambda) / std::sqrt(lambda) > 1e-14)
        throw DomainTooSmall("soliton: tail exceeds 1e-14 at the box seam");
    Field out{Grid{g}};
    for (int i = 0; i < g.n; ++i) {
        double d = g.x(i) - xc;
        if (d > 0.5 * L) d -= L;   // nearest periodic image
        if (d < -0.5 * L) d += L;
        out[i] = q_value(d / lambda) / std::sqrt(lambda);
    }
    return out;
}

} // namespace gkdvlab
