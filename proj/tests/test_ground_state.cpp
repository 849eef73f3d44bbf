#include <catch2/catch_amalgamated.hpp>

#include <gkdvlab/ground_state.hpp>
#include <gkdvlab/rng.hpp>

#include "oracles.hpp"

using namespace gkdvlab;

namespace {
const LineGrid kGrid(-60.0, 60.0, (1 << 14) + 1);
const GroundState& gs() {
    static GroundState g = build_ground_state(kGrid);
    return g;
}
double parity_error(const Field& f, int sign) {
    double worst = 0.0;
    for (int i = 0; i < f.n(); ++i)
        worst = std::max(worst, std::abs(f[i] - sign * f[f.n() - 1 - i]));
    return worst;
}
} // namespace

TEST_CASE("ground state matches its closed form") {
    const GroundState& g = gs();
    CHECK(g.Q[kGrid.index_near(0.0)] == Catch::Approx(oracle::Q0).margin(1e-14));
    CHECK(parity_error(g.Q, +1) < 1e-12);
    CHECK(parity_error(g.Qp, -1) < 1e-12);
    double minq = 1e300;
    for (double v : g.Q.values) minq = std::min(minq, v);
    CHECK(minq >= 0.0);
    CHECK(g.mass == Catch::Approx(oracle::int_Q2).epsilon(1e-8));
    CHECK(g.m0 == Catch::Approx(oracle::m0).epsilon(1e-7));
    CHECK(g.m0 == Catch::Approx(0.25 * integrate(g.Q)).margin(1e-15));
}

TEST_CASE("ground state solves its equation at the grid tolerance") {
    const GroundState& g = gs();
    Field r = (-1.0) * differentiate(g.Q, 2) + g.Q;
    for (int i = 0; i < r.n(); ++i) r[i] -= std::pow(g.Q[i], 5);
    CHECK(norm_inf(r) < 1e-8);
}

TEST_CASE("scaling generator identities") {
    const GroundState& g = gs();
    CHECK(std::abs(inner(g.Q, g.LamQ)) < 1e-10);
    CHECK(std::abs(inner(g.LamQ, g.Qp)) < 1e-10); // parity
    // closed-form LamQ agrees with the finite-difference generator
    Field lam_fd = scaling_generator(g.Q, 0);
    CHECK(norm_inf(lam_fd - g.LamQ) < 1e-8);
    // Lambda_1 f = y f'
    LineGrid small(-5.0, 5.0, 256);
    Field y2 = sample(small, [](double y) { return y * y; });
    Field l1 = scaling_generator(y2, 1);
    double worst = 0.0;
    for (int i = 0; i < small.n; ++i) worst = std::max(worst, std::abs(l1[i] - 2.0 * small.y(i) * small.y(i)));
    CHECK(worst < 1e-10);
}

TEST_CASE("mass, energy, and the pointwise identities of Q") {
    const GroundState& g = gs();
    const double qp2 = integrate(g.Qp * g.Qp);
    const Field q2 = g.Q * g.Q;
    const double q6 = integrate(q2 * q2 * q2);
    CHECK(qp2 == Catch::Approx(oracle::int_Qp2).epsilon(1e-8));
    CHECK(q6 == Catch::Approx(oracle::int_Q6).epsilon(1e-8));
    // multiply the equation by Q and by yQ': both integral identities
    CHECK(qp2 + q6 / 3.0 == Catch::Approx(g.mass).epsilon(1e-8));
    auto [m, e] = mass_energy(g.Q);
    CHECK(m == Catch::Approx(oracle::int_Q2).epsilon(1e-8));
    CHECK(std::abs(e) < 1e-9); // zero-energy ground state
}

TEST_CASE("critical scaling leaves the mass invariant") {
    for (double lam : {0.5, 2.0}) {
        Field u = sample(kGrid, [lam](double y) { return q_value(y / lam) / std::sqrt(lam); });
        auto [m, e] = mass_energy(u);
        CHECK(m == Catch::Approx(oracle::int_Q2).epsilon(1e-8));
        (void)e;
    }
}

TEST_CASE("soliton sampling and its translation law") {
    PeriodicGrid g(64.0 * M_PI, 1 << 12);
    Field s0 = soliton(1.0, 0.0, 0.0, g);
    const int ic = g.n / 2; // x = 0
    CHECK(s0[ic] == Catch::Approx(oracle::Q0).margin(1e-12));
    Field s1 = soliton(1.0, 0.0, 1.0, g); // speed 1/lambda^2 = 1
    int imax = 0;
    for (int i = 0; i < g.n; ++i)
        if (s1[i] > s1[imax]) imax = i;
    CHECK(std::abs(g.x(imax) - 1.0) <= g.h());
    Field s2 = soliton(2.0, 0.0, 0.0, g);
    double peak = 0.0;
    for (double v : s2.values) peak = std::max(peak, v);
    CHECK(peak == Catch::Approx(oracle::Q0 / std::sqrt(2.0)).margin(1e-12));
    CHECK_THROWS_AS(soliton(1.0, 0.0, 0.0, PeriodicGrid(16.0, 256)), DomainTooSmall);
}

TEST_CASE("sharp interpolation inequality holds on random smooth fields") {
    const GroundState& g = gs();
    std::mt19937_64 rng(20260815);
    for (int trial = 0; trial < 50; ++trial) {
        Field phi = random_bumps(kGrid, rng);
        const Field p2 = phi * phi;
        const double i6 = integrate(p2 * p2 * p2) / 3.0;
        const double m = integrate(p2);
        const Field dp = differentiate(phi, 1);
        const double grad = integrate(dp * dp);
        CHECK(i6 <= (m / g.mass) * (m / g.mass) * grad * (1.0 + 1e-10) + 1e-12);
    }
}
