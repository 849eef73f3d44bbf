#include <catch2/catch_amalgamated.hpp>

#include <gkdvlab/bordered.hpp>
#include <gkdvlab/fft.hpp>
#include <gkdvlab/ground_state.hpp>
#include <gkdvlab/quadrature.hpp>

#include "oracles.hpp"

using namespace gkdvlab;

TEST_CASE("grid construction validates its invariants") {
    CHECK_THROWS_AS(LineGrid(1.0, 2.0, 64), ConfigInvalid);  // needs y_min < 0 < y_max
    CHECK_THROWS_AS(LineGrid(-1.0, 1.0, 8), ConfigInvalid);  // too few nodes
    CHECK_THROWS_AS(PeriodicGrid(10.0, 100), ConfigInvalid); // not a power of two
    LineGrid g(-60.0, 60.0, 1 << 14);
    CHECK(g.h() == Catch::Approx(120.0 / 16383.0));
    CHECK(g.symmetric());
    CHECK(g.y(0) == -60.0);
    CHECK(g.y(g.n - 1) == 60.0);
    PeriodicGrid p(64.0 * M_PI, 1 << 12);
    CHECK(p.x(0) == -32.0 * M_PI);
    CHECK(p.h() == Catch::Approx(64.0 * M_PI / 4096.0));
    CHECK_THROWS_AS(Field(Grid{g}, std::vector<double>(3)), ConfigInvalid);
}

TEST_CASE("line quadrature is exact on cubics") {
    LineGrid g(-3.0, 5.0, 257);
    Field f = sample(g, [](double y) { return ((2.0 * y - 1.0) * y + 3.0) * y - 7.0; });
    // antiderivative: y^4/2 - y^3/3 + 3y^2/2 - 7y
    auto F = [](double y) { return y * y * y * y / 2.0 - y * y * y / 3.0 + 1.5 * y * y - 7.0 * y; };
    CHECK(integrate(f) == Catch::Approx(F(5.0) - F(-3.0)).margin(1e-10));
}

TEST_CASE("line quadrature reproduces the closed-form ground-state integrals") {
    LineGrid g(-40.0, 40.0, 1 << 14);
    Field q = sample(g, q_value);
    CHECK(integrate(q * q) == Catch::Approx(oracle::int_Q2).epsilon(1e-8));
    CHECK(integrate(q) == Catch::Approx(oracle::int_Q).epsilon(1e-8));
    Field zero{Grid{g}};
    CHECK(integrate(zero) == 0.0);
}

TEST_CASE("periodic quadrature is spectrally accurate") {
    PeriodicGrid g(2.0 * M_PI, 256);
    Field f = sample(g, [](double x) { return std::sin(x) * std::sin(x); });
    CHECK(integrate(f) == Catch::Approx(M_PI).margin(1e-13));
}

TEST_CASE("cumulative quadrature is exact on cubics and matches tail integrals") {
    LineGrid g(-2.0, 2.0, 129);
    Field f = sample(g, [](double y) { return y * y * y - y + 2.0; });
    auto F = [](double y) { return y * y * y * y / 4.0 - y * y / 2.0 + 2.0 * y; };
    Field cl = cumulative_from_left(f);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(cl[i] - (F(g.y(i)) - F(g.y(0)))));
    CHECK(worst < 1e-12);

    LineGrid gg(-20.0, 20.0, 1 << 12);
    Field e = sample(gg, [](double y) { return std::exp(-y * y); });
    Field cr = cumulative_from_right(e);
    for (double y0 : {-3.0, 0.0, 1.5}) {
        const int i = gg.index_near(y0);
        CHECK(cr[i] == Catch::Approx(0.5 * std::sqrt(M_PI) * std::erfc(gg.y(i))).margin(1e-10));
    }
}

TEST_CASE("fornberg weights reproduce the classical stencils") {
    auto w = fornberg_weights(0.0, {-1.0, 0.0, 1.0}, 2);
    CHECK(w[0] == Catch::Approx(1.0));
    CHECK(w[1] == Catch::Approx(-2.0));
    CHECK(w[2] == Catch::Approx(1.0));
    auto d1 = fornberg_weights(0.0, {-1.0, 0.0, 1.0}, 1);
    CHECK(d1[0] == Catch::Approx(-0.5));
    CHECK(d1[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(d1[2] == Catch::Approx(0.5));
}

TEST_CASE("finite differences reach design accuracy including one-sided closures") {
    LineGrid g(-60.0, 60.0, 1 << 14);
    Field s = sample(g, [](double y) { return std::sin(y); });
    Field c = sample(g, [](double y) { return std::cos(y); });
    const double tol[] = {1e-10, 1e-8, 1e-5}; // one-sided constants grow with order
    for (int m : {1, 2, 3}) {
        Field d = fd_derivative(s, m, 6);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double exact = (m == 1) ? c[i] : (m == 2 ? -s[i] : -c[i]);
            worst = std::max(worst, std::abs(d[i] - exact));
        }
        CHECK(worst < tol[m - 1]);
    }
    Field k = sample(g, [](double) { return 4.0; });
    CHECK(norm_inf(fd_derivative(k, 1)) < 1e-12);
}

TEST_CASE("differentiate composes and refines at the advertised order") {
    // ratio test in the truncation-dominated regime of the 4th-order stencils
    auto residual = [](int n) {
        LineGrid g(-60.0, 60.0, n);
        Field q = sample(g, q_value);
        Field r = (-1.0) * fd_derivative(q, 2, 4) + q;
        for (int i = 0; i < g.n; ++i) r[i] -= std::pow(q[i], 5);
        return norm_inf(r);
    };
    const double coarse = residual(2048), fine = residual(4096);
    CHECK(coarse / fine >= 12.0);

    LineGrid g(-30.0, 30.0, 1 << 13);
    Field f = sample(g, [](double y) { return std::exp(-0.1 * y * y) * std::sin(y); });
    Field d11 = fd_derivative(fd_derivative(f, 1), 1);
    Field d2 = fd_derivative(f, 2);
    CHECK(norm_inf(d11 - d2) < 1e-7);
}

TEST_CASE("spectral derivative is exact on resolved modes") {
    PeriodicGrid g(2.0 * M_PI, 256);
    Field s = sample(g, [](double x) { return std::sin(x); });
    Field c = sample(g, [](double x) { return std::cos(x); });
    CHECK(norm_inf(differentiate(s, 1) - c) < 1e-13);
    Field f = sample(g, [](double x) { return std::sin(3.0 * x) + 0.5 * std::cos(7.0 * x); });
    Field d3 = sample(g, [](double x) { return -27.0 * std::cos(3.0 * x) + 0.5 * 343.0 * std::sin(7.0 * x); });
    CHECK(norm_inf(differentiate(f, 3) - d3) < 1e-8); // k^3 amplifies spectral rounding noise
}

TEST_CASE("band-limited resampling hits the trigonometric interpolant") {
    PeriodicGrid g(2.0 * M_PI, 256);
    auto fun = [](double x) { return std::sin(3.0 * x) + std::cos(7.0 * x) - 0.3 * std::sin(x); };
    Field f = sample(g, fun);

    // grid-identity resampling
    auto same = resample_periodic(f, g.x(0), g.h(), g.n);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) worst = std::max(worst, std::abs(same[i] - f[i]));
    CHECK(worst < 1e-12);

    // off-grid uniform points
    const double x0 = 0.1234, dx = 0.00371;
    auto vals = resample_periodic(f, x0, dx, 500);
    worst = 0.0;
    for (int j = 0; j < 500; ++j) worst = std::max(worst, std::abs(vals[j] - fun(x0 + j * dx)));
    CHECK(worst < 1e-11);
}

TEST_CASE("robin-closed solve inverts -d2+1 with decaying data") {
    LineGrid g(-60.0, 60.0, 1 << 13);
    Field q = sample(g, q_value);
    Field one = sample(g, [](double) { return 1.0; });
    Field f = solve_bordered(one, q, {});
    // apply the operator back with the same stencils
    Field back = (-1.0) * fd_derivative(f, 2) + f;
    double worst = 0.0;
    for (int i = 3; i < g.n - 3; ++i) worst = std::max(worst, std::abs(back[i] - q[i]));
    CHECK(worst < 1e-8);
    CHECK(std::abs(f[0]) < 1e-10);
    CHECK(std::abs(f[g.n - 1]) < 1e-10);
}

TEST_CASE("declared constraints are enforced to linear-solver precision") {
    LineGrid g(-60.0, 60.0, 1 << 13);
    GroundState gs = build_ground_state(g);
    Field pot = sample(g, [](double) { return 1.0; });
    for (int i = 0; i < g.n; ++i) pot[i] -= 5.0 * std::pow(gs.Q[i], 4);
    Field f = solve_bordered(pot, 5.0 * (gs.Q3 * gs.Q), {gs.Qp});
    CHECK(std::abs(inner(f, gs.Qp)) < 1e-12);
    // even source, even solution, decaying on both sides
    double parity = 0.0;
    for (int i = 0; i < g.n; ++i) parity = std::max(parity, std::abs(f[i] - f[g.n - 1 - i]));
    CHECK(parity < 1e-9);
    CHECK(std::abs(f[g.index_near(0.9 * 60.0)]) < 1e-6);
    CHECK(std::abs(f[g.index_near(-0.9 * 60.0)]) < 1e-6);
}

TEST_CASE("kernel-direction sources are rejected as incompatible") {
    LineGrid g(-60.0, 60.0, 1 << 13);
    GroundState gs = build_ground_state(g);
    Field pot = sample(g, [](double) { return 1.0; });
    for (int i = 0; i < g.n; ++i) pot[i] -= 5.0 * std::pow(gs.Q[i], 4);
    CHECK_THROWS_AS(solve_bordered(pot, gs.Qp, {gs.Qp}), IncompatibleSource);
}
