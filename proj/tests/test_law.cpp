#include <catch2/catch_amalgamated.hpp>

#include "gkdvlab/law.hpp"

using namespace gkdvlab;

namespace {

// Stage constants of the corrector hierarchy, measured at n = 2^15 and
// frozen (the profile suite pins the same literals). The law machinery is
// exercised at these and at the exactly solvable zero-coefficient point.
constexpr double kC2 = -7.712388981092;
constexpr double kC3 = 49.518990290663;

const LawCoefficients& measured() {
    static LawCoefficients c = make_law(kC2, kC3, 0.0);
    return c;
}

} // namespace

TEST_CASE("zero-coefficient scale integral is exactly closed-form") {
    const LawCoefficients c = make_law(0.0, 0.0, 0.0);
    CHECK(c.lambda0 == 0.01);
    for (double lam : {1e-10, 1e-6, 1e-3, 1e-2}) {
        const double expect = 1.0 / std::sqrt(lam) - 10.0;
        CHECK(law_G(lam, c) == Catch::Approx(expect).epsilon(1e-12).margin(1e-12));
    }
    CHECK(law_G(c.lambda0, c) == 0.0);
}

TEST_CASE("scale integral is strictly decreasing with G(lambda0) = 0") {
    const auto& c = measured();
    CHECK(c.lambda0 == 0.01); // measured constants keep the margin at the cap
    CHECK(law_G(c.lambda0, c) == 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 64; ++i) {
        const double lam = std::min(
            c.lambda0,
            std::exp(std::log(1e-10) + (std::log(c.lambda0) - std::log(1e-10)) * i / 64));
        const double g = law_G(lam, c);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("log-corrected asymptote of G settles as lambda -> 0") {
    // G = lambda^{-1/2} - (c2/4) log lambda + O(1), the O(1) part converging
    // like sqrt(lambda) log lambda.
    const auto& c = measured();
    auto q = [&](double lam) {
        return law_G(lam, c) - 1.0 / std::sqrt(lam) + 0.25 * c.c2 * std::log(lam);
    };
    double qmax = 0.0;
    for (int i = 0; i <= 24; ++i) {
        const double lam = std::min(
            c.lambda0, std::exp(std::log(1e-8) + (std::log(1e-2) - std::log(1e-8)) * i / 24));
        qmax = std::max(qmax, std::abs(q(lam)));
    }
    CHECK(qmax < 100.0);
    CHECK(std::abs(q(1e-8) - q(1e-6)) < 0.05);
}

TEST_CASE("inversion of the scale integral") {
    const LawCoefficients z = make_law(0.0, 0.0, 0.0);
    CHECK(invert_G(0.0, z) == z.lambda0);
    // closed form: lambda = (v + lambda0^{-1/2})^{-2}
    CHECK(invert_G(100.0, z) == Catch::Approx(1.0 / (110.0 * 110.0)).epsilon(1e-9));

    const auto& c = measured();
    for (double v : {1.0, 10.0, 1e3}) {
        const double lam = invert_G(v, c);
        CHECK(lam > 0.0);
        CHECK(lam < c.lambda0);
        CHECK(std::abs(law_G(lam, c) - v) <= 1e-10 * (1.0 + v));
    }
}

TEST_CASE("spot values match an independent integrator") {
    // frozen from a separate adaptive-quadrature integration of the same
    // system (relative 1e-12 there, tabulated to the digits used here)
    const auto& c = measured();
    CHECK(invert_G(10.0, c) == Catch::Approx(2.180366e-3).epsilon(2e-6));
    CHECK(invert_G(100.0, c) == Catch::Approx(7.348988e-5).epsilon(2e-6));
    CHECK(invert_G(1e4, c) == Catch::Approx(9.933334e-9).epsilon(2e-6));

    const FormalTrajectory tr = integrate_formal(c, -100.0, -10.0, 16);
    REQUIRE(tr.s.size() == 17);
    CHECK(tr.s.front() == Catch::Approx(-100.0).epsilon(1e-13));
    CHECK(tr.sigma.front() == Catch::Approx(0.8439e-2).epsilon(3e-4));
    CHECK(tr.t.front() == Catch::Approx(0.4512 / 5e10).epsilon(3e-4));
    CHECK(tr.t.front() > 0.0);
    CHECK(tr.sigma_reflected.front() == -tr.sigma.front());
}

TEST_CASE("denominator guard and parameter validation") {
    LawCoefficients bad{0.0, 300.0, 0.0, 0.01}; // D(0.01) = -1
    CHECK_THROWS_AS(law_G(1e-4, bad), DenominatorVanishes);

    // admissibility margin D > 1.5 forces lambda0 down to 0.005 here
    const LawCoefficients c = make_law(0.0, 100.0, 0.0);
    CHECK(c.lambda0 < 0.005 + 1e-9);
    CHECK(c.lambda0 > 0.0049);

    CHECK_THROWS_AS(law_G(0.02, measured()), ConfigInvalid);
    CHECK_THROWS_AS(law_G(0.0, measured()), ConfigInvalid);
    CHECK_THROWS_AS(invert_G(-1.0, measured()), ConfigInvalid);
    CHECK_THROWS_AS(integrate_formal(measured(), -10.0, -100.0, 64), ConfigInvalid);
    CHECK_THROWS_AS(integrate_formal(measured(), -100.0, -0.5, 64), ConfigInvalid);
}

TEST_CASE("formal trajectory satisfies the flow identities") {
    const FormalTrajectory tr = integrate_formal(measured(), -1e6, -10.0, 600);
    REQUIRE(tr.s.size() == 601);
    const RunRecord rec = law_record(tr);
    for (const auto& ch : rec.checks) {
        INFO(ch.name << ": measured " << ch.measured << " expected " << ch.expected << " tol "
                     << ch.tol);
        if (ch.name == "max |5 t |s|^5 - 1| on |s| >= 100") {
            // The deviation of 5 t |s|^5 from 1 behaves like 2|c2| log|s|/|s|
            // plus a lambda0^{-1/2}/|s| offset, so it sits near 0.55 at
            // |s| = 100 and only crosses 0.1 around |s| ~ 3e3. A fixed 0.1
            // window starting at |s| = 100 is unattainable for any admissible
            // coefficients (even all-zero ones give 0.38); the record reports
            // it honestly as a failure.
            CHECK_FALSE(ch.pass);
            CHECK(ch.measured > 0.4);
            CHECK(ch.measured < 0.7);
        } else {
            CHECK(ch.pass);
        }
    }
}
