#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/analysis.hpp"
#include "core/quadrature.hpp"

using namespace nbrw;

TEST_CASE("quadrature on known integrals") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0) == doctest::Approx(-0.5));
}

TEST_CASE("truncated-exponential identity: the two quadrature routes agree") {
    for (TailFamily fam : {TailFamily::pareto, TailFamily::pareto_log}) {
        TailLaw law(fam, 2.0);
        for (double v : {0.5, 1.0, 2.0})
            for (auto [k1, k2] : {std::pair{1.0, 2.0}, {1.0, 10.0}, {2.0, 5.0}}) {
                const auto chk = gantert_identity_check(law, v, k1, k2, 20000, 3);
                CHECK(chk.quad_abs_diff <= 1e-8);
                CHECK(std::abs(chk.lhs_monte_carlo - chk.rhs_quadrature) <=
                      3.0 * chk.mc_se + 1e-9);
            }
    }
}

TEST_CASE("degenerate K1 = K2: both sides equal P(Y > K1)") {
    TailLaw law(TailFamily::pareto, 2.0);
    const auto chk = gantert_identity_check(law, 1.0, 3.0, 3.0, 1000, 1);
    CHECK(chk.lhs_quadrature == doctest::Approx(law.survival(3.0)).epsilon(1e-12));
    CHECK(chk.rhs_quadrature == doctest::Approx(law.survival(3.0)).epsilon(1e-12));
}

TEST_CASE("gantert guards") {
    TailLaw law(TailFamily::pareto, 2.0);
    CHECK_THROWS_AS(gantert_identity_check(law, 100.0, 1.0, 10.0), domain_error); // v K2 > 700
    CHECK_THROWS_AS(gantert_identity_check(law, 1.0, 0.0, 1.0), domain_error);
    CHECK_THROWS_AS(gantert_identity_check(law, -1.0, 1.0, 2.0), domain_error);
}

TEST_CASE("truncated-sum bound: spec parameter set") {
    TailLaw law(TailFamily::pareto, 1.0);
    const auto chk = truncated_sum_bound_check(law, 2, 0.1, 0.6, 1024, 200000, 5);
    CHECK(chk.verdict == "pass");
    CHECK(chk.x_n > std::pow(1024.0, 0.6));
    CHECK(chk.mc_estimate <= chk.markov_bound);
    CHECK(chk.wilson_upper <= chk.markov_bound);
    // The bound is a genuine tail bound, not vacuous.
    CHECK(chk.markov_bound < 1.0);
}

TEST_CASE("truncated-sum bound: degenerate zero-probability cases") {
    // r x_N < 1: every truncated jump is zero under pareto.
    {
        TailLaw law(TailFamily::pareto, 1.0);
        const auto chk = truncated_sum_bound_check(law, 1, 0.01, 0.5, 16, 10000, 1);
        CHECK(chk.mc_estimate == 0.0);
        CHECK(chk.markov_bound > 0.0);
        CHECK(chk.verdict == "pass");
    }
    // m = 1, ell = 1, x_N huge.
    {
        TailLaw law(TailFamily::pareto, 2.0);
        const auto chk = truncated_sum_bound_check(law, 1, 0.5, 8.0, 2, 10000, 1);
        CHECK(chk.ell == 1);
        CHECK(chk.mc_estimate == 0.0);
        CHECK(chk.mc_estimate <= chk.markov_bound);
    }
}

TEST_CASE("truncated-sum bound guards") {
    TailLaw law(TailFamily::pareto, 1.0);
    CHECK_THROWS_AS(truncated_sum_bound_check(law, 2, 1.5, 0.6, 1024, 100), domain_error);
    CHECK_THROWS_AS(truncated_sum_bound_check(law, 0, 0.1, 0.6, 1024, 100), domain_error);
}

TEST_CASE("wilson upper bound sanity") {
    CHECK(wilson_upper_bound(0, 1000000) < 1e-5);
    CHECK(wilson_upper_bound(500, 1000) > 0.5);
    CHECK(wilson_upper_bound(1000, 1000) == doctest::Approx(1.0));
    // Covers the true p with z = 3 slack.
    CHECK(wilson_upper_bound(100, 1000) > 0.1);
}
