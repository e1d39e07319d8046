#include <doctest.h>

#include <cmath>
#include <numbers>

#include "superint/errors.hpp"
#include "superint/geometry.hpp"

using namespace superint;
using std::numbers::pi;

TEST_CASE("s_k on the three regimes")
{
    CHECK(s_k({0.0}, 2.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(s_k({1.0}, pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s_k({-1.0}, 0.0) == 0.0);
    CHECK(s_k({4.0}, 0.3) == doctest::Approx(std::sin(0.6) / 2).epsilon(1e-15));
    CHECK(s_k({-0.25}, 3.0) == doctest::Approx(2 * std::sinh(1.5)).epsilon(1e-15));
}

TEST_CASE("s_k_prime")
{
    CHECK(s_k_prime({0.0}, 7.0) == 1.0);
    CHECK(s_k_prime({1.0}, 0.0) == 1.0);
    CHECK(s_k_prime({-1.0}, 1.0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
}

TEST_CASE("s_k_prime is the derivative of s_k")
{
    for (double k : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
        for (double r : {0.1, 0.7, 1.0}) {
            const double h = 1e-5;
            const double fd = (s_k({k}, r + h) - s_k({k}, r - h)) / (2 * h);
            CHECK(s_k_prime({k}, r) == doctest::Approx(fd).epsilon(1e-9));
        }
    }
}

TEST_CASE("small r limit is flat for every curvature")
{
    for (double k : {-3.0, 3.0}) CHECK(s_k({k}, 1e-6) == doctest::Approx(1e-6).epsilon(1e-11));
}

TEST_CASE("chart")
{
    CHECK(regime({1.0}) == Regime::spherical);
    CHECK(regime({0.0}) == Regime::flat);
    CHECK(regime({-1.0}) == Regime::hyperbolic);
    CHECK(chart_limit({4.0}) == doctest::Approx(pi / 2));
    CHECK(std::isinf(chart_limit({0.0})));
    CHECK(std::isinf(chart_limit({-1.0})));
    CHECK_THROWS_AS(check_chart({1.0}, pi), DomainError);
    CHECK_THROWS_AS(check_chart({0.0}, -0.1), DomainError);
    CHECK_NOTHROW(check_chart({1.0}, 3.0));
}
