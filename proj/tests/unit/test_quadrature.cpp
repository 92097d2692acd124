#include <doctest.h>

#include <cmath>

#include "seqtreat/quadrature.hpp"

using namespace seqtreat;

TEST_CASE("polynomials are exact") {
    Box box{{0.0, 0.0}, {0.5, 1.0}};
    auto r = integrate_box([](std::span<const double> x) -> std::array<double, 2> {
        return {x[0] * x[1], x[0] * x[0] * x[0]};
    }, box);
    CHECK(r[0] == doctest::Approx(0.125 * 0.5).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(std::pow(0.5, 4) / 4.0).epsilon(1e-14));
}

TEST_CASE("kinks need refinement but converge") {
    Box box{{0.0}, {1.0}};
    auto r = integrate_box([](std::span<const double> x) -> std::array<double, 2> {
        return {std::abs(x[0] - 0.3141), std::min(0.6, 0.5 + 0.4 * std::sin(9.0 * x[0]))};
    }, box);
    const double a = 0.3141;
    CHECK(r[0] == doctest::Approx((a * a + (1 - a) * (1 - a)) / 2.0).epsilon(1e-8));
    CHECK(r[1] > 0.0);
}

TEST_CASE("budget exhaustion is reported") {
    Box box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    CubatureOptions tight;
    tight.rel_tol = 1e-15;
    tight.abs_tol = 0.0;
    tight.max_evaluations = 5000;
    CHECK_THROWS_AS(integrate_box([](std::span<const double> x) -> std::array<double, 2> {
        return {std::abs(x[0] - 0.377) * std::abs(x[1] - 0.61), 0.0};
    }, box, tight), QuadratureError);
}
