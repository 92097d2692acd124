#include <doctest.h>

#include <cmath>

#include "seqtreat/loglog.hpp"
#include "seqtreat/welfare.hpp"

using namespace seqtreat;

TEST_CASE("exact power law") {
    const auto fit = fit_loglog({{1, 1}, {10, std::pow(10.0, 0.75)}, {100, std::pow(10.0, 1.5)}});
    CHECK(fit.slope == doctest::Approx(0.75));
    CHECK(fit.intercept == doctest::Approx(0.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("constant values give slope 0") {
    const auto fit = fit_loglog({{1, 3}, {10, 3}, {100, 3}});
    CHECK(fit.slope == doctest::Approx(0.0));
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(fit_loglog({{1, 1}, {2, 2}}), InvalidInput);
    CHECK_THROWS_AS(fit_loglog({{1, 1}, {2, 0}, {3, 1}}), InvalidInput);
    CHECK_THROWS_AS(fit_loglog({{2, 1}, {2, 2}, {2, 3}}), InvalidInput);
}

TEST_CASE("noisy data recovers the slope") {
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 10; ++k) {
        const double n = std::pow(2.0, 10 + k);
        pts.emplace_back(n, 3.0 * std::sqrt(n) * (1.0 + 0.01 * ((k % 3) - 1)));
    }
    CHECK(fit_loglog(pts).slope == doctest::Approx(0.5).epsilon(0.01));
}
