#include <doctest.h>

#include <cmath>

#include "seqtreat/rng.hpp"
#include "seqtreat/welfare.hpp"

using namespace seqtreat;

TEST_CASE("evaluate on the documented examples") {
    CHECK(WelfareSpec::mean().evaluate(0.7, 0.1) == 0.7);
    CHECK(WelfareSpec::mean_variance(2.0).evaluate(0.5, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(WelfareSpec::neg_variance().evaluate(0.3, 0.04) == -0.04);
    CHECK(WelfareSpec::sharpe(0.04).evaluate(0.5, 0.25) == doctest::Approx(1.0));
    CHECK(WelfareSpec::neg_coeff_variation(0.1).evaluate(0.2, 0.16) == doctest::Approx(-2.0));
}

TEST_CASE("Lipschitz constants") {
    CHECK(WelfareSpec::mean().lipschitz_constant() == 1.0);
    CHECK(WelfareSpec::mean_variance(3.0).lipschitz_constant() == 1.5);
    CHECK(WelfareSpec::mean_variance(1.0).lipschitz_constant() == 1.0);
    CHECK(WelfareSpec::sharpe(0.04).lipschitz_constant() == doctest::Approx(62.5));
    CHECK(WelfareSpec::neg_variance().lipschitz_constant() == 1.0);
    // c^-2 = 100 beats c^-1.5 / 2 = 15.8
    CHECK(WelfareSpec::neg_coeff_variation(0.1).lipschitz_constant() == doctest::Approx(100.0));
}

TEST_CASE("domain validation") {
    CHECK(WelfareSpec::sharpe(0.04).validate_domain(0.5, 0.01).has_value());
    CHECK_FALSE(WelfareSpec::mean().validate_domain(0.0, 0.0).has_value());
    CHECK_FALSE(WelfareSpec::neg_coeff_variation(0.1).validate_domain(0.2, 0.16).has_value());
    CHECK(WelfareSpec::neg_coeff_variation(0.1).validate_domain(0.05, 0.16).has_value());
    CHECK(WelfareSpec::mean().validate_domain(1.1, 0.0).has_value());
    CHECK(WelfareSpec::mean().validate_domain(0.5, 0.3).has_value());
    CHECK_THROWS_AS(WelfareSpec::sharpe(0.04).evaluate(0.5, 0.01), InvalidInput);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(WelfareSpec::sharpe(0.0), InvalidInput);
    CHECK_THROWS_AS(WelfareSpec::sharpe(1.0), InvalidInput);
    CHECK_THROWS_AS(WelfareSpec::mean_variance(-1.0), InvalidInput);
    CHECK(welfare_kind_from_string("mean_variance") == WelfareKind::mean_variance);
    CHECK_THROWS_AS(welfare_kind_from_string("median"), InvalidInput);
}

TEST_CASE("randomized Lipschitz property per kind") {
    const std::vector<WelfareSpec> specs{
        WelfareSpec::mean(), WelfareSpec::sharpe(0.04), WelfareSpec::neg_coeff_variation(0.1),
        WelfareSpec::mean_variance(0.0), WelfareSpec::mean_variance(3.0), WelfareSpec::neg_variance()};
    Rng rng(17);
    for (const auto& w : specs) {
        const double c = w.floor_c();
        const double mu_lo = w.kind() == WelfareKind::neg_coeff_variation ? c : 0.0;
        const double s_lo = (w.kind() == WelfareKind::sharpe || w.kind() == WelfareKind::neg_coeff_variation) ? c : 0.0;
        int checked = 0;
        while (checked < 10000) {
            const double u1 = mu_lo + (1.0 - mu_lo) * rng.uniform();
            const double u2 = s_lo + (kMaxVariance - s_lo) * rng.uniform();
            const double v1 = mu_lo + (1.0 - mu_lo) * rng.uniform();
            const double v2 = s_lo + (kMaxVariance - s_lo) * rng.uniform();
            const double lhs = std::abs(w.evaluate(u1, u2) - w.evaluate(v1, v2));
            const double rhs = w.lipschitz_constant() * (std::abs(u1 - v1) + std::abs(u2 - v2));
            REQUIRE(lhs <= rhs * (1.0 + 1e-12));
            ++checked;
        }
    }
}

TEST_CASE("kind-specific independence") {
    Rng rng(3);
    const auto mean = WelfareSpec::mean();
    const auto nv = WelfareSpec::neg_variance();
    const auto mv0 = WelfareSpec::mean_variance(0.0);
    for (int i = 0; i < 1000; ++i) {
        const double mu = rng.uniform(), s = 0.25 * rng.uniform(), s2 = 0.25 * rng.uniform();
        CHECK(mean.evaluate(mu, s) == mean.evaluate(mu, s2));
        CHECK(nv.evaluate(mu, s) == nv.evaluate(rng.uniform(), s));
        CHECK(mv0.evaluate(mu, s) == mean.evaluate(mu, s));
    }
}

TEST_CASE("custom welfare registration checks its constant") {
    auto ok = WelfareSpec::custom([](double mu, double s) { return 0.5 * mu - s; }, 1.0);
    CHECK(ok.kind() == WelfareKind::custom);
    CHECK(ok.evaluate(0.4, 0.1) == doctest::Approx(0.1));
    CHECK_THROWS_AS(WelfareSpec::custom([](double mu, double) { return 3.0 * mu; }, 1.0), InvalidInput);
}

TEST_CASE("projected evaluation clamps estimates into the domain") {
    const auto w = WelfareSpec::sharpe(0.04);
    CHECK(w.evaluate_projected(0.5, 0.0) == doctest::Approx(2.5));
    CHECK(WelfareSpec::mean().evaluate_projected(0.5, 0.0) == 0.5);
}
