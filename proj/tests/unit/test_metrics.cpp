#include <doctest.h>

#include <cmath>

#include "seqtreat/metrics.hpp"

using namespace seqtreat;

namespace {

Environment three_arms() {
    return Environment::from_arms({ArmDistribution::deterministic(0.9), ArmDistribution::deterministic(0.5),
                                   ArmDistribution::deterministic(0.9)});
}

}  // namespace

TEST_CASE("regret against a fixed target") {
    auto env = three_arms();
    AssignmentLog log;
    for (TreatmentId a : {0u, 1u, 2u}) log.push(1, std::nullopt, a, nullptr, 0.9, 1);
    const auto r = regret(log, env, WelfareSpec::mean());
    CHECK(r.cumulative_regret == doctest::Approx(0.4));
    CHECK(r.s_n == 1);
    CHECK(r.per_arm_counts == std::vector<std::uint64_t>{1, 1, 1});
    CHECK(r.trajectory.size() == 3);
    CHECK(subopt_individuals(log, env, WelfareSpec::mean()) == 1);

    AssignmentLog best;
    best.push(1, std::nullopt, 0, nullptr, 0.9, 1);
    CHECK(regret(best, env, WelfareSpec::mean()).cumulative_regret == 0.0);
    CHECK(subopt_individuals(best, env, WelfareSpec::mean()) == 0);
}

TEST_CASE("subopt counts") {
    AssignmentLog log;
    for (TreatmentId a : {0u, 1u, 0u, 0u}) log.push(1, std::nullopt, a, nullptr, 0.0, 1);
    CHECK(subopt_counts(log, 2) == std::vector<std::uint64_t>{3, 1});
    CHECK(subopt_counts(AssignmentLog{}, 2) == std::vector<std::uint64_t>{0, 0});
}

TEST_CASE("out-of-sample regret") {
    auto env = Environment::from_arms({make_two_point(0.8, 0.1), make_two_point(0.5, 0.1)});
    CHECK(oos_regret(0, env, WelfareSpec::mean()) == 0.0);
    CHECK(oos_regret(1, env, WelfareSpec::mean()) == doctest::Approx(0.3));
}

TEST_CASE("modified regret with affine fields on a 2x2 grid") {
    // mu0(x) = 0.2 + 0.6 x1, mu1 = 0.5 constant
    auto zero = FieldFunction::constant(0.0, 2);
    auto env = Environment::from_fields(2, {}, {},
                                        {{ArmField{FieldFunction::affine(0.2, {0.6, 0.0}), zero},
                                          ArmField{FieldFunction::constant(0.5, 2), zero}}},
                                        1.0, 1.0);
    auto part = square_partition(2, 2);
    const BinOracle oracle(env, part, WelfareSpec::mean());
    AssignmentLog log(2, 0);
    // Forced alternation over a fixed set of points.
    const std::vector<std::vector<double>> pts{{0.1, 0.1}, {0.6, 0.2}, {0.3, 0.8}, {0.9, 0.9}, {0.2, 0.4}, {0.7, 0.7}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Covariate c{{}, pts[i]};
        log.push(1, part.locate(c), static_cast<TreatmentId>(i % 2), &c, 0.0, 1);
    }
    // Hand integration: bin means of arm 0 are 0.35 (x1 < 0.5) and 0.65 (x1 >= 0.5).
    double expect = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double f0 = pts[i][0] < 0.5 ? 0.35 : 0.65;
        const double best = std::max(f0, 0.5);
        expect += best - (i % 2 == 0 ? f0 : 0.5);
    }
    CHECK(modified_regret(log, oracle) == doctest::Approx(expect).epsilon(1e-8));
    CHECK(modified_regret(log, env, part, WelfareSpec::mean()) == doctest::Approx(expect).epsilon(1e-8));

    // Pointwise regret uses mu0(x) directly.
    double pointwise = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double f0 = 0.2 + 0.6 * pts[i][0];
        pointwise += std::max(f0, 0.5) - (i % 2 == 0 ? f0 : 0.5);
    }
    CHECK(regret(log, env, WelfareSpec::mean()).cumulative_regret == doctest::Approx(pointwise).epsilon(1e-12));

    const auto per_bin = subopt_counts_per_bin(log, 4, 2);
    std::vector<std::uint64_t> sum(2, 0);
    for (const auto& row : per_bin) {
        sum[0] += row[0];
        sum[1] += row[1];
    }
    CHECK(sum == subopt_counts(log, 2));
}

TEST_CASE("single bin: modified regret targets the bin average") {
    auto zero = FieldFunction::constant(0.0, 2);
    auto env = Environment::from_fields(2, {}, {},
                                        {{ArmField{FieldFunction::affine(0.2, {0.6, 0.0}), zero},
                                          ArmField{FieldFunction::constant(0.5, 2), zero}}},
                                        1.0, 1.0);
    auto part = square_partition(1, 2);
    AssignmentLog log(2, 0);
    for (double x : {0.1, 0.9}) {
        Covariate c{{}, {x, 0.5}};
        log.push(1, 0, 1, &c, 0.0, 1);
    }
    // Bin means are both 0.5: no modified regret, but pointwise regret at x=0.9.
    CHECK(modified_regret(log, env, part, WelfareSpec::mean()) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(regret(log, env, WelfareSpec::mean()).cumulative_regret == doctest::Approx(0.24));
}

TEST_CASE("identical arms never count as suboptimal") {
    auto f = FieldFunction::affine(0.1, {0.3, 0.3});
    auto zero = FieldFunction::constant(0.0, 2);
    auto env = Environment::from_fields(2, {}, {}, {{ArmField{f, zero}, ArmField{f, zero}}}, 1.0, 1.0);
    AssignmentLog log(2, 0);
    for (int i = 0; i < 10; ++i) {
        Covariate c{{}, {0.1 * i, 0.05 * i}};
        log.push(1, 0, static_cast<TreatmentId>(i % 2), &c, 0.0, 1);
    }
    CHECK(subopt_individuals(log, env, WelfareSpec::mean()) == 0);
}

TEST_CASE("context mismatches are rejected") {
    auto env = three_arms();
    AssignmentLog log(1, 0);
    Covariate c{{}, {0.5}};
    log.push(1, 0, 0, &c, 0.0, 1);
    CHECK_THROWS_AS(regret(log, env, WelfareSpec::mean()), InvalidInput);
    AssignmentLog plain;
    CHECK_THROWS_AS(plain.push(2, std::nullopt, 0, nullptr, 0.0, 1), InvalidInput);
}

TEST_CASE("property: regret is additive and order-free within a batch") {
    auto env = three_arms();
    Rng rng(2);
    AssignmentLog a, b, ab, ba;
    std::vector<TreatmentId> arms;
    for (int i = 0; i < 50; ++i) arms.push_back(static_cast<TreatmentId>(rng.uniform_int(0, 2)));
    for (int i = 0; i < 50; ++i) {
        (i < 25 ? a : b).push(1, std::nullopt, arms[i], nullptr, 0.0, 1);
        ab.push(1, std::nullopt, arms[i], nullptr, 0.0, 1);
        ba.push(1, std::nullopt, arms[49 - i], nullptr, 0.0, 1);
    }
    const auto w = WelfareSpec::mean();
    CHECK(regret(ab, env, w).cumulative_regret ==
          doctest::Approx(regret(a, env, w).cumulative_regret + regret(b, env, w).cumulative_regret));
    CHECK(regret(ba, env, w).cumulative_regret == doctest::Approx(regret(ab, env, w).cumulative_regret));
    CHECK(regret(ab, env, w).s_n <= ab.size());
}
