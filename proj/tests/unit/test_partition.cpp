#include <doctest.h>

#include <cmath>

#include "seqtreat/partition.hpp"
#include "seqtreat/rng.hpp"

using namespace seqtreat;

namespace {
Covariate at(std::vector<double> x) { return Covariate{{}, std::move(x)}; }
}  // namespace

TEST_CASE("square partition geometry") {
    auto p = square_partition(2, 2);
    CHECK(p.size() == 4);
    for (const auto& b : p.bins()) {
        CHECK(b.measure == 0.25);
        CHECK(b.diameter == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    }
    auto one = square_partition(1, 3);
    CHECK(one.size() == 1);
    CHECK(one.bin(0).measure == 1.0);
    CHECK(one.bin(0).diameter == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

    auto line = square_partition(3, 1);
    CHECK(locate(line, at({0.0})) == 0);
    CHECK(locate(line, at({1.0 / 3.0})) == 1);
    CHECK(locate(line, at({0.5})) == 1);
    CHECK(locate(line, at({2.0 / 3.0})) == 2);
    CHECK(locate(line, at({1.0})) == 2);
    CHECK_THROWS_AS(square_partition(0, 2), InvalidInput);
}

TEST_CASE("locate on the 2x2 grid, first axis fastest") {
    auto p = square_partition(2, 2);
    // cell (1,2) in 1-based (axis1, axis2) terms
    CHECK(locate(p, at({0.3, 0.7})) == 0 + 2 * 1);
    CHECK(locate(p, at({0.5, 0.5})) == 3);
    CHECK(locate(p, at({1.0, 1.0})) == 3);
    CHECK_THROWS_AS(locate(p, at({1.2, 0.5})), InvalidInput);
    CHECK_THROWS_AS(locate(p, at({0.5})), InvalidInput);
}

TEST_CASE("property: square partitions are exact and agree with floor arithmetic") {
    Rng rng(5);
    for (std::size_t P : {1, 2, 3, 7, 10}) {
        for (std::size_t d : {1, 2, 3}) {
            auto p = square_partition(P, d);
            double total = 0.0;
            for (const auto& b : p.bins()) total += b.measure;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
            for (int k = 0; k < 2000; ++k) {
                std::vector<double> x(d);
                for (auto& v : x) v = rng.uniform();
                if (k % 10 == 0) x[0] = static_cast<double>(rng.uniform_int(0, P)) / static_cast<double>(P);
                std::size_t expect = 0, stride = 1;
                for (std::size_t l = 0; l < d; ++l) {
                    auto cell = static_cast<std::size_t>(std::floor(x[l] * static_cast<double>(P)));
                    if (cell >= P) cell = P - 1;
                    expect += cell * stride;
                    stride *= P;
                }
                const auto j = locate(p, at(x));
                REQUIRE(j == expect);
                REQUIRE(p.region(j).boxes.front().contains(x));
            }
        }
    }
}

TEST_CASE("choose_P") {
    CHECK(choose_P(1e6, 10, 1, 1, 2) == 14);
    CHECK(choose_P(256, 1, 1, 1, 2) == 4);
    CHECK(choose_P(1, 10, 5, 1, 2) == 1);
    CHECK(choose_P(1e4, 1, 1, 1, 2) == 10);
    CHECK_THROWS_AS(choose_P(0, 1, 1, 1, 2), InvalidInput);
}

TEST_CASE("exogenous partitions") {
    ExogenousGroup left{{Box{{0.0, 0.0}, {0.5, 1.0}}}, 0.5, std::sqrt(1.25)};
    ExogenousGroup right{{Box{{0.5, 0.0}, {1.0, 0.5}}, Box{{0.5, 0.5}, {1.0, 1.0}}}, 0.5, std::sqrt(1.25)};
    auto p = Partition::exogenous(2, {left, right});
    CHECK(p.size() == 2);
    CHECK(locate(p, at({0.2, 0.9})) == 0);
    CHECK(locate(p, at({0.5, 0.9})) == 1);
    CHECK(locate(p, at({1.0, 1.0})) == 1);

    ExogenousGroup overlap{{Box{{0.4, 0.0}, {1.0, 1.0}}}, 0.6, 1.0};
    CHECK_THROWS_AS(Partition::exogenous(2, {left, overlap}), InvalidInput);
    CHECK_THROWS_AS(Partition::exogenous(2, {left}), InvalidInput);
}

TEST_CASE("discrete products") {
    auto one = square_partition(1, 2);
    auto p = Partition::discrete_product({2}, {one, one}, {{0.5}, {0.5}});
    CHECK(p.size() == 2);
    CHECK(*p.bin(0).prob_mass == 0.5);
    CHECK(p.locate(Covariate{{1}, {0.3, 0.3}}) == 1);

    auto halves = square_partition(2, 1);
    auto q = Partition::discrete_product({2}, {halves, halves}, {{0.25, 0.25}, {0.25, 0.25}});
    CHECK(q.size() == 4);
    double total = 0.0;
    for (const auto& b : q.bins()) {
        CHECK(*b.prob_mass == 0.25);
        total += *b.prob_mass;
    }
    CHECK(total == 1.0);
    CHECK(q.locate(Covariate{{1}, {0.7}}) == 3);
    CHECK(q.locate(Covariate{{0}, {0.7}}) == 1);

    auto single = Partition::discrete_product({1}, {halves}, {{0.5, 0.5}});
    CHECK(single.size() == halves.size());
    CHECK(single.locate(Covariate{{0}, {0.7}}) == halves.locate(at({0.7})));

    CHECK_THROWS_AS(Partition::discrete_product({2}, {one, one}, {{0.5}, {0.4}}), InvalidInput);
    CHECK_THROWS_AS(p.locate(Covariate{{2}, {0.3, 0.3}}), InvalidInput);
    CHECK_THROWS_AS(p.locate(at({0.3, 0.3})), InvalidInput);
}
