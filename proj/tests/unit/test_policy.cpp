#include <doctest.h>

#include <cmath>

#include "seqtreat/policy.hpp"
#include "seqtreat/rng.hpp"

using namespace seqtreat;

namespace {

PolicyConfig cfg2(double T, std::size_t arms = 2) {
    PolicyConfig c;
    c.num_treatments = arms;
    c.gamma = 1.0;
    c.t_param = T;
    return c;
}

// Independent re-derivation of the elimination point with long double.
std::uint64_t first_crossing(long double T) {
    for (std::uint64_t s = 1;; ++s) {
        const long double sd = static_cast<long double>(s);
        const long double l = std::max(std::log(T / sd), 1.0L);
        if (32.0L * std::sqrt(2.0L / sd * l) <= 1.0L) return s;
    }
}

}  // namespace

TEST_CASE("logbar") {
    CHECK(logbar(1.0) == 1.0);
    CHECK(logbar(std::exp(2.0)) == doctest::Approx(2.0));
    CHECK(logbar(0.5) == 1.0);
    CHECK_THROWS_AS(logbar(0.0), InvalidInput);
    CHECK_THROWS_AS(logbar(-1.0), InvalidInput);
}

TEST_CASE("threshold examples") {
    CHECK(threshold(32, cfg2(32)) == doctest::Approx(8.0));
    CHECK(threshold(2048, cfg2(4096)) == 1.0);
    auto d = cfg2(32);
    d.profile = Profile::delayed;
    d.a_bar = 0.5;
    CHECK(threshold(32, d) == doctest::Approx(2.0));
    auto o = cfg2(32);
    o.threshold_scale_override = 4.0;
    CHECK(threshold(32, o) == doctest::Approx(1.0));
    CHECK_THROWS_AS(threshold(0, cfg2(32)), InvalidInput);
}

TEST_CASE("threshold scan oracle") {
    // Frozen from a separate scan of s = 1..T.
    CHECK(first_crossing(4096.0L) == 2048);
    CHECK(first_crossing(65536.0L) == 5193);
    for (double T : {4096.0, 65536.0}) {
        const auto s = first_crossing(T);
        CHECK(threshold(s, cfg2(T)) <= 1.0);
        CHECK(threshold(s - 1, cfg2(T)) > 1.0);
    }
}

TEST_CASE("config validation") {
    auto c = cfg2(10);
    c.num_treatments = 1;
    CHECK_THROWS_AS(SequentialPolicy{c}, InvalidInput);
    c = cfg2(10);
    c.delay_batches = 2;
    CHECK_THROWS_AS(SequentialPolicy{c}, InvalidInput);
    c.profile = Profile::delayed;
    c.a_bar = 2.5;
    CHECK_THROWS_AS(SequentialPolicy{c}, InvalidInput);
    c = cfg2(0);
    CHECK_THROWS_AS(SequentialPolicy{c}, InvalidInput);
}

TEST_CASE("assign_batch deficit first, then round robin") {
    SequentialPolicy p(cfg2(100, 3));
    // Bring the counts to (3,3,2).
    p.assign_batch(8);
    CHECK(p.state().assigned == std::vector<std::uint64_t>{3, 3, 2});
    CHECK(p.assign_batch(4) == std::vector<TreatmentId>{2, 0, 1, 2});
    CHECK(p.state().assigned == std::vector<std::uint64_t>{4, 4, 4});

    SequentialPolicy q(cfg2(100, 2));
    CHECK(q.assign_batch(3) == std::vector<TreatmentId>{0, 1, 0});
    CHECK(q.state().assigned == std::vector<std::uint64_t>{2, 1});
    CHECK_THROWS_AS(q.assign_batch(0), InvalidInput);
    CHECK(q.state().batch_index == 1);
}

TEST_CASE("single survivor gets the whole batch") {
    SequentialPolicy p(cfg2(4096));
    for (int b = 0; b < 2048; ++b) {
        for (auto t : p.assign_batch(2)) p.observe(t, t == 0 ? 1.0 : 0.0);
        p.eliminate(WelfareSpec::mean());
    }
    REQUIRE(p.state().active == std::vector<TreatmentId>{0});
    CHECK(p.assign_batch(5) == std::vector<TreatmentId>{0, 0, 0, 0, 0});
}

TEST_CASE("observe") {
    SequentialPolicy p(cfg2(10));
    p.assign_batch(6);
    p.observe(0, 0.0);
    p.observe(0, 1.0);
    CHECK(p.state().stats[0].mean() == 0.5);
    CHECK(p.state().stats[0].variance() == 0.25);
    p.observe(1, 0.5);
    CHECK(p.state().stats[1].variance() == 0.0);
    CHECK_THROWS_AS(p.observe(1, 1.2), InvalidInput);
    CHECK_THROWS_AS(p.observe(1, -0.1), InvalidInput);
    CHECK_THROWS_AS(p.observe(5, 0.5), InvalidInput);
    p.observe(0, 0.5);
    CHECK_THROWS_AS(p.observe(0, 0.5), InvalidInput);  // only three assigned

    TreatmentStats s;
    for (double y : {0.2, 0.4, 0.6}) {
        ++s.count;
        s.sum_y += y;
        s.sum_y2 += y * y;
    }
    CHECK(s.mean() == doctest::Approx(0.4));
    CHECK(s.variance() == doctest::Approx(0.08 / 3.0));
}

TEST_CASE("eliminate rule") {
    const auto mean = WelfareSpec::mean();
    auto run_to = [&](double gap_hi, double gap_lo, std::uint64_t s) {
        SequentialPolicy p(cfg2(4096));
        for (std::uint64_t b = 0; b < s; ++b) {
            for (auto t : p.assign_batch(2)) p.observe(t, t == 0 ? gap_hi : gap_lo);
        }
        return p;
    };
    auto p = run_to(1.0, 0.0, 2048);
    CHECK(p.eliminate(mean) == std::vector<TreatmentId>{1});
    auto q = run_to(0.75, 0.25, 2048);
    CHECK(q.eliminate(mean).empty());
    auto r = run_to(1.0, 0.0, 2047);
    CHECK(r.eliminate(mean).empty());

    SequentialPolicy fresh(cfg2(4096));
    fresh.assign_batch(2);
    fresh.observe(0, 1.0);
    CHECK(fresh.eliminate(mean).empty());  // treatment 1 still unobserved
    CHECK_FALSE(fresh.empirical_leader(mean).has_value());
}

TEST_CASE("out-of-sample selection") {
    SequentialPolicy p(cfg2(10, 3));
    CHECK(p.select_out_of_sample() == 0);
    p.assign_batch(2);  // (1,1,0)
    CHECK(p.select_out_of_sample() == 0);
    SequentialPolicy q(cfg2(10, 2));
    q.assign_batch(3);
    q.observe(0, 0.0);
    q.observe(1, 1.0);
    q.observe(0, 0.0);
    q.eliminate(WelfareSpec::mean());
    CHECK(q.select_out_of_sample() == 0);
}

TEST_CASE("property: invariants on random runs") {
    const auto w = WelfareSpec::mean_variance(1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t arms = 2 + static_cast<std::size_t>(rng.uniform_int(0, 4));
        PolicyConfig c = cfg2(2000, arms);
        c.threshold_scale_override = 2.0;  // eliminate within the run
        SequentialPolicy p(c);
        std::vector<double> mu(arms);
        for (auto& m : mu) m = rng.uniform();
        auto prev = p.state().active;
        for (int b = 0; b < 300; ++b) {
            const auto m = static_cast<std::size_t>(rng.uniform_int(1, 7));
            for (auto t : p.assign_batch(m)) {
                REQUIRE(p.is_active(t));
                p.observe(t, rng.uniform() < mu[t] ? 1.0 : 0.0);
            }
            const auto leader = p.empirical_leader(w);
            const auto removed = p.eliminate(w);
            if (leader) REQUIRE(p.is_active(*leader));
            REQUIRE_FALSE(p.state().active.empty());
            REQUIRE(p.assignment_spread() <= 1);
            for (auto t : p.state().active) REQUIRE(std::find(prev.begin(), prev.end(), t) != prev.end());
            REQUIRE(p.state().active.size() + removed.size() == prev.size());
            prev = p.state().active;
        }
    }
}

TEST_CASE("reproducible trajectories") {
    auto trace = [] {
        Rng rng(99);
        SequentialPolicy p(cfg2(500, 3));
        std::vector<TreatmentId> all;
        for (int b = 0; b < 200; ++b) {
            for (auto t : p.assign_batch(3)) {
                all.push_back(t);
                p.observe(t, rng.uniform());
            }
            p.eliminate(WelfareSpec::mean());
        }
        return all;
    };
    CHECK(trace() == trace());
}
