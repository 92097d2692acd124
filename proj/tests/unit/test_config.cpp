#include <doctest.h>

#include <algorithm>

#include "seqtreat/config.hpp"

using namespace seqtreat;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
    return std::any_of(e.problems().begin(), e.problems().end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

ConfigError error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("config was accepted");
    return ConfigError({});
}

}  // namespace

TEST_CASE("minimal context-free config") {
    const auto cfg = parse_config(R"({
        "environment": {"arms": [{"mu": 0.6}, {"kind": "deterministic", "value": 0.2}],
                        "batch": {"m": 4}, "horizon": {"n": 500}},
        "replications": 3, "master_seed": 9})");
    REQUIRE(cfg.arms.size() == 2);
    CHECK(cfg.arms[0].kind == ArmDistribution::Kind::two_point);
    CHECK_FALSE(cfg.arms[0].sigma2.has_value());
    CHECK(cfg.arms[1].value == 0.2);
    CHECK(cfg.batch.max_size() == 4);
    CHECK(cfg.horizon.n == 500);
    CHECK(cfg.replications == 3);
    CHECK(cfg.master_seed == 9);
    CHECK(cfg.profile == Profile::standard);
    CHECK(cfg.sweep.empty());
}

TEST_CASE("every problem is reported at once") {
    const auto e = error_of(R"({
        "environment": {"arms": [{"mu": 0.6, "colour": 1}], "batch": {"m": 0}, "horizon": {"n": 10},
                        "delay": {"D": 2}},
        "replications": 0, "typo": true})");
    CHECK(e.problems().size() >= 4);
    CHECK(mentions(e, "colour"));
    CHECK(mentions(e, "typo"));
    CHECK(mentions(e, "replications"));
    CHECK(mentions(e, "profile"));
}

TEST_CASE("cross-field rules") {
    CHECK(mentions(error_of(R"({"environment": {"arms": [{"mu": 0.5}], "batch": {"m": 1}, "horizon": {"n": 10}},
                                "policy": {"partition": {"kind": "square", "P": 2}}})"),
                   "partition"));
    CHECK(mentions(error_of(R"({"environment": {"arms": [{"mu": 0.5, "gap_multiple": 1}], "batch": {"m": 1},
                                                "horizon": {"n": 10}}})"),
                   "gap"));
    CHECK(mentions(error_of(R"({"environment": {"arms": [{"mu": 0.5}], "batch": {"m": 1}, "horizon": {"n": 10}},
                                "sweep": {"n": []}})"),
                   "empty axis"));
    CHECK(mentions(error_of(R"({"environment": {"arms": [{"mu": 0.5, "sigma2": 0.3}, {"kind": "deterministic", "value": 2}],
                                                "batch": {"m": 1}, "horizon": {"n": 10}}})"),
                   "sigma2"));
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("covariate config with delays and sweeps") {
    const auto cfg = parse_config(R"({
        "welfare": {"kind": "mean_variance", "alpha": 0.5},
        "environment": {
            "covariates": {"dimension": 2, "holder_beta": 1, "holder_L": 1,
                "fields": [[{"mean": {"kind": "affine", "intercept": 0.2, "slopes": [0.3, 0.3]}},
                            {"mean": {"kind": "constant", "value": 0.5},
                             "variance": {"kind": "constant", "value": 0.1}}]]},
            "batch": {"kind": "uniform_random", "m": 3},
            "horizon": {"kind": "poisson", "n": 1000},
            "delay": {"D": 1, "a_bar": {"kind": "geometric", "a0": 2, "rho": 0.5, "cap": 1}}},
        "policy": {"profile": "delayed", "partition": {"kind": "square", "P": "auto"}},
        "sweep": {"n": [100, 200], "D": [1, 2], "P": [1, 2]}})");
    REQUIRE(cfg.covariates);
    CHECK(cfg.covariates->fields.size() == 1);
    CHECK(cfg.covariates->fields[0].size() == 2);
    CHECK(cfg.profile == Profile::delayed);
    CHECK_FALSE(cfg.partition.P.has_value());
    CHECK(cfg.delay.a_bar(0) == 1.0);
    CHECK(cfg.delay.a_bar(3) == 0.25);
    CHECK(cfg.sweep.n.size() == 2);
    CHECK(cfg.welfare.kind == WelfareKind::mean_variance);
}

TEST_CASE("ratio welfare needs a floor") {
    CHECK(mentions(error_of(R"({"welfare": {"kind": "sharpe"},
                                "environment": {"arms": [{"mu": 0.5}], "batch": {"m": 1}, "horizon": {"n": 10}}})"),
                   "floor_c"));
}

TEST_CASE("bounds-only config") {
    const auto cfg = parse_config(R"({"bounds": {"kind": "delay", "gaps": [0.5], "n": [1000, 2000], "D": [0, 1, 2],
                                                 "a_bar": {"kind": "geometric", "a0": 1, "rho": 0.5}}})");
    REQUIRE(cfg.bounds);
    CHECK(cfg.bounds->kind == "delay");
    CHECK(cfg.bounds->D.size() == 3);
    CHECK(mentions(error_of(R"({"bounds": {"kind": "wrong"}})"), "kind"));
}
