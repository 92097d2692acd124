#include <doctest.h>

#include <sstream>

#include "seqtreat/csv.hpp"
#include "seqtreat/experiment.hpp"

using namespace seqtreat;

namespace {

std::string csv_of(const RunSummary& s) {
    std::ostringstream os;
    write_csv(os, s);
    return os.str();
}

const char* kTwoPoint = R"({
    "environment": {"arms": [{"mu": 0.7}, {"mu": 0.5}, {"mu": 0.45}], "batch": {"kind": "uniform_random", "m": 3},
                    "horizon": {"n": 2000}},
    "replications": 6, "master_seed": 17, "sweep": {"n": [500, 2000]}})";

// Constant fields equal to the context-free arms of kPlain.
const char* kPlain = R"({
    "environment": {"arms": [{"mu": 0.6, "sigma2": 0.2}, {"mu": 0.5, "sigma2": 0.1}],
                    "batch": {"m": 3}, "horizon": {"n": 3000}},
    "replications": 3, "master_seed": 5})";

const char* kOneBin = R"({
    "environment": {
        "covariates": {"dimension": 2,
            "fields": [[{"mean": {"kind": "constant", "value": 0.6}, "variance": {"kind": "constant", "value": 0.2}},
                        {"mean": {"kind": "constant", "value": 0.5}, "variance": {"kind": "constant", "value": 0.1}}]]},
        "batch": {"m": 3}, "horizon": {"n": 3000}},
    "policy": {"partition": {"kind": "square", "P": 1}},
    "replications": 3, "master_seed": 5})";

const char* kContinuous = R"({
    "environment": {
        "covariates": {"dimension": 2,
            "fields": [[{"mean": {"kind": "affine", "intercept": 0.2, "slopes": [0.4, 0.2]}},
                        {"mean": {"kind": "constant", "value": 0.5}}]]},
        "batch": {"m": 2}, "horizon": {"n": 4000}},
    "policy": {"partition": {"kind": "square", "P": 3}},
    "replications": 3, "master_seed": 8})";

const char* kOneLevel = R"({
    "environment": {
        "covariates": {"dimension": 2, "levels": [1], "level_probs": [1],
            "fields": [[{"mean": {"kind": "affine", "intercept": 0.2, "slopes": [0.4, 0.2]}},
                        {"mean": {"kind": "constant", "value": 0.5}}]]},
        "batch": {"m": 2}, "horizon": {"n": 4000}},
    "policy": {"partition": {"kind": "discrete_product", "per_level": [{"kind": "square", "P": 3}]}},
    "replications": 3, "master_seed": 8})";

void require_same_assignments(const RunSummary& a, const RunSummary& b) {
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t c = 0; c < a.cells.size(); ++c) {
        REQUIRE(a.cells[c].reps.size() == b.cells[c].reps.size());
        for (std::size_t r = 0; r < a.cells[c].reps.size(); ++r) {
            const auto& x = a.cells[c].reps[r];
            const auto& y = b.cells[c].reps[r];
            CHECK(x.regret == y.regret);
            CHECK(x.t_i == y.t_i);
            CHECK(x.s_n == y.s_n);
            REQUIRE(x.log);
            REQUIRE(y.log);
            REQUIRE(x.log->size() == y.log->size());
            bool same = true;
            for (std::size_t i = 0; i < x.log->size(); ++i) {
                same = same && x.log->arm(i) == y.log->arm(i) && x.log->outcome(i) == y.log->outcome(i) &&
                       x.log->batch(i) == y.log->batch(i);
            }
            CHECK(same);
        }
    }
}

}  // namespace

TEST_CASE("grid points") {
    SweepAxes axes;
    CHECK(grid_points(axes).size() == 1);
    axes.n = {1, 2, 3};
    axes.gap = {0.1, 0.2};
    const auto pts = grid_points(axes);
    REQUIRE(pts.size() == 6);
    CHECK(*pts[1].n == 1);
    CHECK(*pts[1].gap == 0.2);
    CHECK(axis_names(axes) == std::vector<std::string>{"n", "gap"});
}

TEST_CASE("deterministic arms: elimination at the first threshold crossing") {
    const auto cfg = parse_config(R"({
        "environment": {"arms": [{"kind": "deterministic", "value": 1}, {"kind": "deterministic", "value": 0}],
                        "batch": {"m": 2}, "horizon": {"n": 4096}}})");
    const auto sc = build_scenario(cfg, {});
    const auto r = run_replication(sc, 1);
    CHECK(r.regret == 2048.0);
    CHECK(r.t_i == std::vector<std::uint64_t>{2048, 2048});
    CHECK(r.s_n == 2048);
    CHECK(r.oos_arm == std::optional<TreatmentId>{0});
    CHECK(r.leader_violations == 0);
    CHECK(r.spread_violations == 0);
}

TEST_CASE("reproducibility and thread independence") {
    const auto cfg = parse_config(kTwoPoint);
    const auto one = csv_of(run_experiment(cfg, RunOptions{1}));
    CHECK(one == csv_of(run_experiment(cfg, RunOptions{1})));
    CHECK(one == csv_of(run_experiment(cfg, RunOptions{4})));
    RunOptions other{2};
    other.seed = 18;
    CHECK(one != csv_of(run_experiment(cfg, other)));
    const auto run = run_experiment(cfg, RunOptions{3});
    REQUIRE(run.cells.size() == 2);
    CHECK(run.cells[0].reps.size() == 6);
    for (const auto& cell : run.cells) {
        for (const auto& rep : cell.reps) {
            CHECK_FALSE(rep.error);
            CHECK(rep.leader_violations == 0);
            CHECK(rep.spread_violations == 0);
            std::uint64_t total = 0;
            for (auto t : rep.t_i) total += t;
            CHECK(total == rep.horizon);
        }
    }
}

TEST_CASE("a single bin reproduces the context-free run") {
    RunOptions opts{2, true};
    require_same_assignments(run_experiment(parse_config(kPlain), opts),
                             run_experiment(parse_config(kOneBin), opts));
}

TEST_CASE("one discrete level reproduces the continuous run") {
    RunOptions opts{2, true};
    const auto a = run_experiment(parse_config(kContinuous), opts);
    const auto b = run_experiment(parse_config(kOneLevel), opts);
    require_same_assignments(a, b);
    CHECK(a.cells[0].reps[0].modified_regret == b.cells[0].reps[0].modified_regret);
}

TEST_CASE("zero-diameter exogenous groups: regret equals modified regret") {
    const auto cfg = parse_config(R"({
        "environment": {
            "covariates": {"dimension": 1, "levels": [2], "level_probs": [0.4, 0.6],
                "fields": [[{"mean": {"kind": "constant", "value": 0.3}}, {"mean": {"kind": "constant", "value": 0.6}}],
                           [{"mean": {"kind": "constant", "value": 0.8}}, {"mean": {"kind": "constant", "value": 0.4}}]]},
            "batch": {"m": 2}, "horizon": {"n": 3000}},
        "policy": {"partition": {"kind": "discrete_product", "per_level": [
            {"kind": "exogenous", "groups": [{"boxes": [{"lo": [0], "hi": [1]}], "measure": 1, "diameter": 0}]},
            {"kind": "exogenous", "groups": [{"boxes": [{"lo": [0], "hi": [1]}], "measure": 1, "diameter": 0}]}]}},
        "replications": 4, "master_seed": 2})");
    const auto run = run_experiment(cfg, RunOptions{2});
    for (const auto& rep : run.cells[0].reps) {
        REQUIRE(rep.modified_regret);
        CHECK(rep.regret == doctest::Approx(*rep.modified_regret).epsilon(1e-12));
        CHECK(rep.regret > 0.0);
    }
}

TEST_CASE("single-arm environments assign the only arm") {
    const auto cfg = parse_config(R"({
        "environment": {"arms": [{"mu": 0.5}], "batch": {"m": 2}, "horizon": {"n": 100}}})");
    const auto r = run_replication(build_scenario(cfg, {}), 4);
    CHECK(r.regret == 0.0);
    CHECK(r.t_i == std::vector<std::uint64_t>{100});
}

TEST_CASE("delayed runs finish and respect the channel") {
    const auto cfg = parse_config(R"({
        "environment": {"arms": [{"mu": 0.7}, {"mu": 0.3}], "batch": {"m": 2}, "horizon": {"n": 6000},
                        "delay": {"D": 3, "a_bar": 0.5, "delay_aware_outcomes": true}},
        "policy": {"profile": "delayed"}, "replications": 2})");
    const auto run = run_experiment(cfg, RunOptions{1, true});
    for (const auto& rep : run.cells[0].reps) {
        REQUIRE(rep.log);
        for (std::size_t i = 0; i < rep.log->size(); ++i) {
            REQUIRE(rep.log->available_at(i) == rep.log->batch(i) + 2);
        }
        CHECK(rep.t_i[0] > rep.t_i[1]);
    }
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
