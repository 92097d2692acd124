#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqtreat/config.hpp"
#include "seqtreat/covariate_policy.hpp"
#include "seqtreat/environment.hpp"
#include "seqtreat/metrics.hpp"

namespace seqtreat {

/// One cell of a sweep; unset axes take the config's base values.
struct GridPoint {
    std::optional<std::uint64_t> n;
    std::optional<std::size_t> D;
    std::optional<std::size_t> P;
    std::optional<double> gap;

    bool operator==(const GridPoint&) const = default;
};

/// Cartesian product in axis order n, D, P, gap (last axis fastest). A single
/// empty point when no axis is declared.
std::vector<GridPoint> grid_points(const SweepAxes& axes);
std::vector<std::string> axis_names(const SweepAxes& axes);

/// The experiment at one grid point with every default resolved.
struct Scenario {
    std::uint64_t n = 1;
    std::size_t D = 0;
    double a_bar = 1.0;
    double gap = 0.0;
    WelfareSpec welfare = WelfareSpec::mean();
    std::optional<Environment> env;
    std::optional<Partition> partition;
    std::optional<BinOracle> oracle;
    PolicyConfig policy;              // context-free runs
    CovariatePolicyConfig cov_policy;  // runs with a partition
    BatchProcess batch;
    HorizonSampler horizon;
    double tol = 1e-12;
    std::vector<double> gaps;  // context-free welfare gaps per arm
};

/// Throws InvalidInput when the resolved pieces are inconsistent.
Scenario build_scenario(const ExperimentConfig& cfg, const GridPoint& point);

struct ReplicationResult {
    std::uint64_t seed = 0;
    std::uint64_t horizon = 0;
    std::uint64_t batches = 0;
    double regret = 0.0;
    std::optional<double> modified_regret;
    std::uint64_t s_n = 0;
    std::vector<std::uint64_t> t_i;
    std::optional<TreatmentId> oos_arm;
    std::optional<double> oos_regret;
    // Batch-end checks: the pre-elimination leader survives; active counts
    // stay within one of each other.
    std::uint64_t leader_violations = 0;
    std::uint64_t spread_violations = 0;
    std::optional<std::string> error;
    std::optional<AssignmentLog> log;
};

struct Aggregate {
    std::size_t replications = 0;
    std::size_t failures = 0;
    double mean_regret = 0.0;
    double sd_regret = 0.0;
    std::optional<double> mean_modified_regret;
    std::optional<double> sd_modified_regret;
    double mean_s_n = 0.0;
    std::optional<double> mean_oos_regret;

    bool operator==(const Aggregate&) const = default;
};

Aggregate aggregate(const std::vector<ReplicationResult>& reps);

struct CellResult {
    GridPoint key;
    std::vector<ReplicationResult> reps;
    Aggregate summary;
};

struct RunSummary {
    std::vector<std::string> axes;
    std::vector<CellResult> cells;
    double wall_seconds = 0.0;
};

struct RunOptions {
    std::size_t threads = 0;  // 0: hardware concurrency
    bool keep_log = false;
    std::optional<std::size_t> replications;  // overrides the config
    std::optional<std::uint64_t> seed;        // overrides master_seed
};

/// One replication, deterministic in (scenario, seed).
ReplicationResult run_replication(const Scenario& sc, std::uint64_t seed, bool keep_log = false);

/// Runs every grid point of cfg.sweep (a single cell without one). Seeds are
/// replication_seed(master, cell, rep); results are ordered by cell, then rep.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// run_experiment over explicit axes, which replace cfg.sweep.
RunSummary sweep(const ExperimentConfig& cfg, const SweepAxes& axes, const RunOptions& opts = {});

/// Calls f(i) for i in [0, count) on a pool of worker threads.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& f);

std::string format_summary(const RunSummary& s);

}  // namespace seqtreat
