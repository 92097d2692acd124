#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "seqtreat/environment.hpp"
#include "seqtreat/partition.hpp"
#include "seqtreat/policy.hpp"
#include "seqtreat/welfare.hpp"

namespace seqtreat {

struct AssignmentRecord {
    std::uint64_t index = 0;  // 0-based arrival order
    std::uint64_t batch = 0;  // 1-based global batch
    std::optional<std::size_t> bin;
    TreatmentId arm = 0;
    std::optional<Covariate> covariate;
    double outcome = 0.0;
    std::uint64_t available_at = 0;
};

/// Per-individual log stored column-wise. Bins and covariates are present
/// for covariate runs only.
class AssignmentLog {
public:
    AssignmentLog() = default;
    AssignmentLog(std::size_t dimension, std::size_t discrete);

    void push(std::uint64_t batch, std::optional<std::size_t> bin, TreatmentId arm,
              const Covariate* covariate, double outcome, std::uint64_t available_at);
    void reserve(std::size_t n);

    std::size_t size() const noexcept { return arms_.size(); }
    bool empty() const noexcept { return arms_.empty(); }
    bool has_covariates() const noexcept { return dimension_ > 0; }
    std::size_t dimension() const noexcept { return dimension_; }

    AssignmentRecord record(std::size_t i) const;
    Covariate covariate(std::size_t i) const;
    TreatmentId arm(std::size_t i) const { return arms_[i]; }
    std::uint64_t batch(std::size_t i) const { return batches_[i]; }
    std::optional<std::size_t> bin(std::size_t i) const;
    double outcome(std::size_t i) const { return outcomes_[i]; }
    std::uint64_t available_at(std::size_t i) const { return available_[i]; }

    bool operator==(const AssignmentLog&) const = default;

private:
    std::size_t dimension_ = 0;
    std::size_t discrete_ = 0;
    std::vector<std::uint64_t> batches_;
    std::vector<std::size_t> bins_;  // SIZE_MAX when absent
    std::vector<TreatmentId> arms_;
    std::vector<double> outcomes_;
    std::vector<std::uint64_t> available_;
    std::vector<double> x_;
    std::vector<int> levels_;
};

struct RegretReport {
    double cumulative_regret = 0.0;
    std::vector<std::uint64_t> per_arm_counts;  // T_i
    std::uint64_t s_n = 0;
    std::vector<double> trajectory;  // partial sums after each record
};

/// Streaming form of the metrics, so long runs need not keep a log.
/// Regret and S_N use the pointwise oracle; modified regret uses the bin
/// oracle when one is given.
class MetricsAccumulator {
public:
    MetricsAccumulator(const Environment& env, const WelfareSpec& welfare,
                       const BinOracle* bins = nullptr, double tol = 1e-12);

    /// Instantaneous regret of assigning `arm` (to `c` when covariates exist).
    void add(TreatmentId arm, const Covariate* c, std::optional<std::size_t> bin);

    double regret() const noexcept { return regret_; }
    double modified_regret() const noexcept { return modified_; }
    std::uint64_t s_n() const noexcept { return s_n_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    /// counts per (bin, arm), flattened bin-major; empty without a bin oracle.
    const std::vector<std::uint64_t>& bin_counts() const noexcept { return bin_counts_; }
    double last_increment() const noexcept { return last_; }

private:
    const Environment& env_;
    const WelfareSpec& welfare_;
    const BinOracle* bins_;
    double tol_;
    std::vector<double> fixed_gaps_;  // context-free environments
    std::vector<double> scratch_;
    double regret_ = 0.0;
    double modified_ = 0.0;
    double last_ = 0.0;
    std::uint64_t s_n_ = 0;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> bin_counts_;
};

RegretReport regret(const AssignmentLog& log, const Environment& env, const WelfareSpec& welfare,
                    double tol = 1e-12);

double modified_regret(const AssignmentLog& log, const Environment& env, const Partition& partition,
                       const WelfareSpec& welfare);
double modified_regret(const AssignmentLog& log, const BinOracle& oracle);

std::vector<std::uint64_t> subopt_counts(const AssignmentLog& log, std::size_t num_arms);
/// Counts per bin: result[j][i].
std::vector<std::vector<std::uint64_t>> subopt_counts_per_bin(const AssignmentLog& log,
                                                              std::size_t num_bins,
                                                              std::size_t num_arms);

std::uint64_t subopt_individuals(const AssignmentLog& log, const Environment& env,
                                 const WelfareSpec& welfare, double tol = 1e-12);

double oos_regret(TreatmentId selected, const Environment& env, const WelfareSpec& welfare);

/// Welfare gaps f* - f^(i) of a context-free environment.
std::vector<double> welfare_gaps(const Environment& env, const WelfareSpec& welfare);

}  // namespace seqtreat
