#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "seqtreat/partition.hpp"
#include "seqtreat/policy.hpp"
#include "seqtreat/welfare.hpp"

namespace seqtreat {

/// Shared settings for the per-bin policies.
struct CovariatePolicyConfig {
    std::size_t num_treatments = 2;
    double holder_L = 1.0;
    double holder_beta = 1.0;
    double n_expected = 1.0;
    Profile profile = Profile::standard;
    double a_bar = 1.0;
    std::size_t delay_batches = 0;
    std::optional<double> gamma_override;
    std::optional<double> t_override;  // replaces n * B_j in every bin
    std::optional<double> threshold_scale_override;
};

/// Runs one SequentialPolicy per bin of a partition. Bin j uses
/// gamma = K_f * L and T = n * B_j (n * P(bin) for discrete products), at least 1.
/// A bin's batch counter advances only on global batches that contain members
/// of that bin.
class CovariatePolicy {
public:
    CovariatePolicy(Partition partition, WelfareSpec welfare, CovariatePolicyConfig cfg);

    const Partition& partition() const noexcept { return partition_; }
    const WelfareSpec& welfare() const noexcept { return welfare_; }
    const CovariatePolicyConfig& config() const noexcept { return cfg_; }
    const SequentialPolicy& bin_policy(std::size_t j) const { return bins_.at(j); }
    std::size_t num_bins() const noexcept { return bins_.size(); }

    /// Assigns one global batch. Result i belongs to batch[i]: (bin, treatment).
    std::vector<std::pair<std::size_t, TreatmentId>> route_assign(const std::vector<Covariate>& batch);

    /// Same, with precomputed bins; writes into `out` (cleared first).
    void route_assign_bins(const std::vector<std::size_t>& bins,
                           std::vector<TreatmentId>& out);

    void route_observe(std::size_t bin, TreatmentId treatment, double y);

    /// Runs elimination in every bin that saw a new outcome since its last
    /// check. Returns (bin, removed treatments) for bins that were checked.
    std::vector<std::pair<std::size_t, std::vector<TreatmentId>>> end_of_batch();

    /// Bins that received members during the latest route_assign.
    const std::vector<std::size_t>& touched_bins() const noexcept { return touched_; }

    /// Bins with outcomes observed since their last elimination check (unsorted).
    const std::vector<std::size_t>& dirty_bins() const noexcept { return dirty_; }

private:
    Partition partition_;
    WelfareSpec welfare_;
    CovariatePolicyConfig cfg_;
    std::vector<SequentialPolicy> bins_;
    std::vector<std::size_t> dirty_;
    std::vector<std::size_t> touched_;
    // scratch for route_assign_bins
    std::vector<std::size_t> members_;
    std::vector<std::size_t> cursor_;
    std::vector<std::vector<TreatmentId>> pending_;
};

}  // namespace seqtreat
