#pragma once

#include <cstddef>
#include <vector>

#include "seqtreat/environment.hpp"

namespace seqtreat {

struct BinMeta {
    double measure = 1.0;  // B_j
    double diameter = 0.0;  // V_j
};

struct BoundInputs {
    std::vector<double> gaps;  // Delta_1..Delta_K, positive
    double n = 1.0;
    double K = 1.0;          // number of suboptimal treatments
    double lipschitz = 1.0;  // welfare constant
    double m_bar = 1.0;
    double beta = 1.0;
    double d = 2.0;
    double margin_alpha = 1.0;
    double a_bar = 1.0;
    double D = 0.0;
    double C = 1.0;
    std::vector<BinMeta> bins;

    /// Throws InvalidInput on nonpositive scalars or gaps.
    void validate() const;
};

struct BoundValue {
    double value = 0.0;
    bool log_floor_applied = false;  // some log argument fell below e
};

/// min of the gap-dependent and the uniform regret bound without covariates.
BoundValue bound_nocov(const BoundInputs& in);
/// Expected number of assignments of suboptimal treatment i (0-based into gaps).
BoundValue bound_subopt(const BoundInputs& in, std::size_t i);
/// Expected welfare loss of the most-assigned treatment.
BoundValue bound_oos(const BoundInputs& in);
/// Regret bound for a grouping with bins (B_j, V_j).
BoundValue bound_bins(const BoundInputs& in);
/// Number of individuals given a suboptimal treatment under the margin condition.
BoundValue bound_sn(const BoundInputs& in);
/// Regret with outcomes delayed D batches, no covariates.
BoundValue bound_delay(const BoundInputs& in);
/// Regret with delayed outcomes and bins.
BoundValue bound_delay_bins(const BoundInputs& in);

enum class DelayForm { nocov, bins };

/// Grid point minimizing the delay bound with a = a_bar(D); the lowest D wins ties.
std::size_t argmin_delay(const BoundInputs& in, const std::vector<std::size_t>& D_grid,
                         const ABarFamily& a_bar, DelayForm form = DelayForm::nocov);

/// Bin metadata of a P^d square grid.
std::vector<BinMeta> square_bin_meta(std::size_t P, std::size_t d);

}  // namespace seqtreat
