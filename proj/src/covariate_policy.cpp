#include "seqtreat/covariate_policy.hpp"

#include <algorithm>
#include <cmath>

namespace seqtreat {

CovariatePolicy::CovariatePolicy(Partition partition, WelfareSpec welfare,
                                 CovariatePolicyConfig cfg)
    : partition_(std::move(partition)), welfare_(std::move(welfare)), cfg_(cfg) {
    if (!(cfg_.holder_L > 0.0)) throw InvalidInput("Hoelder constant L must be positive");
    if (!(cfg_.holder_beta > 0.0 && cfg_.holder_beta <= 1.0)) {
        throw InvalidInput("Hoelder exponent beta must lie in (0,1]");
    }
    if (!(cfg_.n_expected > 0.0)) throw InvalidInput("expected sample size must be positive");
    const double gamma = cfg_.gamma_override.value_or(welfare_.lipschitz_constant() * cfg_.holder_L);
    bins_.reserve(partition_.size());
    for (const Bin& b : partition_.bins()) {
        PolicyConfig pc;
        pc.num_treatments = cfg_.num_treatments;
        pc.gamma = gamma;
        const double share = b.prob_mass.value_or(b.measure);
        pc.t_param = cfg_.t_override.value_or(std::max(1.0, cfg_.n_expected * share));
        pc.profile = cfg_.profile;
        pc.a_bar = cfg_.a_bar;
        pc.delay_batches = cfg_.delay_batches;
        pc.threshold_scale_override = cfg_.threshold_scale_override;
        bins_.emplace_back(pc);
    }
    members_.assign(bins_.size(), 0);
    cursor_.assign(bins_.size(), 0);
    pending_.resize(bins_.size());
}

void CovariatePolicy::route_assign_bins(const std::vector<std::size_t>& bins,
                                        std::vector<TreatmentId>& out) {
    out.clear();
    touched_.clear();
    for (std::size_t j : bins) {
        if (j >= bins_.size()) throw InvalidInput("bin id out of range");
        if (members_[j]++ == 0) touched_.push_back(j);
    }
    for (std::size_t j : touched_) {
        pending_[j].clear();
        bins_[j].assign_batch(members_[j], pending_[j]);
        cursor_[j] = 0;
    }
    out.reserve(bins.size());
    for (std::size_t j : bins) out.push_back(pending_[j][cursor_[j]++]);
    for (std::size_t j : touched_) members_[j] = 0;
}

std::vector<std::pair<std::size_t, TreatmentId>> CovariatePolicy::route_assign(
    const std::vector<Covariate>& batch) {
    std::vector<std::size_t> bins;
    bins.reserve(batch.size());
    for (const auto& c : batch) bins.push_back(partition_.locate(c));
    std::vector<TreatmentId> arms;
    route_assign_bins(bins, arms);
    std::vector<std::pair<std::size_t, TreatmentId>> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = {bins[i], arms[i]};
    return out;
}

void CovariatePolicy::route_observe(std::size_t bin, TreatmentId treatment, double y) {
    if (bin >= bins_.size()) throw InvalidInput("bin id out of range");
    auto& p = bins_[bin];
    const bool was_dirty = p.state().observed_since_check;
    p.observe(treatment, y);
    if (!was_dirty) dirty_.push_back(bin);
}

std::vector<std::pair<std::size_t, std::vector<TreatmentId>>> CovariatePolicy::end_of_batch() {
    std::vector<std::pair<std::size_t, std::vector<TreatmentId>>> out;
    std::sort(dirty_.begin(), dirty_.end());
    out.reserve(dirty_.size());
    for (std::size_t j : dirty_) out.emplace_back(j, bins_[j].eliminate(welfare_));
    dirty_.clear();
    return out;
}

}  // namespace seqtreat
