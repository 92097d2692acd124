#include "seqtreat/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace seqtreat {

void PolicyConfig::validate() const {
    if (num_treatments < 2) throw InvalidInput("policy needs at least two treatments");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be positive");
    if (!(t_param > 0.0) || !std::isfinite(t_param)) throw InvalidInput("T must be positive");
    if (threshold_scale_override && !(*threshold_scale_override > 0.0)) {
        throw InvalidInput("threshold scale override must be positive");
    }
    if (profile == Profile::standard && delay_batches != 0) {
        throw InvalidInput("standard profile requires delay_batches = 0");
    }
    if (profile == Profile::delayed && !(a_bar > 0.0 && a_bar <= 2.0)) {
        throw InvalidInput("a_bar must lie in (0,2]");
    }
}

double logbar(double x) {
    if (!(x > 0.0)) throw InvalidInput("logbar needs a positive argument");
    return std::max(std::log(x), 1.0);
}

double threshold(std::uint64_t s, const PolicyConfig& cfg) {
    if (s == 0) throw InvalidInput("threshold needs s >= 1");
    const double sd = static_cast<double>(s);
    const double lb = logbar(cfg.t_param / sd);
    if (cfg.profile == Profile::standard) {
        const double scale = cfg.threshold_scale_override.value_or(32.0);
        return scale * cfg.gamma * std::sqrt(2.0 / sd * lb);
    }
    const double scale = cfg.threshold_scale_override.value_or(16.0);
    return scale * cfg.gamma * std::sqrt(2.0 * cfg.a_bar * cfg.a_bar / sd * lb);
}

SequentialPolicy::SequentialPolicy(PolicyConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    state_.active.resize(cfg_.num_treatments);
    for (std::size_t i = 0; i < cfg_.num_treatments; ++i) {
        state_.active[i] = static_cast<TreatmentId>(i);
    }
    state_.stats.assign(cfg_.num_treatments, {});
    state_.assigned.assign(cfg_.num_treatments, 0);
}

void SequentialPolicy::assign_batch(std::size_t m, std::vector<TreatmentId>& out) {
    if (m == 0) throw InvalidInput("batch size must be positive");
    auto& active = state_.active;
    auto& assigned = state_.assigned;
    if (active.size() == 1) {
        out.insert(out.end(), m, active.front());
        assigned[active.front()] += m;
    } else {
        // Least assigned first, lowest id among ties. Once the active counts are
        // level this is a plain ascending-id round robin.
        for (std::size_t k = 0; k < m; ++k) {
            TreatmentId pick = active.front();
            for (TreatmentId t : active) {
                if (assigned[t] < assigned[pick]) pick = t;
            }
            out.push_back(pick);
            ++assigned[pick];
        }
    }
    ++state_.batch_index;
}

std::vector<TreatmentId> SequentialPolicy::assign_batch(std::size_t m) {
    std::vector<TreatmentId> out;
    out.reserve(m);
    assign_batch(m, out);
    return out;
}

void SequentialPolicy::observe(TreatmentId treatment, double y) {
    if (treatment >= cfg_.num_treatments) throw InvalidInput("unknown treatment id");
    if (!(y >= 0.0 && y <= 1.0)) throw InvalidInput("outcome outside [0,1]");
    auto& s = state_.stats[treatment];
    if (s.count >= state_.assigned[treatment]) {
        throw InvalidInput("outcome for treatment " + std::to_string(treatment) +
                           " exceeds its assignments");
    }
    ++s.count;
    s.sum_y += y;
    s.sum_y2 += y * y;
    state_.observed_since_check = true;
}

std::uint64_t SequentialPolicy::min_observed() const {
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
    for (TreatmentId t : state_.active) lo = std::min(lo, state_.stats[t].count);
    return lo;
}

std::vector<TreatmentId> SequentialPolicy::eliminate(const WelfareSpec& welfare) {
    state_.observed_since_check = false;
    std::vector<TreatmentId> removed;
    auto& active = state_.active;
    if (active.size() < 2) return removed;
    const std::uint64_t floor_count = min_observed();
    if (floor_count == 0) return removed;

    std::vector<double> value(active.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& s = state_.stats[active[k]];
        value[k] = welfare.evaluate_projected(s.mean(), s.variance());
        best = std::max(best, value[k]);
    }
    const double cut = threshold(floor_count, cfg_);
    std::vector<TreatmentId> kept;
    kept.reserve(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (best - value[k] >= cut) {
            removed.push_back(active[k]);
        } else {
            kept.push_back(active[k]);
        }
    }
    active = std::move(kept);
    return removed;
}

std::optional<TreatmentId> SequentialPolicy::empirical_leader(const WelfareSpec& welfare) const {
    if (min_observed() == 0) return std::nullopt;
    std::optional<TreatmentId> leader;
    double best = -std::numeric_limits<double>::infinity();
    for (TreatmentId t : state_.active) {
        const auto& s = state_.stats[t];
        const double v = welfare.evaluate_projected(s.mean(), s.variance());
        if (v > best) {
            best = v;
            leader = t;
        }
    }
    return leader;
}

TreatmentId SequentialPolicy::select_out_of_sample() const {
    const auto& a = state_.assigned;
    return static_cast<TreatmentId>(std::max_element(a.begin(), a.end()) - a.begin());
}

std::uint64_t SequentialPolicy::assignment_spread() const {
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max(), hi = 0;
    for (TreatmentId t : state_.active) {
        lo = std::min(lo, state_.assigned[t]);
        hi = std::max(hi, state_.assigned[t]);
    }
    return hi - lo;
}

bool SequentialPolicy::is_active(TreatmentId t) const {
    return std::binary_search(state_.active.begin(), state_.active.end(), t);
}

}  // namespace seqtreat
