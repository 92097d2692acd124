#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "seqtreat/welfare.hpp"

namespace seqtreat {

/// Treatments are numbered 0..K.
using TreatmentId = std::uint32_t;

/// Running sufficient statistics of the observed outcomes of one treatment.
struct TreatmentStats {
    std::uint64_t count = 0;
    double sum_y = 0.0;
    double sum_y2 = 0.0;

    double mean() const noexcept { return count ? sum_y / static_cast<double>(count) : 0.0; }
    double second_moment() const noexcept {
        return count ? sum_y2 / static_cast<double>(count) : 0.0;
    }
    /// 1/N plug-in variance, clamped at 0 against cancellation.
    double variance() const noexcept {
        const double m = mean();
        const double v = second_moment() - m * m;
        return v > 0.0 ? v : 0.0;
    }
};

enum class Profile { standard, delayed };

struct PolicyConfig {
    std::size_t num_treatments = 2;  // K + 1
    double gamma = 1.0;
    double t_param = 1.0;  // kept real so per-bin T = n * B_j needs no rounding
    Profile profile = Profile::standard;
    double a_bar = 1.0;  // delayed profile only
    std::size_t delay_batches = 0;
    /// Replaces the leading 32 (standard) or 16 (delayed) when set.
    std::optional<double> threshold_scale_override;

    void validate() const;
};

/// max(ln x, 1). Throws InvalidInput for x <= 0.
double logbar(double x);

/// Elimination threshold after s observed outcomes per remaining treatment:
///   standard: 32 * gamma * sqrt((2/s) * logbar(T/s))
///   delayed:  16 * gamma * sqrt((2 a^2/s) * logbar(T/s))
double threshold(std::uint64_t s, const PolicyConfig& cfg);

struct PolicyState {
    std::vector<TreatmentId> active;        // ascending
    std::vector<TreatmentStats> stats;      // indexed by treatment id
    std::vector<std::uint64_t> assigned;    // B_i(b); includes unobserved assignments
    std::uint64_t batch_index = 0;          // batches assigned so far
    bool observed_since_check = false;
};

/// Successive-elimination policy over K+1 treatments with batched feedback.
///
/// Each batch hands out assignments so that the least-assigned remaining
/// treatment goes first (ties to the lowest id), which keeps remaining
/// treatments within one assignment of each other. At batch end, every
/// remaining treatment whose plug-in welfare trails the leader by at least
/// threshold(min observed count) is dropped for good.
///
/// Single writer; not thread safe.
class SequentialPolicy {
public:
    explicit SequentialPolicy(PolicyConfig cfg);

    const PolicyConfig& config() const noexcept { return cfg_; }
    const PolicyState& state() const noexcept { return state_; }

    /// Appends m assignments to `out`. Throws InvalidInput for m == 0.
    void assign_batch(std::size_t m, std::vector<TreatmentId>& out);
    std::vector<TreatmentId> assign_batch(std::size_t m);

    /// Records one outcome y in [0,1] for a previously assigned treatment.
    void observe(TreatmentId treatment, double y);

    /// Batch-end elimination. Returns the removed ids (ascending); no-op while
    /// any remaining treatment has no observed outcome.
    std::vector<TreatmentId> eliminate(const WelfareSpec& welfare);

    /// Remaining treatment with the highest plug-in welfare (lowest id on ties);
    /// nullopt while some remaining treatment is unobserved.
    std::optional<TreatmentId> empirical_leader(const WelfareSpec& welfare) const;

    /// Most-assigned treatment over all K+1 (lowest id on ties).
    TreatmentId select_out_of_sample() const;

    /// max - min of assignment counts among remaining treatments.
    std::uint64_t assignment_spread() const;

    /// min observed count among remaining treatments.
    std::uint64_t min_observed() const;

    bool is_active(TreatmentId t) const;

private:
    PolicyConfig cfg_;
    PolicyState state_;
};

}  // namespace seqtreat
