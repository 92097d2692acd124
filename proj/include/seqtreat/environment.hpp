#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "seqtreat/partition.hpp"
#include "seqtreat/policy.hpp"
#include "seqtreat/rng.hpp"
#include "seqtreat/welfare.hpp"

namespace seqtreat {

struct Moments {
    double mu = 0.0;
    double sigma2 = 0.0;
    double second() const noexcept { return sigma2 + mu * mu; }
};

// ---------------------------------------------------------------------------
// Arm distributions on [0,1] with exactly known moments.

class ArmDistribution {
public:
    enum class Kind { two_point, scaled_beta, deterministic };

    struct TwoPoint {
        double lo, hi, p_hi;
    };
    struct ScaledBeta {
        double a, b, lo, hi;
    };
    struct Deterministic {
        double value;
    };

    static ArmDistribution two_point(double lo, double hi, double p_hi);
    static ArmDistribution scaled_beta(double a, double b, double lo, double hi);
    static ArmDistribution deterministic(double value);

    Kind kind() const noexcept { return static_cast<Kind>(params_.index()); }
    const TwoPoint* as_two_point() const noexcept { return std::get_if<TwoPoint>(&params_); }

    Moments moments() const noexcept { return moments_; }
    double sample(Rng& rng) const;
    /// Smallest interval containing the support.
    std::pair<double, double> support() const noexcept;

private:
    explicit ArmDistribution(std::variant<TwoPoint, ScaledBeta, Deterministic> p);

    std::variant<TwoPoint, ScaledBeta, Deterministic> params_;
    Moments moments_;
};

/// Two support points in [0,1] with mean mu and variance sigma2: mu +- sqrt(sigma2)
/// when that fits, otherwise one point pinned at the nearer boundary.
/// Throws InvalidInput when sigma2 > mu (1 - mu).
ArmDistribution make_two_point(double mu, double sigma2);

/// Mean-preserving two-point law around mu whose outcome and squared outcome
/// each vary over an interval of length at most a_bar; points mu +- w/2 with
/// w = a_bar * min(1, 1/(2 mu)), clipped to [0,1].
ArmDistribution make_delay_aware(double mu, double a_bar);

// ---------------------------------------------------------------------------
// Hoelder-smooth conditional moment fields on [0,1]^d.

class FieldFunction {
public:
    struct Affine {
        double intercept;
        std::vector<double> slopes;
    };
    /// clamp(base + amplitude * sin(frequency * <direction, x> + phase), lo, hi),
    /// direction normalized to unit length.
    struct ClippedSine {
        double base, amplitude, frequency, phase, lo, hi;
        std::vector<double> direction;
    };

    static FieldFunction affine(double intercept, std::vector<double> slopes);
    static FieldFunction constant(double value, std::size_t d);
    static FieldFunction clipped_sine(double base, double amplitude, double frequency,
                                      std::vector<double> direction, double phase, double lo,
                                      double hi);

    double operator()(std::span<const double> x) const;
    std::size_t dimension() const noexcept { return dimension_; }
    bool is_affine() const noexcept { return std::holds_alternative<Affine>(params_); }
    const Affine* as_affine() const noexcept { return std::get_if<Affine>(&params_); }
    /// Euclidean Lipschitz constant.
    double lipschitz() const noexcept;
    /// Range of the field over [0,1]^d (exact for affine, clip bounds for sine).
    std::pair<double, double> range() const noexcept;

private:
    FieldFunction(std::variant<Affine, ClippedSine> p, std::size_t d);

    std::variant<Affine, ClippedSine> params_;
    std::size_t dimension_;
};

struct ArmField {
    FieldFunction mean;
    FieldFunction variance;
};

// ---------------------------------------------------------------------------
// Batch, horizon and delay processes.

struct BatchProcess {
    enum class Kind { fixed, uniform_random };
    Kind kind = Kind::fixed;
    std::size_t m = 1;  // batch size (fixed) or maximum m_bar (uniform on 1..m)

    static BatchProcess fixed(std::size_t m);
    static BatchProcess uniform_random(std::size_t m_bar);
    std::size_t max_size() const noexcept { return m; }
    std::size_t draw(Rng& rng) const;
};

struct HorizonSampler {
    enum class Kind { fixed, poisson };
    Kind kind = Kind::fixed;
    std::uint64_t n = 1;

    static HorizonSampler fixed(std::uint64_t n);
    static HorizonSampler poisson(std::uint64_t n);
    std::uint64_t draw(Rng& rng) const;
};

/// Noise support a(D) as a function of the delay in batches.
struct ABarFamily {
    enum class Kind { constant, geometric, harmonic };
    Kind kind = Kind::constant;
    double a0 = 1.0;
    double rho = 0.5;
    std::optional<double> cap;

    double operator()(std::size_t D) const;
};

struct DelayedOutcome {
    std::uint64_t due_batch = 0;
    std::size_t bin = 0;
    TreatmentId arm = 0;
    double y = 0.0;
};

/// FIFO of generated outcomes. An outcome generated in batch j (1-based)
/// becomes available at the end of batch j + max(D,1) - 1.
class DelayChannel {
public:
    explicit DelayChannel(std::size_t D) : delay_(D) {}

    std::size_t delay() const noexcept { return delay_; }
    std::uint64_t due_batch(std::uint64_t generated_batch) const noexcept {
        return generated_batch + (delay_ == 0 ? 0 : delay_ - 1);
    }
    void enqueue(std::uint64_t generated_batch, std::size_t bin, TreatmentId arm, double y);
    /// Removes and returns every record due at `batch_index`.
    std::vector<DelayedOutcome> deliver_due(std::uint64_t batch_index);
    void deliver_due(std::uint64_t batch_index, std::vector<DelayedOutcome>& out);
    std::size_t pending() const noexcept { return buffer_.size(); }

private:
    std::size_t delay_;
    std::deque<DelayedOutcome> buffer_;
};

// ---------------------------------------------------------------------------

/// Ground-truth world. Either context-free arms, or per-arm conditional moment
/// fields over covariates (optionally per discrete level). Exposes exact
/// oracle moments; the policy never sees them.
class Environment {
public:
    enum class OutcomeModel { native, delay_aware };

    static Environment from_arms(std::vector<ArmDistribution> arms);

    /// fields[a][i]: arm i at flattened discrete level a. With no discrete
    /// covariates pass `levels` empty and a single row. The fields are checked
    /// against the Hoelder class H(beta, L) by construction and on random pairs.
    static Environment from_fields(std::size_t d, std::vector<int> levels,
                                   std::vector<double> level_probs,
                                   std::vector<std::vector<ArmField>> fields, double holder_beta,
                                   double holder_L, std::uint64_t check_seed = 0xf1e1d);

    /// Copy whose outcomes follow make_delay_aware(mean, a_bar); variances
    /// (and hence welfare gaps) change with a_bar.
    Environment with_delay_aware_outcomes(double a_bar) const;

    std::size_t num_arms() const noexcept;
    bool has_covariates() const noexcept { return !fields_.empty(); }
    std::size_t dimension() const noexcept { return dimension_; }
    const std::vector<int>& levels() const noexcept { return levels_; }
    std::size_t num_levels() const noexcept { return fields_.empty() ? 0 : fields_.size(); }
    const std::vector<double>& level_probs() const noexcept { return level_probs_; }
    OutcomeModel outcome_model() const noexcept { return model_; }
    double a_bar() const noexcept { return a_bar_; }
    double holder_beta() const noexcept { return holder_beta_; }
    double holder_L() const noexcept { return holder_L_; }
    const std::vector<ArmDistribution>& arms() const noexcept { return arms_; }
    const ArmField& field(std::size_t level, TreatmentId arm) const;

    Moments moments(TreatmentId arm) const;
    Moments moments(TreatmentId arm, const Covariate& c) const;

    double oracle_welfare(const WelfareSpec& w, TreatmentId arm) const;
    double oracle_welfare(const WelfareSpec& w, TreatmentId arm, const Covariate& c) const;

    /// Bin-conditional moments under the covariate law: closed form for affine
    /// fields with native outcomes, adaptive cubature (rel. error 1e-8) otherwise.
    Moments bin_moments(const Partition& partition, std::size_t bin, TreatmentId arm) const;
    double oracle_welfare_bin(const WelfareSpec& w, const Partition& partition, std::size_t bin,
                              TreatmentId arm) const;

    double sample_outcome(TreatmentId arm, const Covariate* c, Rng& rng) const;
    void sample_covariate(Rng& covariate_rng, Rng& level_rng, Covariate& out) const;

    /// Flattened discrete level of a covariate (0 without discrete covariates).
    std::size_t level_index(const Covariate& c) const;

private:
    Environment() = default;
    std::size_t checked_level(const Covariate& c) const;

    std::vector<ArmDistribution> arms_;
    std::size_t dimension_ = 0;
    std::vector<int> levels_;
    std::vector<double> level_probs_;
    std::vector<double> level_cdf_;
    std::vector<std::vector<ArmField>> fields_;
    double holder_beta_ = 1.0;
    double holder_L_ = 1.0;
    OutcomeModel model_ = OutcomeModel::native;
    double a_bar_ = 1.0;
};

/// Per-bin oracle welfare table f_j^(i) for one partition, computed once.
class BinOracle {
public:
    BinOracle(const Environment& env, const Partition& partition, const WelfareSpec& welfare);

    double welfare(std::size_t bin, TreatmentId arm) const { return table_[bin * arms_ + arm]; }
    double best(std::size_t bin) const { return best_[bin]; }
    const Moments& moments(std::size_t bin, TreatmentId arm) const {
        return moments_[bin * arms_ + arm];
    }
    std::size_t num_bins() const noexcept { return best_.size(); }
    std::size_t num_arms() const noexcept { return arms_; }

private:
    std::size_t arms_;
    std::vector<Moments> moments_;
    std::vector<double> table_;
    std::vector<double> best_;
};

}  // namespace seqtreat
