#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqtreat/environment.hpp"
#include "seqtreat/partition.hpp"
#include "seqtreat/policy.hpp"
#include "seqtreat/welfare.hpp"

namespace seqtreat {

/// Every problem found in a config, one per entry of `problems()`.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct WelfareConfig {
    WelfareKind kind = WelfareKind::mean;
    double alpha = 0.0;
    double floor_c = 0.0;

    WelfareSpec build() const;
};

struct ArmSpec {
    ArmDistribution::Kind kind = ArmDistribution::Kind::two_point;
    double mu = 0.5;
    std::optional<double> sigma2;  // two_point; defaults to mu (1 - mu)
    double gap_multiple = 0.0;     // two_point mean becomes mu - gap_multiple * gap
    double a = 1.0, b = 1.0, lo = 0.0, hi = 1.0;  // scaled_beta
    double value = 0.0;                            // deterministic
};

/// gap = coef * n^n_power
struct GapSpec {
    double coef = 0.0;
    double n_power = 0.0;
    double at(double n) const;
};

struct FieldSpec {
    enum class Kind { affine, clipped_sine };
    Kind kind = Kind::affine;
    double intercept = 0.0;
    std::vector<double> slopes;
    double base = 0.0, amplitude = 0.0, frequency = 0.0, phase = 0.0, lo = 0.0, hi = 1.0;
    std::vector<double> direction;

    FieldFunction build(std::size_t d) const;
};

struct CovariateSpec {
    std::size_t dimension = 1;
    std::vector<int> levels;
    std::vector<double> level_probs;
    double holder_beta = 1.0;
    double holder_L = 1.0;
    std::vector<std::vector<std::pair<FieldSpec, FieldSpec>>> fields;  // [level][arm] (mean, variance)
};

struct PartitionSpec {
    enum class Kind { none, square, exogenous, discrete_product };
    Kind kind = Kind::none;
    std::optional<std::size_t> P;  // square; nullopt chooses P from n
    std::vector<ExogenousGroup> groups;
    std::vector<PartitionSpec> per_level;
    std::optional<std::vector<std::vector<double>>> masses;  // nullopt: level prob x measure
};

struct DelaySpec {
    std::size_t D = 0;
    ABarFamily a_bar;
    bool delay_aware_outcomes = false;
};

struct SweepAxes {
    std::vector<std::uint64_t> n;
    std::vector<std::size_t> D;
    std::vector<std::size_t> P;
    std::vector<double> gap;

    bool empty() const noexcept { return n.empty() && D.empty() && P.empty() && gap.empty(); }
};

struct BoundsSpec {
    std::string kind = "nocov";
    double C = 1.0;
    std::vector<double> gaps;
    std::optional<double> K;
    double lipschitz = 1.0;
    double m_bar = 1.0;
    double beta = 1.0;
    double d = 2.0;
    double margin_alpha = 1.0;
    std::size_t arm = 0;  // subopt: index into gaps
    std::vector<double> n{1000.0};
    std::vector<std::size_t> D{0};
    ABarFamily a_bar;
    std::optional<std::size_t> P;  // bins kinds: square grid, chosen from n when absent
};

struct ExperimentConfig {
    WelfareConfig welfare;
    std::vector<ArmSpec> arms;
    std::optional<GapSpec> gap;
    std::optional<CovariateSpec> covariates;
    BatchProcess batch = BatchProcess::fixed(1);
    HorizonSampler horizon = HorizonSampler::fixed(1000);
    DelaySpec delay;
    Profile profile = Profile::standard;
    std::optional<double> gamma;
    std::optional<double> t_param;
    std::optional<double> threshold_scale;
    PartitionSpec partition;
    std::size_t replications = 1;
    std::uint64_t master_seed = 0;
    std::string output = "seqtreat";
    double tol = 1e-12;
    SweepAxes sweep;
    std::optional<BoundsSpec> bounds;
};

/// Parses a JSON document. Unknown keys, wrong types and out-of-range values
/// are all collected before throwing ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace seqtreat
