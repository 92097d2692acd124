#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqtreat {

/// Thrown when an input lies outside an operation's documented domain.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Largest variance of a [0,1]-valued outcome.
inline constexpr double kMaxVariance = 0.25;

enum class WelfareKind { mean, sharpe, neg_coeff_variation, mean_variance, neg_variance, custom };

std::string_view to_string(WelfareKind kind);
WelfareKind welfare_kind_from_string(std::string_view name);

/// Why a (mu, sigma2) pair was rejected.
struct DomainViolation {
    std::string reason;
};

/// A welfare function f(mu, sigma2) of a treatment's mean and variance together
/// with a Lipschitz constant w.r.t. the l1 norm on its validated domain.
///
/// Immutable after construction. The ratio kinds need an explicit floor c on the
/// moments they divide by; the custom kind needs a caller-certified Lipschitz
/// constant, which is spot-checked on construction.
class WelfareSpec {
public:
    using Function = std::function<double(double mu, double sigma2)>;

    static WelfareSpec mean();
    static WelfareSpec sharpe(double floor_c);
    static WelfareSpec neg_coeff_variation(double floor_c);
    static WelfareSpec mean_variance(double alpha);
    static WelfareSpec neg_variance();
    /// Rejects with InvalidInput if any of `checks` random pairs violates the
    /// claimed constant.
    static WelfareSpec custom(Function f, double lipschitz, int checks = 10000,
                              std::uint64_t seed = 0x5eed);

    WelfareKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    double floor_c() const noexcept { return floor_c_; }

    double lipschitz_constant() const noexcept { return lipschitz_; }

    std::optional<DomainViolation> validate_domain(double mu, double sigma2) const;

    /// Throws InvalidInput on a domain violation.
    double evaluate(double mu, double sigma2) const;

    /// Evaluates at the nearest point of the validated domain. Used on
    /// plug-in estimates, which may fall below a ratio kind's floor.
    double evaluate_projected(double mu, double sigma2) const;

private:
    WelfareSpec(WelfareKind kind, double alpha, double floor_c, double lipschitz, Function f);

    double raw(double mu, double sigma2) const;

    WelfareKind kind_;
    double alpha_ = 0.0;
    double floor_c_ = 0.0;
    double lipschitz_ = 1.0;
    Function custom_;
};

double evaluate(const WelfareSpec& spec, double mu, double sigma2);
double lipschitz_constant(const WelfareSpec& spec);
std::optional<DomainViolation> validate_domain(const WelfareSpec& spec, double mu, double sigma2);

}  // namespace seqtreat
