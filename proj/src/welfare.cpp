#include "seqtreat/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqtreat/rng.hpp"

namespace seqtreat {

std::string_view to_string(WelfareKind kind) {
    switch (kind) {
        case WelfareKind::mean: return "mean";
        case WelfareKind::sharpe: return "sharpe";
        case WelfareKind::neg_coeff_variation: return "neg_coeff_variation";
        case WelfareKind::mean_variance: return "mean_variance";
        case WelfareKind::neg_variance: return "neg_variance";
        case WelfareKind::custom: return "custom";
    }
    return "unknown";
}

WelfareKind welfare_kind_from_string(std::string_view name) {
    for (auto kind : {WelfareKind::mean, WelfareKind::sharpe, WelfareKind::neg_coeff_variation,
                      WelfareKind::mean_variance, WelfareKind::neg_variance, WelfareKind::custom}) {
        if (to_string(kind) == name) return kind;
    }
    throw InvalidInput("unknown welfare kind '" + std::string(name) + "'");
}

namespace {

void require_floor(double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw InvalidInput("floor_c must lie in (0,1)");
    }
}

}  // namespace

WelfareSpec::WelfareSpec(WelfareKind kind, double alpha, double floor_c, double lipschitz,
                         Function f)
    : kind_(kind), alpha_(alpha), floor_c_(floor_c), lipschitz_(lipschitz), custom_(std::move(f)) {}

WelfareSpec WelfareSpec::mean() { return {WelfareKind::mean, 0.0, 0.0, 1.0, {}}; }

WelfareSpec WelfareSpec::sharpe(double c) {
    require_floor(c);
    const double k = std::max(1.0 / std::sqrt(c), 1.0 / (2.0 * std::pow(c, 1.5)));
    return {WelfareKind::sharpe, 0.0, c, k, {}};
}

WelfareSpec WelfareSpec::neg_coeff_variation(double c) {
    require_floor(c);
    const double k = std::max(1.0 / (c * c), 1.0 / (2.0 * std::pow(c, 1.5)));
    return {WelfareKind::neg_coeff_variation, 0.0, c, k, {}};
}

WelfareSpec WelfareSpec::mean_variance(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw InvalidInput("risk aversion alpha must be a finite nonnegative number");
    }
    return {WelfareKind::mean_variance, alpha, 0.0, std::max(1.0, alpha / 2.0), {}};
}

WelfareSpec WelfareSpec::neg_variance() { return {WelfareKind::neg_variance, 0.0, 0.0, 1.0, {}}; }

WelfareSpec WelfareSpec::custom(Function f, double lipschitz, int checks, std::uint64_t seed) {
    if (!f) throw InvalidInput("custom welfare needs a function");
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        throw InvalidInput("custom welfare needs a positive finite Lipschitz constant");
    }
    Rng rng(seed);
    for (int i = 0; i < checks; ++i) {
        const double u1 = rng.uniform(), u2 = kMaxVariance * rng.uniform();
        const double v1 = rng.uniform(), v2 = kMaxVariance * rng.uniform();
        const double lhs = std::abs(f(u1, u2) - f(v1, v2));
        const double rhs = lipschitz * (std::abs(u1 - v1) + std::abs(u2 - v2));
        if (!(lhs <= rhs * (1.0 + 1e-12) + 1e-15)) {
            std::ostringstream msg;
            msg << "custom welfare violates its Lipschitz constant " << lipschitz << " at (" << u1
                << "," << u2 << ") vs (" << v1 << "," << v2 << ")";
            throw InvalidInput(msg.str());
        }
    }
    return {WelfareKind::custom, 0.0, 0.0, lipschitz, std::move(f)};
}

std::optional<DomainViolation> WelfareSpec::validate_domain(double mu, double sigma2) const {
    if (!(mu >= 0.0 && mu <= 1.0)) return DomainViolation{"mu outside [0,1]"};
    if (!(sigma2 >= 0.0 && sigma2 <= kMaxVariance)) {
        return DomainViolation{"sigma2 outside [0,0.25]"};
    }
    switch (kind_) {
        case WelfareKind::sharpe:
            if (sigma2 < floor_c_) return DomainViolation{"sigma2 below floor_c"};
            break;
        case WelfareKind::neg_coeff_variation:
            if (mu < floor_c_) return DomainViolation{"mu below floor_c"};
            if (sigma2 < floor_c_) return DomainViolation{"sigma2 below floor_c"};
            break;
        default: break;
    }
    return std::nullopt;
}

double WelfareSpec::raw(double mu, double sigma2) const {
    switch (kind_) {
        case WelfareKind::mean: return mu;
        case WelfareKind::sharpe: return mu / std::sqrt(sigma2);
        case WelfareKind::neg_coeff_variation: return -std::sqrt(sigma2) / mu;
        case WelfareKind::mean_variance: return mu - 0.5 * alpha_ * sigma2;
        case WelfareKind::neg_variance: return -sigma2;
        case WelfareKind::custom: return custom_(mu, sigma2);
    }
    return 0.0;
}

double WelfareSpec::evaluate(double mu, double sigma2) const {
    if (auto violation = validate_domain(mu, sigma2)) {
        std::ostringstream msg;
        msg << to_string(kind_) << " welfare rejected (mu=" << mu << ", sigma2=" << sigma2
            << "): " << violation->reason;
        throw InvalidInput(msg.str());
    }
    return raw(mu, sigma2);
}

double WelfareSpec::evaluate_projected(double mu, double sigma2) const {
    double mu_lo = 0.0, s_lo = 0.0;
    if (kind_ == WelfareKind::sharpe) s_lo = floor_c_;
    if (kind_ == WelfareKind::neg_coeff_variation) mu_lo = s_lo = floor_c_;
    // A floor above 0.25 leaves an empty variance range; the clamp then pins to the floor.
    mu = std::clamp(mu, mu_lo, 1.0);
    sigma2 = std::max(std::min(sigma2, kMaxVariance), s_lo);
    return raw(mu, sigma2);
}

double evaluate(const WelfareSpec& spec, double mu, double sigma2) {
    return spec.evaluate(mu, sigma2);
}

double lipschitz_constant(const WelfareSpec& spec) { return spec.lipschitz_constant(); }

std::optional<DomainViolation> validate_domain(const WelfareSpec& spec, double mu, double sigma2) {
    return spec.validate_domain(mu, sigma2);
}

}  // namespace seqtreat
