#include "seqtreat/bounds.hpp"

#include <cmath>
#include <limits>

namespace seqtreat {

namespace {

// logbar that remembers whether the floor was hit.
struct FlooredLog {
    bool floored = false;
    double operator()(double x) {
        const double v = logbar(x);
        if (v == 1.0 && std::log(x) < 1.0) floored = true;
        return v;
    }
};

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidInput(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

void BoundInputs::validate() const {
    require_positive(n, "n");
    require_positive(K, "K");
    require_positive(lipschitz, "lipschitz constant");
    require_positive(m_bar, "m_bar");
    require_positive(beta, "beta");
    require_positive(d, "d");
    require_positive(margin_alpha, "margin alpha");
    require_positive(a_bar, "a_bar");
    require_positive(C, "C");
    if (!(D >= 0.0)) throw InvalidInput("D must be nonnegative");
    for (double g : gaps) require_positive(g, "gap");
    for (const auto& b : bins) {
        require_positive(b.measure, "bin measure");
        if (!(b.diameter >= 0.0)) throw InvalidInput("bin diameter must be nonnegative");
    }
}

BoundValue bound_nocov(const BoundInputs& in) {
    in.validate();
    if (in.gaps.empty()) throw InvalidInput("gap-dependent bound needs gaps");
    FlooredLog lb;
    const double k2 = in.lipschitz * in.lipschitz;
    double adaptive = 0.0;
    for (double g : in.gaps) adaptive += lb(in.n * g * g / k2) / g;
    adaptive *= in.m_bar * k2;
    const double uniform = std::sqrt(in.n * k2 * in.lipschitz * in.m_bar * in.K *
                                     lb(in.m_bar * in.K / in.lipschitz));
    return {in.C * std::min(adaptive, uniform), lb.floored};
}

BoundValue bound_subopt(const BoundInputs& in, std::size_t i) {
    in.validate();
    const double g = in.gaps.at(i);
    FlooredLog lb;
    const double k2 = in.lipschitz * in.lipschitz;
    const double v = k2 * in.K * lb(in.n / k2) / (g * g) + in.K * in.m_bar + k2;
    return {in.C * v, lb.floored};
}

BoundValue bound_oos(const BoundInputs& in) {
    in.validate();
    if (in.gaps.empty()) throw InvalidInput("out-of-sample bound needs gaps");
    FlooredLog lb;
    const double k2 = in.lipschitz * in.lipschitz;
    double adaptive = 0.0;
    for (double g : in.gaps) adaptive += (k2 / g) * lb(in.n * g * g / k2) + g * in.m_bar;
    adaptive /= in.n;
    const double uniform = std::sqrt(k2 * lb(in.n / k2) / in.n) + in.K * in.m_bar / in.n;
    return {in.C * in.K * std::min(adaptive, uniform), lb.floored};
}

BoundValue bound_bins(const BoundInputs& in) {
    in.validate();
    if (in.bins.empty()) throw InvalidInput("bin bound needs bin metadata");
    FlooredLog lb;
    const double mk = in.m_bar * in.K;
    const double lead = mk * lb(mk);
    double sum = 0.0;
    for (const auto& b : in.bins) {
        const double nb = in.n * b.measure;
        sum += std::sqrt(lead * nb) + nb * std::pow(b.diameter, in.beta);
    }
    return {in.C * sum, lb.floored};
}

BoundValue bound_sn(const BoundInputs& in) {
    in.validate();
    FlooredLog lb;
    const double mk = in.m_bar * in.K;
    const double a = in.margin_alpha;
    const double e = a * in.beta / ((1.0 + a) * (2.0 * in.beta + in.d));
    return {in.C * in.n * std::pow(mk * lb(mk) / in.n, e), lb.floored};
}

BoundValue bound_delay(const BoundInputs& in) {
    in.validate();
    if (in.gaps.empty()) throw InvalidInput("delay bound needs gaps");
    FlooredLog lb;
    const double k = in.lipschitz, a = in.a_bar;
    const double a2 = a * a;
    double adaptive = 0.0;
    for (double g : in.gaps) adaptive += lb(in.n * g * g / a2) / g;
    adaptive *= k * k * a2;
    const double uniform =
        std::sqrt(k * k * k * a2 * a * in.m_bar * in.K * lb(in.m_bar * in.K / (k * a)) * in.n);
    const double wait = in.m_bar * (in.K + in.D);
    return {in.C * std::min(adaptive + wait, uniform + wait), lb.floored};
}

BoundValue bound_delay_bins(const BoundInputs& in) {
    in.validate();
    if (in.bins.empty()) throw InvalidInput("delay bound with bins needs bin metadata");
    FlooredLog lb;
    const double mk = in.m_bar * in.K;
    const double a = in.a_bar;
    const double lead = mk * a * a * a * lb(mk / a);
    double sum = 0.0;
    for (const auto& b : in.bins) {
        const double nb = in.n * b.measure;
        sum += std::sqrt(lead * nb) + nb * std::pow(b.diameter, in.beta) + mk;
    }
    return {in.C * (sum + in.m_bar * in.D), lb.floored};
}

std::size_t argmin_delay(const BoundInputs& in, const std::vector<std::size_t>& D_grid,
                         const ABarFamily& a_bar, DelayForm form) {
    if (D_grid.empty()) throw InvalidInput("delay grid is empty");
    std::size_t best_D = D_grid.front();
    double best = std::numeric_limits<double>::infinity();
    BoundInputs x = in;
    for (std::size_t D : D_grid) {
        x.D = static_cast<double>(D);
        x.a_bar = a_bar(D);
        const double v = form == DelayForm::nocov ? bound_delay(x).value : bound_delay_bins(x).value;
        if (v < best) {
            best = v;
            best_D = D;
        }
    }
    return best_D;
}

std::vector<BinMeta> square_bin_meta(std::size_t P, std::size_t d) {
    const auto part = Partition::square(P, d);
    std::vector<BinMeta> out;
    out.reserve(part.size());
    for (const auto& b : part.bins()) out.push_back({b.measure, b.diameter});
    return out;
}

}  // namespace seqtreat
