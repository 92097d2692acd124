#include "seqtreat/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seqtreat/quadrature.hpp"

namespace seqtreat {

// ---------------------------------------------------------------------------
// ArmDistribution

ArmDistribution::ArmDistribution(std::variant<TwoPoint, ScaledBeta, Deterministic> p)
    : params_(std::move(p)) {
    std::visit(
        [this](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TwoPoint>) {
                const double w = v.hi - v.lo;
                moments_ = {v.lo + v.p_hi * w, v.p_hi * (1.0 - v.p_hi) * w * w};
            } else if constexpr (std::is_same_v<T, ScaledBeta>) {
                const double w = v.hi - v.lo, s = v.a + v.b;
                moments_ = {v.lo + w * v.a / s, w * w * v.a * v.b / (s * s * (s + 1.0))};
            } else {
                moments_ = {v.value, 0.0};
            }
        },
        params_);
}

ArmDistribution ArmDistribution::two_point(double lo, double hi, double p_hi) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw InvalidInput("two-point support outside [0,1]");
    if (!(p_hi >= 0.0 && p_hi <= 1.0)) throw InvalidInput("two-point probability outside [0,1]");
    return ArmDistribution(TwoPoint{lo, hi, p_hi});
}

ArmDistribution ArmDistribution::scaled_beta(double a, double b, double lo, double hi) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidInput("beta shape parameters must be positive");
    if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw InvalidInput("beta support outside [0,1]");
    return ArmDistribution(ScaledBeta{a, b, lo, hi});
}

ArmDistribution ArmDistribution::deterministic(double value) {
    if (!(value >= 0.0 && value <= 1.0)) throw InvalidInput("deterministic outcome outside [0,1]");
    return ArmDistribution(Deterministic{value});
}

double ArmDistribution::sample(Rng& rng) const {
    if (const auto* t = std::get_if<TwoPoint>(&params_)) {
        return rng.uniform() < t->p_hi ? t->hi : t->lo;
    }
    if (const auto* b = std::get_if<ScaledBeta>(&params_)) {
        std::gamma_distribution<double> ga(b->a, 1.0), gb(b->b, 1.0);
        const double x = ga(rng.engine()), y = gb(rng.engine());
        const double u = (x + y) > 0.0 ? x / (x + y) : 0.5;
        return std::clamp(b->lo + (b->hi - b->lo) * u, 0.0, 1.0);
    }
    return std::get<Deterministic>(params_).value;
}

std::pair<double, double> ArmDistribution::support() const noexcept {
    if (const auto* t = std::get_if<TwoPoint>(&params_)) return {t->lo, t->hi};
    if (const auto* b = std::get_if<ScaledBeta>(&params_)) return {b->lo, b->hi};
    const double v = std::get<Deterministic>(params_).value;
    return {v, v};
}

namespace {

// Two-point law with the given moments; assumes feasibility was checked.
ArmDistribution::TwoPoint two_point_params(double mu, double sigma2) {
    if (sigma2 <= 0.0) return {mu, mu, 1.0};
    const double s = std::sqrt(sigma2);
    if (mu - s >= 0.0 && mu + s <= 1.0) return {mu - s, mu + s, 0.5};
    if (mu < 0.5) {
        const double hi = std::min(1.0, (sigma2 + mu * mu) / mu);
        return {0.0, hi, mu / hi};
    }
    const double q = 1.0 - mu;
    const double lo = std::max(0.0, 1.0 - (sigma2 + q * q) / q);
    return {lo, 1.0, (mu - lo) / (1.0 - lo)};
}

void require_two_point_feasible(double mu, double sigma2) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidInput("mean outside [0,1]");
    if (!(sigma2 >= 0.0)) throw InvalidInput("variance must be nonnegative");
    if (sigma2 > mu * (1.0 - mu) + 1e-15) {
        throw InvalidInput("variance exceeds mu(1-mu): no [0,1] distribution has these moments");
    }
}

ArmDistribution::TwoPoint delay_aware_params(double mu, double a_bar) {
    const double w = mu > 0.5 ? a_bar / (2.0 * mu) : a_bar;
    const double lo = std::max(0.0, mu - 0.5 * w);
    const double hi = std::min(1.0, mu + 0.5 * w);
    if (hi - lo <= 0.0) return {mu, mu, 1.0};
    return {lo, hi, (mu - lo) / (hi - lo)};
}

}  // namespace

ArmDistribution make_two_point(double mu, double sigma2) {
    require_two_point_feasible(mu, sigma2);
    const auto p = two_point_params(mu, std::min(sigma2, mu * (1.0 - mu)));
    return ArmDistribution::two_point(p.lo, p.hi, p.p_hi);
}

ArmDistribution make_delay_aware(double mu, double a_bar) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidInput("mean outside [0,1]");
    if (!(a_bar > 0.0 && a_bar <= 2.0)) throw InvalidInput("a_bar must lie in (0,2]");
    const auto p = delay_aware_params(mu, a_bar);
    return ArmDistribution::two_point(p.lo, p.hi, p.p_hi);
}

// ---------------------------------------------------------------------------
// FieldFunction

FieldFunction::FieldFunction(std::variant<Affine, ClippedSine> p, std::size_t d)
    : params_(std::move(p)), dimension_(d) {}

FieldFunction FieldFunction::affine(double intercept, std::vector<double> slopes) {
    if (slopes.empty()) throw InvalidInput("affine field needs at least one slope");
    const std::size_t d = slopes.size();
    return FieldFunction(Affine{intercept, std::move(slopes)}, d);
}

FieldFunction FieldFunction::constant(double value, std::size_t d) {
    return affine(value, std::vector<double>(d, 0.0));
}

FieldFunction FieldFunction::clipped_sine(double base, double amplitude, double frequency,
                                          std::vector<double> direction, double phase, double lo,
                                          double hi) {
    if (direction.empty()) throw InvalidInput("sine field needs a direction");
    double norm = 0.0;
    for (double v : direction) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw InvalidInput("sine field direction must be nonzero");
    for (double& v : direction) v /= norm;
    if (!(lo <= hi)) throw InvalidInput("sine field clip bounds reversed");
    const std::size_t d = direction.size();
    return FieldFunction(ClippedSine{base, amplitude, frequency, phase, lo, hi, std::move(direction)},
                         d);
}

double FieldFunction::operator()(std::span<const double> x) const {
    if (const auto* a = std::get_if<Affine>(&params_)) {
        double v = a->intercept;
        for (std::size_t l = 0; l < x.size(); ++l) v += a->slopes[l] * x[l];
        return v;
    }
    const auto& s = std::get<ClippedSine>(params_);
    double t = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) t += s.direction[l] * x[l];
    return std::clamp(s.base + s.amplitude * std::sin(s.frequency * t + s.phase), s.lo, s.hi);
}

double FieldFunction::lipschitz() const noexcept {
    if (const auto* a = std::get_if<Affine>(&params_)) {
        double n = 0.0;
        for (double b : a->slopes) n += b * b;
        return std::sqrt(n);
    }
    const auto& s = std::get<ClippedSine>(params_);
    return std::abs(s.amplitude * s.frequency);
}

std::pair<double, double> FieldFunction::range() const noexcept {
    if (const auto* a = std::get_if<Affine>(&params_)) {
        double lo = a->intercept, hi = a->intercept;
        for (double b : a->slopes) {
            lo += std::min(0.0, b);
            hi += std::max(0.0, b);
        }
        return {lo, hi};
    }
    const auto& s = std::get<ClippedSine>(params_);
    const double amp = std::abs(s.amplitude);
    return {std::clamp(s.base - amp, s.lo, s.hi), std::clamp(s.base + amp, s.lo, s.hi)};
}

// ---------------------------------------------------------------------------
// Processes

BatchProcess BatchProcess::fixed(std::size_t m) {
    if (m == 0) throw InvalidInput("batch size must be positive");
    return {Kind::fixed, m};
}

BatchProcess BatchProcess::uniform_random(std::size_t m_bar) {
    if (m_bar == 0) throw InvalidInput("maximum batch size must be positive");
    return {Kind::uniform_random, m_bar};
}

std::size_t BatchProcess::draw(Rng& rng) const {
    if (kind == Kind::fixed) return m;
    return static_cast<std::size_t>(rng.uniform_int(1, m));
}

HorizonSampler HorizonSampler::fixed(std::uint64_t n) {
    if (n == 0) throw InvalidInput("horizon must be positive");
    return {Kind::fixed, n};
}

HorizonSampler HorizonSampler::poisson(std::uint64_t n) {
    if (n == 0) throw InvalidInput("horizon must be positive");
    return {Kind::poisson, n};
}

std::uint64_t HorizonSampler::draw(Rng& rng) const {
    if (kind == Kind::fixed) return n;
    std::poisson_distribution<std::uint64_t> pd(static_cast<double>(n));
    return pd(rng.engine());
}

double ABarFamily::operator()(std::size_t D) const {
    const double dd = static_cast<double>(D);
    double v = a0;
    switch (kind) {
        case Kind::constant: break;
        case Kind::geometric: v = a0 * std::pow(rho, dd); break;
        case Kind::harmonic: v = a0 / (1.0 + dd); break;
    }
    if (cap) v = std::min(v, *cap);
    return v;
}

void DelayChannel::enqueue(std::uint64_t generated_batch, std::size_t bin, TreatmentId arm,
                           double y) {
    buffer_.push_back({due_batch(generated_batch), bin, arm, y});
}

void DelayChannel::deliver_due(std::uint64_t batch_index, std::vector<DelayedOutcome>& out) {
    // Due batches are nondecreasing in generation order.
    while (!buffer_.empty() && buffer_.front().due_batch <= batch_index) {
        if (buffer_.front().due_batch == batch_index) out.push_back(buffer_.front());
        buffer_.pop_front();
    }
}

std::vector<DelayedOutcome> DelayChannel::deliver_due(std::uint64_t batch_index) {
    std::vector<DelayedOutcome> out;
    deliver_due(batch_index, out);
    return out;
}

// ---------------------------------------------------------------------------
// Environment

Environment Environment::from_arms(std::vector<ArmDistribution> arms) {
    if (arms.empty()) throw InvalidInput("environment needs at least one arm");
    Environment env;
    env.arms_ = std::move(arms);
    return env;
}

Environment Environment::from_fields(std::size_t d, std::vector<int> levels,
                                     std::vector<double> level_probs,
                                     std::vector<std::vector<ArmField>> fields, double holder_beta,
                                     double holder_L, std::uint64_t check_seed) {
    if (d == 0) throw InvalidInput("covariate dimension must be positive");
    if (!(holder_beta > 0.0 && holder_beta <= 1.0)) throw InvalidInput("beta must lie in (0,1]");
    if (!(holder_L > 0.0)) throw InvalidInput("L must be positive");
    std::size_t count = 1;
    for (int l : levels) {
        if (l < 1) throw InvalidInput("each discrete coordinate needs at least one level");
        count *= static_cast<std::size_t>(l);
    }
    if (fields.size() != count) {
        throw InvalidInput("need one row of arm fields per discrete level tuple");
    }
    if (level_probs.empty() && count == 1) level_probs = {1.0};
    if (level_probs.size() != count) throw InvalidInput("need one probability per level tuple");
    double total = 0.0;
    for (double p : level_probs) {
        if (!(p > 0.0)) throw InvalidInput("level probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("level probabilities must sum to 1");

    const std::size_t arms = fields.front().size();
    if (arms == 0) throw InvalidInput("environment needs at least one arm");
    const double diameter_factor = std::pow(std::sqrt(static_cast<double>(d)), 1.0 - holder_beta);
    Rng rng(check_seed);
    std::vector<double> x(d), y(d);

    auto check_field = [&](const FieldFunction& f, double top, const std::string& what) {
        if (f.dimension() != d) throw InvalidInput(what + " has the wrong dimension");
        const auto [lo, hi] = f.range();
        if (lo < 0.0 || hi > top) throw InvalidInput(what + " leaves its admissible range");
        if (f.lipschitz() * diameter_factor > holder_L * (1.0 + 1e-12)) {
            throw InvalidInput(what + " is not certified (beta, L)-Hoelder");
        }
        for (int k = 0; k < 1000; ++k) {
            for (std::size_t l = 0; l < d; ++l) {
                x[l] = rng.uniform();
                y[l] = rng.uniform();
            }
            double dist = 0.0;
            for (std::size_t l = 0; l < d; ++l) dist += (x[l] - y[l]) * (x[l] - y[l]);
            dist = std::sqrt(dist);
            if (std::abs(f(x) - f(y)) > holder_L * std::pow(dist, holder_beta) * (1.0 + 1e-9) + 1e-15) {
                throw InvalidInput(what + " fails the Hoelder pair check");
            }
        }
    };

    for (std::size_t a = 0; a < count; ++a) {
        if (fields[a].size() != arms) throw InvalidInput("every level needs the same arms");
        for (std::size_t i = 0; i < arms; ++i) {
            const std::string tag = "field (level " + std::to_string(a) + ", arm " + std::to_string(i) + ")";
            const auto& f = fields[a][i];
            check_field(f.mean, 1.0, tag + " mean");
            check_field(f.variance, kMaxVariance, tag + " variance");
            auto feasible = [&](std::span<const double> p) {
                const double m = f.mean(p);
                if (f.variance(p) > m * (1.0 - m) + 1e-15) {
                    throw InvalidInput(tag + " has variance above mu(1-mu)");
                }
            };
            // sigma2 - mu(1-mu) is convex for affine pairs: vertices suffice.
            if (f.mean.is_affine() && f.variance.is_affine() && d <= 16) {
                for (std::size_t v = 0; v < (std::size_t{1} << d); ++v) {
                    for (std::size_t l = 0; l < d; ++l) x[l] = (v >> l) & 1U ? 1.0 : 0.0;
                    feasible(x);
                }
            }
            for (int k = 0; k < 1000; ++k) {
                for (auto& v : x) v = rng.uniform();
                feasible(x);
            }
        }
    }

    Environment env;
    env.dimension_ = d;
    env.levels_ = std::move(levels);
    env.level_probs_ = std::move(level_probs);
    env.level_cdf_.resize(env.level_probs_.size());
    std::partial_sum(env.level_probs_.begin(), env.level_probs_.end(), env.level_cdf_.begin());
    env.level_cdf_.back() = 1.0;
    env.fields_ = std::move(fields);
    env.holder_beta_ = holder_beta;
    env.holder_L_ = holder_L;
    return env;
}

Environment Environment::with_delay_aware_outcomes(double a_bar) const {
    if (!(a_bar > 0.0 && a_bar <= 2.0)) throw InvalidInput("a_bar must lie in (0,2]");
    Environment env = *this;
    env.model_ = OutcomeModel::delay_aware;
    env.a_bar_ = a_bar;
    for (auto& arm : env.arms_) arm = make_delay_aware(arm.moments().mu, a_bar);
    return env;
}

std::size_t Environment::num_arms() const noexcept {
    return fields_.empty() ? arms_.size() : fields_.front().size();
}

const ArmField& Environment::field(std::size_t level, TreatmentId arm) const {
    return fields_.at(level).at(arm);
}

std::size_t Environment::level_index(const Covariate& c) const {
    if (levels_.empty()) {
        if (!c.levels.empty()) throw InvalidInput("environment has no discrete covariates");
        return 0;
    }
    if (c.levels.size() != levels_.size()) throw InvalidInput("wrong number of discrete covariates");
    std::size_t index = 0, stride = 1;
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        if (c.levels[l] < 0 || c.levels[l] >= levels_[l]) throw InvalidInput("discrete level out of range");
        index += static_cast<std::size_t>(c.levels[l]) * stride;
        stride *= static_cast<std::size_t>(levels_[l]);
    }
    return index;
}

std::size_t Environment::checked_level(const Covariate& c) const {
    if (fields_.empty()) throw InvalidInput("environment has no covariates");
    if (c.x.size() != dimension_) throw InvalidInput("covariate has the wrong dimension");
    return level_index(c);
}

Moments Environment::moments(TreatmentId arm) const {
    if (!fields_.empty()) throw InvalidInput("covariate environment needs a covariate");
    return arms_.at(arm).moments();
}

Moments Environment::moments(TreatmentId arm, const Covariate& c) const {
    const auto& f = fields_[checked_level(c)].at(arm);
    const double mu = f.mean(c.x);
    if (model_ == OutcomeModel::delay_aware) {
        const auto p = delay_aware_params(mu, a_bar_);
        return {mu, (mu - p.lo) * (p.hi - mu)};
    }
    return {mu, f.variance(c.x)};
}

double Environment::oracle_welfare(const WelfareSpec& w, TreatmentId arm) const {
    const auto m = moments(arm);
    return w.evaluate(m.mu, m.sigma2);
}

double Environment::oracle_welfare(const WelfareSpec& w, TreatmentId arm, const Covariate& c) const {
    const auto m = moments(arm, c);
    return w.evaluate(m.mu, m.sigma2);
}

Moments Environment::bin_moments(const Partition& partition, std::size_t bin, TreatmentId arm) const {
    if (fields_.empty()) throw InvalidInput("bin moments need a covariate environment");
    if (partition.dimension() != dimension_) throw InvalidInput("partition dimension mismatch");
    if (partition.num_levels() != num_levels() || partition.levels() != levels_) {
        throw InvalidInput("partition and environment disagree on discrete levels");
    }
    const auto& region = partition.region(bin);
    const auto& f = fields_.at(region.level).at(arm);

    double volume = 0.0, first = 0.0, second = 0.0;
    const auto* ma = f.mean.as_affine();
    const auto* va = f.variance.as_affine();
    if (model_ == OutcomeModel::native && ma && va) {
        std::vector<double> center(dimension_);
        for (const auto& box : region.boxes) {
            const double vol = box.volume();
            double spread = 0.0;
            for (std::size_t l = 0; l < dimension_; ++l) {
                center[l] = 0.5 * (box.lo[l] + box.hi[l]);
                const double w = box.hi[l] - box.lo[l];
                spread += ma->slopes[l] * ma->slopes[l] * w * w / 12.0;
            }
            const double m = f.mean(center);
            volume += vol;
            first += vol * m;
            second += vol * (f.variance(center) + m * m + spread);
        }
    } else {
        const bool delay_aware = model_ == OutcomeModel::delay_aware;
        const double a = a_bar_;
        PairIntegrand g = [&](std::span<const double> x) -> std::array<double, 2> {
            const double m = f.mean(x);
            double v;
            if (delay_aware) {
                const auto p = delay_aware_params(m, a);
                v = (m - p.lo) * (p.hi - m);
            } else {
                v = f.variance(x);
            }
            return {m, v + m * m};
        };
        for (const auto& box : region.boxes) {
            const auto r = integrate_box(g, box);
            volume += box.volume();
            first += r[0];
            second += r[1];
        }
    }
    const double mu = std::clamp(first / volume, 0.0, 1.0);
    const double var = std::clamp(second / volume - mu * mu, 0.0, kMaxVariance);
    return {mu, var};
}

double Environment::oracle_welfare_bin(const WelfareSpec& w, const Partition& partition,
                                       std::size_t bin, TreatmentId arm) const {
    const auto m = bin_moments(partition, bin, arm);
    return w.evaluate(m.mu, m.sigma2);
}

double Environment::sample_outcome(TreatmentId arm, const Covariate* c, Rng& rng) const {
    if (fields_.empty()) return arms_.at(arm).sample(rng);
    if (c == nullptr) throw InvalidInput("covariate environment needs a covariate");
    const auto& f = fields_[checked_level(*c)].at(arm);
    const double mu = f.mean(c->x);
    ArmDistribution::TwoPoint p;
    if (model_ == OutcomeModel::delay_aware) {
        p = delay_aware_params(mu, a_bar_);
    } else {
        const double var = f.variance(c->x);
        require_two_point_feasible(mu, var);
        p = two_point_params(mu, std::min(var, mu * (1.0 - mu)));
    }
    return rng.uniform() < p.p_hi ? p.hi : p.lo;
}

void Environment::sample_covariate(Rng& covariate_rng, Rng& level_rng, Covariate& out) const {
    out.x.resize(dimension_);
    for (auto& v : out.x) v = covariate_rng.uniform();
    out.levels.resize(levels_.size());
    if (levels_.empty()) return;
    std::size_t a = 0;
    if (level_cdf_.size() > 1) {
        const double u = level_rng.uniform();
        a = static_cast<std::size_t>(std::upper_bound(level_cdf_.begin(), level_cdf_.end(), u) -
                                     level_cdf_.begin());
        a = std::min(a, level_cdf_.size() - 1);
    }
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        out.levels[l] = static_cast<int>(a % static_cast<std::size_t>(levels_[l]));
        a /= static_cast<std::size_t>(levels_[l]);
    }
}

BinOracle::BinOracle(const Environment& env, const Partition& partition, const WelfareSpec& welfare)
    : arms_(env.num_arms()) {
    const std::size_t F = partition.size();
    moments_.resize(F * arms_);
    table_.resize(F * arms_);
    best_.resize(F);
    for (std::size_t j = 0; j < F; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < arms_; ++i) {
            const auto m = env.bin_moments(partition, j, static_cast<TreatmentId>(i));
            moments_[j * arms_ + i] = m;
            const double v = welfare.evaluate(m.mu, m.sigma2);
            table_[j * arms_ + i] = v;
            best = std::max(best, v);
        }
        best_[j] = best;
    }
}

}  // namespace seqtreat
