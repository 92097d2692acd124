#include "seqtreat/metrics.hpp"

#include <algorithm>
#include <limits>

namespace seqtreat {

namespace {
constexpr std::size_t kNoBin = std::numeric_limits<std::size_t>::max();
}

AssignmentLog::AssignmentLog(std::size_t dimension, std::size_t discrete)
    : dimension_(dimension), discrete_(discrete) {}

void AssignmentLog::reserve(std::size_t n) {
    batches_.reserve(n);
    bins_.reserve(n);
    arms_.reserve(n);
    outcomes_.reserve(n);
    available_.reserve(n);
    x_.reserve(n * dimension_);
    levels_.reserve(n * discrete_);
}

void AssignmentLog::push(std::uint64_t batch, std::optional<std::size_t> bin, TreatmentId arm,
                         const Covariate* covariate, double outcome, std::uint64_t available_at) {
    if (available_at < batch) throw InvalidInput("outcome available before its batch");
    if (dimension_ > 0) {
        if (covariate == nullptr || covariate->x.size() != dimension_ ||
            covariate->levels.size() != discrete_) {
            throw InvalidInput("log record covariate has the wrong shape");
        }
        x_.insert(x_.end(), covariate->x.begin(), covariate->x.end());
        levels_.insert(levels_.end(), covariate->levels.begin(), covariate->levels.end());
    } else if (covariate != nullptr) {
        throw InvalidInput("covariate given to a log without covariates");
    }
    batches_.push_back(batch);
    bins_.push_back(bin.value_or(kNoBin));
    arms_.push_back(arm);
    outcomes_.push_back(outcome);
    available_.push_back(available_at);
}

std::optional<std::size_t> AssignmentLog::bin(std::size_t i) const {
    if (bins_[i] == kNoBin) return std::nullopt;
    return bins_[i];
}

Covariate AssignmentLog::covariate(std::size_t i) const {
    Covariate c;
    c.x.assign(x_.begin() + static_cast<std::ptrdiff_t>(i * dimension_),
               x_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dimension_));
    c.levels.assign(levels_.begin() + static_cast<std::ptrdiff_t>(i * discrete_),
                    levels_.begin() + static_cast<std::ptrdiff_t>((i + 1) * discrete_));
    return c;
}

AssignmentRecord AssignmentLog::record(std::size_t i) const {
    AssignmentRecord r;
    r.index = i;
    r.batch = batches_[i];
    r.bin = bin(i);
    r.arm = arms_[i];
    if (has_covariates()) r.covariate = covariate(i);
    r.outcome = outcomes_[i];
    r.available_at = available_[i];
    return r;
}

// ---------------------------------------------------------------------------

std::vector<double> welfare_gaps(const Environment& env, const WelfareSpec& welfare) {
    std::vector<double> f(env.num_arms());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = env.oracle_welfare(welfare, static_cast<TreatmentId>(i));
    }
    const double best = *std::max_element(f.begin(), f.end());
    for (double& v : f) v = best - v;
    return f;
}

MetricsAccumulator::MetricsAccumulator(const Environment& env, const WelfareSpec& welfare,
                                       const BinOracle* bins, double tol)
    : env_(env), welfare_(welfare), bins_(bins), tol_(tol) {
    if (!(tol >= 0.0)) throw InvalidInput("tolerance must be nonnegative");
    counts_.assign(env.num_arms(), 0);
    scratch_.resize(env.num_arms());
    if (!env.has_covariates()) fixed_gaps_ = welfare_gaps(env, welfare);
    if (bins_) {
        if (bins_->num_arms() != env.num_arms()) throw InvalidInput("bin oracle arm count mismatch");
        bin_counts_.assign(bins_->num_bins() * env.num_arms(), 0);
    }
}

void MetricsAccumulator::add(TreatmentId arm, const Covariate* c, std::optional<std::size_t> bin) {
    if (arm >= counts_.size()) throw InvalidInput("unknown arm in metrics");
    double gap;
    if (env_.has_covariates()) {
        if (c == nullptr) throw InvalidInput("covariate environment needs covariates in the log");
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < scratch_.size(); ++i) {
            scratch_[i] = env_.oracle_welfare(welfare_, static_cast<TreatmentId>(i), *c);
            best = std::max(best, scratch_[i]);
        }
        gap = best - scratch_[arm];
    } else {
        if (c != nullptr) throw InvalidInput("covariate record against a context-free environment");
        gap = fixed_gaps_[arm];
    }
    last_ = gap;
    regret_ += gap;
    if (gap > tol_) ++s_n_;
    ++counts_[arm];
    if (bins_) {
        if (!bin) throw InvalidInput("modified regret needs a bin for every record");
        modified_ += bins_->best(*bin) - bins_->welfare(*bin, arm);
        ++bin_counts_[*bin * counts_.size() + arm];
    }
}

RegretReport regret(const AssignmentLog& log, const Environment& env, const WelfareSpec& welfare,
                    double tol) {
    if (log.has_covariates() != env.has_covariates()) {
        throw InvalidInput("log and environment disagree on covariates");
    }
    MetricsAccumulator acc(env, welfare, nullptr, tol);
    RegretReport r;
    r.trajectory.reserve(log.size());
    Covariate c;
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log.has_covariates()) {
            c = log.covariate(i);
            acc.add(log.arm(i), &c, std::nullopt);
        } else {
            acc.add(log.arm(i), nullptr, std::nullopt);
        }
        r.trajectory.push_back(acc.regret());
    }
    r.cumulative_regret = acc.regret();
    r.per_arm_counts = acc.counts();
    r.s_n = acc.s_n();
    return r;
}

double modified_regret(const AssignmentLog& log, const BinOracle& oracle) {
    double total = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto j = log.bin(i);
        if (!j) throw InvalidInput("modified regret needs a bin for every record");
        if (*j >= oracle.num_bins()) throw InvalidInput("record bin outside the partition");
        total += oracle.best(*j) - oracle.welfare(*j, log.arm(i));
    }
    return total;
}

double modified_regret(const AssignmentLog& log, const Environment& env, const Partition& partition,
                       const WelfareSpec& welfare) {
    if (!log.has_covariates() || !env.has_covariates()) {
        throw InvalidInput("modified regret needs a covariate run");
    }
    return modified_regret(log, BinOracle(env, partition, welfare));
}

std::vector<std::uint64_t> subopt_counts(const AssignmentLog& log, std::size_t num_arms) {
    std::vector<std::uint64_t> counts(num_arms, 0);
    for (std::size_t i = 0; i < log.size(); ++i) ++counts.at(log.arm(i));
    return counts;
}

std::vector<std::vector<std::uint64_t>> subopt_counts_per_bin(const AssignmentLog& log,
                                                              std::size_t num_bins,
                                                              std::size_t num_arms) {
    std::vector<std::vector<std::uint64_t>> counts(num_bins, std::vector<std::uint64_t>(num_arms, 0));
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto j = log.bin(i);
        if (!j) throw InvalidInput("per-bin counts need a bin for every record");
        ++counts.at(*j).at(log.arm(i));
    }
    return counts;
}

std::uint64_t subopt_individuals(const AssignmentLog& log, const Environment& env,
                                 const WelfareSpec& welfare, double tol) {
    return regret(log, env, welfare, tol).s_n;
}

double oos_regret(TreatmentId selected, const Environment& env, const WelfareSpec& welfare) {
    return welfare_gaps(env, welfare).at(selected);
}

}  // namespace seqtreat
