#include "seqtreat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <boost/math/statistics/univariate_statistics.hpp>

namespace seqtreat {

std::vector<GridPoint> grid_points(const SweepAxes& axes) {
    std::vector<GridPoint> out{GridPoint{}};
    auto extend = [&out](auto values, auto setter) {
        if (values.empty()) return;
        std::vector<GridPoint> next;
        next.reserve(out.size() * values.size());
        for (const auto& p : out) {
            for (const auto& v : values) {
                GridPoint q = p;
                setter(q, v);
                next.push_back(q);
            }
        }
        out = std::move(next);
    };
    extend(axes.n, [](GridPoint& p, std::uint64_t v) { p.n = v; });
    extend(axes.D, [](GridPoint& p, std::size_t v) { p.D = v; });
    extend(axes.P, [](GridPoint& p, std::size_t v) { p.P = v; });
    extend(axes.gap, [](GridPoint& p, double v) { p.gap = v; });
    return out;
}

std::vector<std::string> axis_names(const SweepAxes& axes) {
    std::vector<std::string> names;
    if (!axes.n.empty()) names.emplace_back("n");
    if (!axes.D.empty()) names.emplace_back("D");
    if (!axes.P.empty()) names.emplace_back("P");
    if (!axes.gap.empty()) names.emplace_back("gap");
    return names;
}

namespace {

Partition build_partition(const PartitionSpec& spec, const ExperimentConfig& cfg,
                          const GridPoint& point, std::uint64_t n, std::size_t arms) {
    const auto& cov = *cfg.covariates;
    switch (spec.kind) {
        case PartitionSpec::Kind::square: {
            std::size_t P;
            if (point.P) {
                P = *point.P;
            } else if (spec.P) {
                P = *spec.P;
            } else {
                P = choose_P(static_cast<double>(n), static_cast<double>(cfg.batch.max_size()),
                             static_cast<double>(std::max<std::size_t>(arms, 2) - 1),
                             cov.holder_beta, static_cast<double>(cov.dimension));
            }
            return Partition::square(P, cov.dimension);
        }
        case PartitionSpec::Kind::exogenous:
            return Partition::exogenous(cov.dimension, spec.groups);
        case PartitionSpec::Kind::discrete_product: {
            if (cov.levels.empty()) throw InvalidInput("discrete products need discrete levels");
            std::vector<Partition> per;
            for (const auto& sub : spec.per_level) per.push_back(build_partition(sub, cfg, point, n, arms));
            std::vector<std::vector<double>> masses;
            if (spec.masses) {
                masses = *spec.masses;
            } else {
                if (per.size() != cov.level_probs.size()) {
                    throw InvalidInput("need one sub-partition per level tuple");
                }
                for (std::size_t a = 0; a < per.size(); ++a) {
                    std::vector<double> row;
                    for (const auto& b : per[a].bins()) row.push_back(cov.level_probs[a] * b.measure);
                    masses.push_back(std::move(row));
                }
            }
            return Partition::discrete_product(cov.levels, std::move(per), std::move(masses));
        }
        case PartitionSpec::Kind::none: break;
    }
    throw InvalidInput("covariate runs need a partition");
}

}  // namespace

Scenario build_scenario(const ExperimentConfig& cfg, const GridPoint& point) {
    Scenario sc;
    sc.n = point.n.value_or(cfg.horizon.n);
    sc.D = point.D.value_or(cfg.delay.D);
    sc.a_bar = cfg.delay.a_bar(sc.D);
    sc.gap = point.gap ? *point.gap : (cfg.gap ? cfg.gap->at(static_cast<double>(sc.n)) : 0.0);
    sc.welfare = cfg.welfare.build();
    sc.batch = cfg.batch;
    sc.horizon = cfg.horizon;
    sc.horizon.n = sc.n;
    sc.tol = cfg.tol;

    if (cfg.covariates) {
        const auto& c = *cfg.covariates;
        std::vector<std::vector<ArmField>> fields;
        for (const auto& row : c.fields) {
            std::vector<ArmField> r;
            for (const auto& [m, v] : row) r.push_back({m.build(c.dimension), v.build(c.dimension)});
            fields.push_back(std::move(r));
        }
        sc.env = Environment::from_fields(c.dimension, c.levels, c.level_probs, std::move(fields),
                                          c.holder_beta, c.holder_L);
    } else {
        std::vector<ArmDistribution> arms;
        for (const auto& a : cfg.arms) {
            switch (a.kind) {
                case ArmDistribution::Kind::two_point: {
                    const double mu = a.mu - a.gap_multiple * sc.gap;
                    arms.push_back(make_two_point(mu, a.sigma2.value_or(mu * (1.0 - mu))));
                    break;
                }
                case ArmDistribution::Kind::scaled_beta:
                    arms.push_back(ArmDistribution::scaled_beta(a.a, a.b, a.lo, a.hi));
                    break;
                case ArmDistribution::Kind::deterministic:
                    arms.push_back(ArmDistribution::deterministic(a.value));
                    break;
            }
        }
        sc.env = Environment::from_arms(std::move(arms));
    }
    if (cfg.delay.delay_aware_outcomes) sc.env = sc.env->with_delay_aware_outcomes(sc.a_bar);
    const Environment& env = *sc.env;
    const std::size_t arms = env.num_arms();
    const double n = static_cast<double>(sc.n);

    if (env.has_covariates()) {
        sc.partition = build_partition(cfg.partition, cfg, point, sc.n, arms);
        sc.oracle.emplace(env, *sc.partition, sc.welfare);
        auto& cp = sc.cov_policy;
        cp.num_treatments = arms;
        cp.holder_L = env.holder_L();
        cp.holder_beta = env.holder_beta();
        cp.n_expected = n;
        cp.profile = cfg.profile;
        cp.a_bar = sc.a_bar;
        cp.delay_batches = sc.D;
        cp.gamma_override = cfg.gamma;
        cp.t_override = cfg.t_param;
        cp.threshold_scale_override = cfg.threshold_scale;
    } else {
        sc.gaps = welfare_gaps(env, sc.welfare);
    }
    auto& p = sc.policy;
    p.num_treatments = arms;
    p.gamma = cfg.gamma.value_or(sc.welfare.lipschitz_constant());
    p.t_param = cfg.t_param.value_or(n);
    p.profile = cfg.profile;
    p.a_bar = sc.a_bar;
    p.delay_batches = sc.D;
    p.threshold_scale_override = cfg.threshold_scale;
    if (arms >= 2) p.validate();
    return sc;
}

ReplicationResult run_replication(const Scenario& sc, std::uint64_t seed, bool keep_log) {
    const Environment& env = *sc.env;
    const WelfareSpec& w = sc.welfare;
    const bool cov = env.has_covariates();
    const std::size_t arms = env.num_arms();

    Rng horizon_rng(seed, Stream::horizon), batch_rng(seed, Stream::batch),
        cov_rng(seed, Stream::covariate), level_rng(seed, Stream::level),
        outcome_rng(seed, Stream::outcome);

    ReplicationResult res;
    res.seed = seed;
    const std::uint64_t N = sc.horizon.draw(horizon_rng);
    res.horizon = N;

    MetricsAccumulator acc(env, w, sc.oracle ? &*sc.oracle : nullptr, sc.tol);
    if (keep_log) {
        res.log.emplace(cov ? env.dimension() : 0, cov ? env.levels().size() : 0);
        res.log->reserve(static_cast<std::size_t>(N));
    }

    std::optional<SequentialPolicy> policy;
    std::optional<CovariatePolicy> cov_policy;
    if (arms >= 2) {
        if (cov) {
            cov_policy.emplace(*sc.partition, w, sc.cov_policy);
        } else {
            policy.emplace(sc.policy);
        }
    }

    const bool bypass = sc.D == 0;
    DelayChannel channel(sc.D);
    std::vector<Covariate> covs;
    std::vector<std::size_t> bins;
    std::vector<TreatmentId> assigned;
    std::vector<DelayedOutcome> due;
    std::vector<std::pair<std::size_t, TreatmentId>> leaders;

    std::uint64_t t = 0, j = 0;
    while (t < N) {
        ++j;
        const std::size_t m =
            static_cast<std::size_t>(std::min<std::uint64_t>(sc.batch.draw(batch_rng), N - t));

        if (cov) {
            covs.resize(m);
            bins.resize(m);
            for (std::size_t k = 0; k < m; ++k) {
                env.sample_covariate(cov_rng, level_rng, covs[k]);
                bins[k] = sc.partition->locate(covs[k]);
            }
        }
        assigned.clear();
        if (arms == 1) {
            assigned.assign(m, 0);
        } else if (cov_policy) {
            cov_policy->route_assign_bins(bins, assigned);
        } else {
            policy->assign_batch(m, assigned);
        }

        for (std::size_t k = 0; k < m; ++k) {
            const Covariate* c = cov ? &covs[k] : nullptr;
            const std::optional<std::size_t> bin = cov ? std::optional<std::size_t>(bins[k]) : std::nullopt;
            const double y = env.sample_outcome(assigned[k], c, outcome_rng);
            acc.add(assigned[k], c, bin);
            const std::uint64_t available = bypass ? j : channel.due_batch(j);
            if (res.log) res.log->push(j, bin, assigned[k], c, y, available);
            if (bypass) {
                due.push_back({j, bin.value_or(0), assigned[k], y});
            } else {
                channel.enqueue(j, bin.value_or(0), assigned[k], y);
            }
        }
        if (!bypass) channel.deliver_due(j, due);

        if (policy) {
            for (const auto& o : due) policy->observe(o.arm, o.y);
            if (policy->state().observed_since_check) {
                const auto leader = policy->empirical_leader(w);
                policy->eliminate(w);
                if (leader && !policy->is_active(*leader)) ++res.leader_violations;
            }
            if (policy->assignment_spread() > 1) ++res.spread_violations;
        } else if (cov_policy) {
            for (const auto& o : due) cov_policy->route_observe(o.bin, o.arm, o.y);
            leaders.clear();
            for (std::size_t b : cov_policy->dirty_bins()) {
                if (auto l = cov_policy->bin_policy(b).empirical_leader(w)) leaders.emplace_back(b, *l);
            }
            cov_policy->end_of_batch();
            for (const auto& [b, l] : leaders) {
                if (!cov_policy->bin_policy(b).is_active(l)) ++res.leader_violations;
            }
            for (std::size_t b : cov_policy->touched_bins()) {
                if (cov_policy->bin_policy(b).assignment_spread() > 1) ++res.spread_violations;
            }
        }
        due.clear();
        t += m;
    }

    res.batches = j;
    res.regret = acc.regret();
    if (sc.oracle) res.modified_regret = acc.modified_regret();
    res.s_n = acc.s_n();
    res.t_i = acc.counts();
    if (!cov) {
        const TreatmentId pick = policy ? policy->select_out_of_sample() : 0;
        res.oos_arm = pick;
        res.oos_regret = sc.gaps.at(pick);
    }
    return res;
}

Aggregate aggregate(const std::vector<ReplicationResult>& reps) {
    namespace st = boost::math::statistics;
    Aggregate a;
    a.replications = reps.size();
    std::vector<double> regret, modified, sn, oos;
    for (const auto& r : reps) {
        if (r.error) {
            ++a.failures;
            continue;
        }
        regret.push_back(r.regret);
        if (r.modified_regret) modified.push_back(*r.modified_regret);
        sn.push_back(static_cast<double>(r.s_n));
        if (r.oos_regret) oos.push_back(*r.oos_regret);
    }
    auto mean_sd = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {0.0, 0.0};
        if (v.size() == 1) return {v[0], 0.0};
        const auto [m, var] = st::mean_and_sample_variance(v.begin(), v.end());
        return {m, std::sqrt(std::max(0.0, var))};
    };
    std::tie(a.mean_regret, a.sd_regret) = mean_sd(regret);
    if (!modified.empty()) {
        const auto [m, s] = mean_sd(modified);
        a.mean_modified_regret = m;
        a.sd_modified_regret = s;
    }
    a.mean_s_n = mean_sd(sn).first;
    if (!oos.empty()) a.mean_oos_regret = mean_sd(oos).first;
    return a;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) f(i);
    };
    if (threads <= 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
}

RunSummary sweep(const ExperimentConfig& cfg, const SweepAxes& axes, const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    const auto points = grid_points(axes);
    const std::size_t reps = opts.replications.value_or(cfg.replications);
    if (reps == 0) throw InvalidInput("replications must be at least 1");
    const std::uint64_t master = opts.seed.value_or(cfg.master_seed);

    std::vector<std::optional<Scenario>> scenarios(points.size());
    std::vector<std::string> problems(points.size());
    parallel_for(points.size(), opts.threads, [&](std::size_t i) {
        try {
            scenarios[i] = build_scenario(cfg, points[i]);
        } catch (const std::exception& e) {
            problems[i] = e.what();
        }
    });
    std::vector<std::string> errors;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!problems[i].empty()) errors.push_back("grid point " + std::to_string(i) + ": " + problems[i]);
    }
    if (!errors.empty()) throw ConfigError(errors);

    RunSummary out;
    out.axes = axis_names(axes);
    out.cells.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.cells[i].key = points[i];
        out.cells[i].reps.resize(reps);
    }
    parallel_for(points.size() * reps, opts.threads, [&](std::size_t task) {
        const std::size_t cell = task / reps, rep = task % reps;
        const std::uint64_t seed = replication_seed(master, cell, rep);
        auto& slot = out.cells[cell].reps[rep];
        try {
            slot = run_replication(*scenarios[cell], seed, opts.keep_log);
        } catch (const std::exception& e) {
            slot = ReplicationResult{};
            slot.seed = seed;
            slot.error = e.what();
        }
    });
    for (auto& c : out.cells) c.summary = aggregate(c.reps);
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    return sweep(cfg, cfg.sweep, opts);
}

std::string format_summary(const RunSummary& s) {
    std::ostringstream os;
    char buf[256];
    for (const auto& c : s.cells) {
        os << "cell";
        if (c.key.n) os << " n=" << *c.key.n;
        if (c.key.D) os << " D=" << *c.key.D;
        if (c.key.P) os << " P=" << *c.key.P;
        if (c.key.gap) os << " gap=" << *c.key.gap;
        os << '\n';
        const auto& a = c.summary;
        std::snprintf(buf, sizeof buf, "  replications %zu (failed %zu)\n", a.replications, a.failures);
        os << buf;
        std::snprintf(buf, sizeof buf, "  regret %.6g +- %.6g\n", a.mean_regret, a.sd_regret);
        os << buf;
        if (a.mean_modified_regret) {
            std::snprintf(buf, sizeof buf, "  modified regret %.6g +- %.6g\n", *a.mean_modified_regret,
                          *a.sd_modified_regret);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "  S_N %.6g\n", a.mean_s_n);
        os << buf;
        if (a.mean_oos_regret) {
            std::snprintf(buf, sizeof buf, "  out-of-sample regret %.6g\n", *a.mean_oos_regret);
            os << buf;
        }
        std::uint64_t leader = 0, spread = 0;
        for (const auto& r : c.reps) {
            leader += r.leader_violations;
            spread += r.spread_violations;
            if (r.error) os << "  replication seed " << r.seed << " failed: " << *r.error << '\n';
        }
        os << "  leader eliminated " << leader << ", spread above one " << spread << '\n';
    }
    std::snprintf(buf, sizeof buf, "wall clock %.3f s\n", s.wall_seconds);
    os << buf;
    return os.str();
}

}  // namespace seqtreat
