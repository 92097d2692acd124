#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "seqtreat/bounds.hpp"
#include "seqtreat/config.hpp"
#include "seqtreat/csv.hpp"
#include "seqtreat/experiment.hpp"
#include "seqtreat/loglog.hpp"

using namespace seqtreat;

namespace {

struct RunFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    std::optional<std::size_t> replications;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
    app->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", f.out, "output prefix (default: the config's 'output')");
    app->add_option("--seed", f.seed, "master seed override");
    app->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    app->add_option("--replications", f.replications, "replications per cell override")
        ->check(CLI::PositiveNumber);
}

int run(const RunFlags& f, bool as_sweep) {
    ExperimentConfig cfg = load_config(f.config);
    if (as_sweep && cfg.sweep.empty()) throw ConfigError({"$.sweep: the sweep command needs at least one axis"});
    RunOptions opts;
    opts.threads = f.threads;
    opts.seed = f.seed;
    opts.replications = f.replications;
    const RunSummary s = as_sweep ? run_experiment(cfg, opts) : sweep(cfg, SweepAxes{}, opts);

    const std::string prefix = f.out.empty() ? cfg.output : f.out;
    write_csv_file(prefix + ".csv", s);
    const std::string text = format_summary(s);
    std::ofstream(prefix + ".summary.txt", std::ios::binary) << text;
    std::cout << text << "wrote " << prefix << ".csv\n";
    std::size_t failed = 0;
    for (const auto& c : s.cells) failed += c.summary.failures;
    return failed ? 1 : 0;
}

int bounds(const std::string& config, const std::string& out) {
    const ExperimentConfig cfg = load_config(config);
    if (!cfg.bounds) throw ConfigError({"$.bounds: missing"});
    const BoundsSpec& b = *cfg.bounds;

    BoundInputs in;
    in.gaps = b.gaps;
    in.K = b.K.value_or(static_cast<double>(std::max<std::size_t>(b.gaps.size(), 1)));
    in.lipschitz = b.lipschitz;
    in.m_bar = b.m_bar;
    in.beta = b.beta;
    in.d = b.d;
    in.margin_alpha = b.margin_alpha;
    in.C = b.C;

    std::ostringstream csv;
    csv << "n,D,P,a_bar,value,log_floor\n";
    std::ostringstream notes;
    const bool binned = b.kind == "bins" || b.kind == "delay_bins";
    if ((binned || b.kind == "sn") && in.d < 2.0) {
        notes << "note: the covariate bounds are stated for d >= 2; d=" << format_double(in.d) << " is outside\n";
    }
    for (double n : b.n) {
        in.n = n;
        std::size_t P = 0;
        if (binned) {
            P = b.P.value_or(choose_P(n, in.m_bar, in.K, in.beta, in.d));
            in.bins = square_bin_meta(P, static_cast<std::size_t>(in.d));
        }
        for (std::size_t D : b.D) {
            in.D = static_cast<double>(D);
            in.a_bar = b.a_bar(D);
            BoundValue v;
            if (b.kind == "nocov") v = bound_nocov(in);
            else if (b.kind == "subopt") v = bound_subopt(in, b.arm);
            else if (b.kind == "oos") v = bound_oos(in);
            else if (b.kind == "bins") v = bound_bins(in);
            else if (b.kind == "sn") v = bound_sn(in);
            else if (b.kind == "delay") v = bound_delay(in);
            else v = bound_delay_bins(in);
            csv << format_double(n) << ',' << D << ',' << (binned ? std::to_string(P) : "") << ',' << format_double(in.a_bar) << ','
                << format_double(v.value) << ',' << (v.log_floor_applied ? 1 : 0) << '\n';
        }
        if (b.kind == "delay" || b.kind == "delay_bins") {
            const auto form = b.kind == "delay" ? DelayForm::nocov : DelayForm::bins;
            notes << "n=" << format_double(n) << " argmin D=" << argmin_delay(in, b.D, b.a_bar, form) << '\n';
        }
    }
    if (out.empty()) {
        std::cout << csv.str();
        std::cerr << notes.str();
    } else {
        std::ofstream(out + ".bounds.csv", std::ios::binary) << csv.str();
        std::cout << notes.str() << "wrote " << out << ".bounds.csv\n";
    }
    return 0;
}

int analyze(const std::string& input, const std::string& by, const std::string& column) {
    std::ifstream is(input, std::ios::binary);
    if (!is) throw InvalidInput("cannot read '" + input + "'");
    const CsvTable t = read_csv_table(is);
    const std::size_t xi = t.column(by), yi = t.column(column);
    std::map<double, std::pair<double, std::size_t>> groups;
    for (const auto& row : t.rows) {
        if (row[yi].empty()) continue;
        auto& g = groups[std::stod(row[xi])];
        g.first += std::stod(row[yi]);
        ++g.second;
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& [x, g] : groups) {
        const double mean = g.first / static_cast<double>(g.second);
        std::cout << by << '=' << format_double(x) << " mean " << column << '=' << format_double(mean)
                  << " (" << g.second << " rows)\n";
        points.emplace_back(x, mean);
    }
    const LogLogFit fit = fit_loglog(points);
    std::cout << "slope " << format_double(fit.slope) << "\nintercept " << format_double(fit.intercept)
              << "\nr_squared " << format_double(fit.r_squared) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batched successive-elimination treatment allocation simulator"};
    app.require_subcommand(1);

    RunFlags sim_flags, sweep_flags;
    add_run_flags(app.add_subcommand("simulate", "run one config (sweep axes ignored)"), sim_flags);
    add_run_flags(app.add_subcommand("sweep", "run every grid point of the config's sweep"), sweep_flags);

    std::string bounds_config, bounds_out;
    auto* b = app.add_subcommand("bounds", "evaluate a regret bound over the config's grid");
    b->add_option("--config", bounds_config, "config with a 'bounds' section")->required()->check(CLI::ExistingFile);
    b->add_option("--out", bounds_out, "output prefix (default: CSV to stdout)");

    std::string input, by = "n", column = "regret";
    auto* a = app.add_subcommand("analyze", "fit a log-log slope of a CSV column's group means");
    a->add_option("--input", input, "CSV written by simulate or sweep")->required()->check(CLI::ExistingFile);
    a->add_option("--by", by, "grouping column (x axis)");
    a->add_option("--column", column, "value column (y axis)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand("simulate")) return run(sim_flags, false);
        if (app.got_subcommand("sweep")) return run(sweep_flags, true);
        if (app.got_subcommand("bounds")) return bounds(bounds_config, bounds_out);
        return analyze(input, by, column);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
