#include "seqtreat/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seqtreat {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid config:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

// Collects problems instead of stopping at the first one.
class Reader {
public:
    std::vector<std::string> problems;

    void fail(const std::string& path, const std::string& what) {
        problems.push_back(path + ": " + what);
    }

    /// True if `j` is an object; reports keys outside `allowed`.
    bool object(const json& j, const std::string& path, std::set<std::string> allowed) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [k, v] : j.items()) {
            if (!allowed.count(k)) fail(path + "." + k, "unknown key");
        }
        return true;
    }

    const json* find(const json& obj, const std::string& key, const std::string& path,
                     bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "missing");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                                 bool required = false) {
        const json* v = find(obj, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(path + "." + key, "expected a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(path + "." + key, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<double> positive(const json& obj, const std::string& key, const std::string& path,
                                   bool required = false) {
        auto x = number(obj, key, path, required);
        if (x && !(*x > 0.0)) {
            fail(path + "." + key, "must be positive");
            return std::nullopt;
        }
        return x;
    }

    std::optional<std::uint64_t> unsigned_int(const json& v, const std::string& path) {
        if (!v.is_number_unsigned()) {
            fail(path, "expected a nonnegative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

    std::optional<std::uint64_t> unsigned_int(const json& obj, const std::string& key,
                                              const std::string& path, bool required = false) {
        const json* v = find(obj, key, path, required);
        if (!v) return std::nullopt;
        return unsigned_int(*v, path + "." + key);
    }

    std::optional<std::string> string(const json& obj, const std::string& key,
                                      const std::string& path, bool required = false) {
        const json* v = find(obj, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(path + "." + key, "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& path) {
        const json* v = find(obj, key, path, false);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(path + "." + key, "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
        if (!v.is_array()) {
            fail(path, "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                fail(path + "[" + std::to_string(i) + "]", "expected a finite number");
                return std::nullopt;
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::optional<std::vector<double>> numbers(const json& obj, const std::string& key,
                                               const std::string& path, bool required = false) {
        const json* v = find(obj, key, path, required);
        if (!v) return std::nullopt;
        return numbers(*v, path + "." + key);
    }

    std::optional<std::vector<std::uint64_t>> unsigned_ints(const json& obj, const std::string& key,
                                                            const std::string& path) {
        const json* v = find(obj, key, path, false);
        if (!v) return std::nullopt;
        if (!v->is_array()) {
            fail(path + "." + key, "expected an array of integers");
            return std::nullopt;
        }
        std::vector<std::uint64_t> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto x = unsigned_int((*v)[i], path + "." + key + "[" + std::to_string(i) + "]");
            if (!x) return std::nullopt;
            out.push_back(*x);
        }
        return out;
    }
};

WelfareConfig read_welfare(Reader& r, const json& j, const std::string& path) {
    WelfareConfig w;
    if (!r.object(j, path, {"kind", "alpha", "floor_c"})) return w;
    if (auto k = r.string(j, "kind", path, true)) {
        try {
            w.kind = welfare_kind_from_string(*k);
        } catch (const std::exception&) {
            r.fail(path + ".kind", "unknown welfare kind '" + *k + "'");
        }
        if (w.kind == WelfareKind::custom) {
            r.fail(path + ".kind", "custom welfare functions are registered in code, not in config");
        }
    }
    if (auto a = r.number(j, "alpha", path)) {
        if (*a < 0.0) r.fail(path + ".alpha", "must be nonnegative");
        w.alpha = *a;
    }
    if (auto c = r.number(j, "floor_c", path)) {
        if (!(*c > 0.0 && *c < 1.0)) r.fail(path + ".floor_c", "must lie in (0,1)");
        w.floor_c = *c;
    }
    const bool ratio = w.kind == WelfareKind::sharpe || w.kind == WelfareKind::neg_coeff_variation;
    if (ratio && !j.contains("floor_c")) r.fail(path + ".floor_c", "required for ratio welfare kinds");
    return w;
}

FieldSpec read_field(Reader& r, const json& j, const std::string& path, std::size_t d) {
    FieldSpec f;
    if (!j.is_object()) {
        r.fail(path, "expected an object");
        return f;
    }
    const auto kind = r.string(j, "kind", path, true).value_or("affine");
    if (kind == "constant") {
        r.object(j, path, {"kind", "value"});
        f.kind = FieldSpec::Kind::affine;
        f.intercept = r.number(j, "value", path, true).value_or(0.0);
        f.slopes.assign(d, 0.0);
    } else if (kind == "affine") {
        r.object(j, path, {"kind", "intercept", "slopes"});
        f.kind = FieldSpec::Kind::affine;
        f.intercept = r.number(j, "intercept", path, true).value_or(0.0);
        f.slopes = r.numbers(j, "slopes", path, true).value_or(std::vector<double>(d, 0.0));
        if (f.slopes.size() != d) r.fail(path + ".slopes", "needs one slope per continuous coordinate");
    } else if (kind == "clipped_sine") {
        r.object(j, path, {"kind", "base", "amplitude", "frequency", "phase", "direction", "lo", "hi"});
        f.kind = FieldSpec::Kind::clipped_sine;
        f.base = r.number(j, "base", path, true).value_or(0.0);
        f.amplitude = r.number(j, "amplitude", path, true).value_or(0.0);
        f.frequency = r.number(j, "frequency", path, true).value_or(0.0);
        f.phase = r.number(j, "phase", path).value_or(0.0);
        f.lo = r.number(j, "lo", path).value_or(0.0);
        f.hi = r.number(j, "hi", path).value_or(1.0);
        f.direction = r.numbers(j, "direction", path).value_or(std::vector<double>(d, 1.0));
        if (f.direction.size() != d) r.fail(path + ".direction", "needs one entry per continuous coordinate");
    } else {
        r.fail(path + ".kind", "unknown field kind '" + kind + "'");
    }
    return f;
}

CovariateSpec read_covariates(Reader& r, const json& j, const std::string& path) {
    CovariateSpec c;
    if (!r.object(j, path, {"dimension", "levels", "level_probs", "holder_beta", "holder_L", "fields"})) {
        return c;
    }
    if (auto d = r.unsigned_int(j, "dimension", path, true)) {
        if (*d == 0) r.fail(path + ".dimension", "must be at least 1");
        c.dimension = std::max<std::uint64_t>(*d, 1);
    }
    if (auto lv = r.unsigned_ints(j, "levels", path)) {
        for (auto l : *lv) {
            if (l == 0) r.fail(path + ".levels", "every discrete coordinate needs a level");
            c.levels.push_back(static_cast<int>(l));
        }
    }
    std::size_t count = 1;
    for (int l : c.levels) count *= static_cast<std::size_t>(std::max(l, 1));
    if (auto p = r.numbers(j, "level_probs", path)) {
        c.level_probs = *p;
    } else {
        c.level_probs.assign(count, 1.0 / static_cast<double>(count));
    }
    if (auto b = r.number(j, "holder_beta", path)) {
        if (!(*b > 0.0 && *b <= 1.0)) r.fail(path + ".holder_beta", "must lie in (0,1]");
        c.holder_beta = *b;
    }
    if (auto L = r.positive(j, "holder_L", path)) c.holder_L = *L;
    const json* fields = r.find(j, "fields", path, true);
    if (fields) {
        if (!fields->is_array()) {
            r.fail(path + ".fields", "expected an array (one row of arms per level tuple)");
        } else {
            for (std::size_t a = 0; a < fields->size(); ++a) {
                const std::string rp = path + ".fields[" + std::to_string(a) + "]";
                const json& row = (*fields)[a];
                if (!row.is_array()) {
                    r.fail(rp, "expected an array of arms");
                    continue;
                }
                std::vector<std::pair<FieldSpec, FieldSpec>> arms;
                for (std::size_t i = 0; i < row.size(); ++i) {
                    const std::string ap = rp + "[" + std::to_string(i) + "]";
                    if (!r.object(row[i], ap, {"mean", "variance"})) continue;
                    FieldSpec mean, var;
                    if (const json* m = r.find(row[i], "mean", ap, true)) {
                        mean = read_field(r, *m, ap + ".mean", c.dimension);
                    }
                    if (const json* v = r.find(row[i], "variance", ap, false)) {
                        var = read_field(r, *v, ap + ".variance", c.dimension);
                    } else {
                        var.slopes.assign(c.dimension, 0.0);
                    }
                    arms.emplace_back(std::move(mean), std::move(var));
                }
                c.fields.push_back(std::move(arms));
            }
            if (c.fields.size() != count) {
                r.fail(path + ".fields", "needs " + std::to_string(count) + " rows, one per level tuple");
            }
        }
    }
    return c;
}

ABarFamily read_a_bar(Reader& r, const json& j, const std::string& path) {
    ABarFamily f;
    if (j.is_number()) {
        f.kind = ABarFamily::Kind::constant;
        f.a0 = j.get<double>();
        if (!(f.a0 > 0.0 && f.a0 <= 2.0)) r.fail(path, "must lie in (0,2]");
        return f;
    }
    if (!r.object(j, path, {"kind", "a0", "rho", "cap"})) return f;
    const auto kind = r.string(j, "kind", path, true).value_or("constant");
    if (kind == "constant") {
        f.kind = ABarFamily::Kind::constant;
    } else if (kind == "geometric") {
        f.kind = ABarFamily::Kind::geometric;
    } else if (kind == "harmonic") {
        f.kind = ABarFamily::Kind::harmonic;
    } else {
        r.fail(path + ".kind", "unknown a_bar family '" + kind + "'");
    }
    f.a0 = r.positive(j, "a0", path, true).value_or(1.0);
    if (auto rho = r.number(j, "rho", path)) {
        if (!(*rho > 0.0 && *rho <= 1.0)) r.fail(path + ".rho", "must lie in (0,1]");
        f.rho = *rho;
    } else if (f.kind == ABarFamily::Kind::geometric) {
        r.fail(path + ".rho", "required for the geometric family");
    }
    if (auto cap = r.positive(j, "cap", path)) {
        if (*cap > 2.0) r.fail(path + ".cap", "must not exceed 2");
        f.cap = *cap;
    }
    if (!f.cap && f.a0 > 2.0) r.fail(path + ".a0", "exceeds 2 without a cap");
    return f;
}

PartitionSpec read_partition(Reader& r, const json& j, const std::string& path, int depth = 0) {
    PartitionSpec p;
    if (!r.object(j, path, {"kind", "P", "groups", "per_level", "masses"})) return p;
    const auto kind = r.string(j, "kind", path, true).value_or("none");
    if (kind == "none") {
        p.kind = PartitionSpec::Kind::none;
    } else if (kind == "square") {
        p.kind = PartitionSpec::Kind::square;
        if (const json* P = r.find(j, "P", path, false)) {
            if (P->is_string() && P->get<std::string>() == "auto") {
                p.P.reset();
            } else if (auto v = r.unsigned_int(*P, path + ".P")) {
                if (*v == 0) r.fail(path + ".P", "must be at least 1");
                p.P = static_cast<std::size_t>(*v);
            }
        }
    } else if (kind == "exogenous") {
        p.kind = PartitionSpec::Kind::exogenous;
        const json* groups = r.find(j, "groups", path, true);
        if (groups && !groups->is_array()) r.fail(path + ".groups", "expected an array");
        if (groups && groups->is_array()) {
            for (std::size_t g = 0; g < groups->size(); ++g) {
                const std::string gp = path + ".groups[" + std::to_string(g) + "]";
                const json& gj = (*groups)[g];
                if (!r.object(gj, gp, {"boxes", "measure", "diameter"})) continue;
                ExogenousGroup eg;
                eg.measure = r.positive(gj, "measure", gp, true).value_or(1.0);
                eg.diameter = r.number(gj, "diameter", gp, true).value_or(0.0);
                if (eg.diameter < 0.0) r.fail(gp + ".diameter", "must be nonnegative");
                const json* boxes = r.find(gj, "boxes", gp, true);
                if (boxes && boxes->is_array()) {
                    for (std::size_t b = 0; b < boxes->size(); ++b) {
                        const std::string bp = gp + ".boxes[" + std::to_string(b) + "]";
                        if (!r.object((*boxes)[b], bp, {"lo", "hi"})) continue;
                        Box box;
                        box.lo = r.numbers((*boxes)[b], "lo", bp, true).value_or(std::vector<double>{});
                        box.hi = r.numbers((*boxes)[b], "hi", bp, true).value_or(std::vector<double>{});
                        eg.boxes.push_back(std::move(box));
                    }
                } else if (boxes) {
                    r.fail(gp + ".boxes", "expected an array");
                }
                p.groups.push_back(std::move(eg));
            }
        }
    } else if (kind == "discrete_product") {
        p.kind = PartitionSpec::Kind::discrete_product;
        if (depth > 0) r.fail(path, "discrete products cannot be nested");
        const json* per = r.find(j, "per_level", path, true);
        if (per && per->is_array()) {
            for (std::size_t a = 0; a < per->size(); ++a) {
                p.per_level.push_back(
                    read_partition(r, (*per)[a], path + ".per_level[" + std::to_string(a) + "]", depth + 1));
            }
        } else if (per) {
            r.fail(path + ".per_level", "expected an array");
        }
        if (const json* m = r.find(j, "masses", path, false)) {
            if (m->is_string() && m->get<std::string>() == "auto") {
                p.masses.reset();
            } else if (m->is_array()) {
                std::vector<std::vector<double>> masses;
                for (std::size_t a = 0; a < m->size(); ++a) {
                    masses.push_back(
                        r.numbers((*m)[a], path + ".masses[" + std::to_string(a) + "]").value_or(std::vector<double>{}));
                }
                p.masses = std::move(masses);
            } else {
                r.fail(path + ".masses", "expected \"auto\" or an array of arrays");
            }
        }
    } else {
        r.fail(path + ".kind", "unknown partition kind '" + kind + "'");
    }
    if (p.kind != PartitionSpec::Kind::square && j.contains("P")) r.fail(path + ".P", "only for square partitions");
    return p;
}

ArmSpec read_arm(Reader& r, const json& j, const std::string& path) {
    ArmSpec a;
    if (!r.object(j, path, {"kind", "mu", "sigma2", "gap_multiple", "a", "b", "lo", "hi", "value"})) return a;
    const auto kind = r.string(j, "kind", path).value_or("two_point");
    if (kind == "two_point") {
        a.kind = ArmDistribution::Kind::two_point;
        a.mu = r.number(j, "mu", path, true).value_or(0.5);
        a.sigma2 = r.number(j, "sigma2", path);
        a.gap_multiple = r.number(j, "gap_multiple", path).value_or(0.0);
        if (a.mu < 0.0 || a.mu > 1.0) r.fail(path + ".mu", "must lie in [0, 1]");
        if (a.sigma2 && (*a.sigma2 < 0.0 || *a.sigma2 > a.mu * (1.0 - a.mu) + 1e-15)) {
            r.fail(path + ".sigma2", "must lie in [0, mu (1 - mu)]");
        }
        for (const char* k : {"a", "b", "lo", "hi", "value"}) {
            if (j.contains(k)) r.fail(path + "." + k, "not a two_point parameter");
        }
    } else if (kind == "scaled_beta") {
        a.kind = ArmDistribution::Kind::scaled_beta;
        a.a = r.positive(j, "a", path, true).value_or(1.0);
        a.b = r.positive(j, "b", path, true).value_or(1.0);
        a.lo = r.number(j, "lo", path).value_or(0.0);
        a.hi = r.number(j, "hi", path).value_or(1.0);
        if (!(0.0 <= a.lo && a.lo < a.hi && a.hi <= 1.0)) r.fail(path, "need 0 <= lo < hi <= 1");
        for (const char* k : {"mu", "sigma2", "gap_multiple", "value"}) {
            if (j.contains(k)) r.fail(path + "." + k, "not a scaled_beta parameter");
        }
    } else if (kind == "deterministic") {
        a.kind = ArmDistribution::Kind::deterministic;
        a.value = r.number(j, "value", path, true).value_or(0.0);
        if (a.value < 0.0 || a.value > 1.0) r.fail(path + ".value", "must lie in [0, 1]");
        for (const char* k : {"mu", "sigma2", "gap_multiple", "a", "b", "lo", "hi"}) {
            if (j.contains(k)) r.fail(path + "." + k, "not a deterministic parameter");
        }
    } else {
        r.fail(path + ".kind", "unknown arm kind '" + kind + "'");
    }
    return a;
}

BoundsSpec read_bounds(Reader& r, const json& j, const std::string& path) {
    BoundsSpec b;
    if (!r.object(j, path, {"kind", "C", "gaps", "K", "lipschitz", "m_bar", "beta", "d",
                            "margin_alpha", "arm", "n", "D", "a_bar", "P"})) {
        return b;
    }
    b.kind = r.string(j, "kind", path, true).value_or("nocov");
    static const std::set<std::string> kinds{"nocov", "subopt", "oos", "bins", "sn", "delay", "delay_bins"};
    if (!kinds.count(b.kind)) r.fail(path + ".kind", "unknown bound '" + b.kind + "'");
    if (auto C = r.positive(j, "C", path)) b.C = *C;
    if (auto g = r.numbers(j, "gaps", path)) b.gaps = *g;
    if (auto K = r.positive(j, "K", path)) b.K = *K;
    if (auto v = r.positive(j, "lipschitz", path)) b.lipschitz = *v;
    if (auto v = r.positive(j, "m_bar", path)) b.m_bar = *v;
    if (auto v = r.positive(j, "beta", path)) b.beta = *v;
    if (auto v = r.positive(j, "d", path)) b.d = *v;
    if (auto v = r.positive(j, "margin_alpha", path)) b.margin_alpha = *v;
    if (auto v = r.unsigned_int(j, "arm", path)) b.arm = *v;
    if (auto n = r.numbers(j, "n", path)) {
        if (n->empty()) r.fail(path + ".n", "empty grid");
        b.n = *n;
    }
    if (auto D = r.unsigned_ints(j, "D", path)) {
        if (D->empty()) r.fail(path + ".D", "empty grid");
        b.D.assign(D->begin(), D->end());
    }
    if (const json* a = r.find(j, "a_bar", path, false)) b.a_bar = read_a_bar(r, *a, path + ".a_bar");
    if (auto P = r.unsigned_int(j, "P", path)) b.P = *P;
    return b;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

WelfareSpec WelfareConfig::build() const {
    switch (kind) {
        case WelfareKind::mean: return WelfareSpec::mean();
        case WelfareKind::sharpe: return WelfareSpec::sharpe(floor_c);
        case WelfareKind::neg_coeff_variation: return WelfareSpec::neg_coeff_variation(floor_c);
        case WelfareKind::mean_variance: return WelfareSpec::mean_variance(alpha);
        case WelfareKind::neg_variance: return WelfareSpec::neg_variance();
        case WelfareKind::custom: break;
    }
    throw InvalidInput("custom welfare cannot be built from config");
}

double GapSpec::at(double n) const { return coef * std::pow(n, n_power); }

FieldFunction FieldSpec::build(std::size_t d) const {
    if (kind == Kind::affine) {
        auto s = slopes;
        s.resize(d, 0.0);
        return FieldFunction::affine(intercept, std::move(s));
    }
    return FieldFunction::clipped_sine(base, amplitude, frequency, direction, phase, lo, hi);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    Reader r;
    ExperimentConfig cfg;
    const std::string top = "$";
    if (!r.object(root, top, {"welfare", "environment", "policy", "replications", "master_seed",
                              "output", "tol", "sweep", "bounds"})) {
        throw ConfigError(r.problems);
    }

    if (const json* w = r.find(root, "welfare", top, false)) cfg.welfare = read_welfare(r, *w, "$.welfare");

    const json* env = r.find(root, "environment", top, !root.contains("bounds"));
    if (env && r.object(*env, "$.environment", {"arms", "gap", "covariates", "batch", "horizon", "delay"})) {
        const std::string ep = "$.environment";
        if (const json* arms = r.find(*env, "arms", ep, false)) {
            if (!arms->is_array() || arms->empty()) {
                r.fail(ep + ".arms", "expected a nonempty array");
            } else {
                for (std::size_t i = 0; i < arms->size(); ++i) {
                    cfg.arms.push_back(read_arm(r, (*arms)[i], ep + ".arms[" + std::to_string(i) + "]"));
                }
            }
        }
        if (const json* g = r.find(*env, "gap", ep, false)) {
            GapSpec gs;
            if (g->is_number()) {
                gs.coef = g->get<double>();
            } else if (r.object(*g, ep + ".gap", {"coef", "n_power"})) {
                gs.coef = r.number(*g, "coef", ep + ".gap", true).value_or(0.0);
                gs.n_power = r.number(*g, "n_power", ep + ".gap").value_or(0.0);
            }
            if (gs.coef < 0.0) r.fail(ep + ".gap", "must be nonnegative");
            cfg.gap = gs;
        }
        if (const json* c = r.find(*env, "covariates", ep, false)) {
            cfg.covariates = read_covariates(r, *c, ep + ".covariates");
        }
        if (cfg.arms.empty() == !cfg.covariates.has_value()) {
            r.fail(ep, "give exactly one of 'arms' and 'covariates'");
        }
        if (const json* b = r.find(*env, "batch", ep, true)) {
            const std::string bp = ep + ".batch";
            if (r.object(*b, bp, {"kind", "m"})) {
                const auto kind = r.string(*b, "kind", bp).value_or("fixed");
                const auto m = r.unsigned_int(*b, "m", bp, true).value_or(1);
                if (m == 0) r.fail(bp + ".m", "must be at least 1");
                if (kind == "fixed") {
                    cfg.batch = BatchProcess::fixed(std::max<std::uint64_t>(m, 1));
                } else if (kind == "uniform_random") {
                    cfg.batch = BatchProcess::uniform_random(std::max<std::uint64_t>(m, 1));
                } else {
                    r.fail(bp + ".kind", "unknown batch kind '" + kind + "'");
                }
            }
        }
        if (const json* h = r.find(*env, "horizon", ep, true)) {
            const std::string hp = ep + ".horizon";
            if (r.object(*h, hp, {"kind", "n"})) {
                const auto kind = r.string(*h, "kind", hp).value_or("fixed");
                const auto n = r.unsigned_int(*h, "n", hp, true).value_or(1);
                if (n == 0) r.fail(hp + ".n", "must be at least 1");
                if (kind == "fixed") {
                    cfg.horizon = HorizonSampler::fixed(std::max<std::uint64_t>(n, 1));
                } else if (kind == "poisson") {
                    cfg.horizon = HorizonSampler::poisson(std::max<std::uint64_t>(n, 1));
                } else {
                    r.fail(hp + ".kind", "unknown horizon kind '" + kind + "'");
                }
            }
        }
        if (const json* d = r.find(*env, "delay", ep, false)) {
            const std::string dp = ep + ".delay";
            if (r.object(*d, dp, {"D", "a_bar", "delay_aware_outcomes"})) {
                cfg.delay.D = r.unsigned_int(*d, "D", dp).value_or(0);
                if (const json* a = r.find(*d, "a_bar", dp, false)) cfg.delay.a_bar = read_a_bar(r, *a, dp + ".a_bar");
                cfg.delay.delay_aware_outcomes = r.boolean(*d, "delay_aware_outcomes", dp).value_or(false);
            }
        }
    }

    if (const json* p = r.find(root, "policy", top, false)) {
        const std::string pp = "$.policy";
        if (r.object(*p, pp, {"profile", "gamma", "t_param", "threshold_scale", "partition"})) {
            const auto prof = r.string(*p, "profile", pp).value_or("standard");
            if (prof == "standard") {
                cfg.profile = Profile::standard;
            } else if (prof == "delayed") {
                cfg.profile = Profile::delayed;
            } else {
                r.fail(pp + ".profile", "expected 'standard' or 'delayed'");
            }
            cfg.gamma = r.positive(*p, "gamma", pp);
            cfg.t_param = r.positive(*p, "t_param", pp);
            cfg.threshold_scale = r.positive(*p, "threshold_scale", pp);
            if (const json* part = r.find(*p, "partition", pp, false)) {
                cfg.partition = read_partition(r, *part, pp + ".partition");
            }
        }
    }

    if (auto reps = r.unsigned_int(root, "replications", top)) {
        if (*reps == 0) r.fail("$.replications", "must be at least 1");
        cfg.replications = std::max<std::uint64_t>(*reps, 1);
    }
    if (auto seed = r.unsigned_int(root, "master_seed", top)) cfg.master_seed = *seed;
    if (auto out = r.string(root, "output", top)) cfg.output = *out;
    if (auto tol = r.number(root, "tol", top)) {
        if (*tol < 0.0) r.fail("$.tol", "must be nonnegative");
        cfg.tol = *tol;
    }

    if (const json* s = r.find(root, "sweep", top, false)) {
        const std::string sp = "$.sweep";
        if (r.object(*s, sp, {"n", "D", "P", "gap"})) {
            if (auto n = r.unsigned_ints(*s, "n", sp)) {
                if (n->empty()) r.fail(sp + ".n", "empty axis");
                for (auto v : *n) {
                    if (v == 0) r.fail(sp + ".n", "horizons must be positive");
                }
                cfg.sweep.n = *n;
            }
            if (auto D = r.unsigned_ints(*s, "D", sp)) {
                if (D->empty()) r.fail(sp + ".D", "empty axis");
                cfg.sweep.D.assign(D->begin(), D->end());
            }
            if (auto P = r.unsigned_ints(*s, "P", sp)) {
                if (P->empty()) r.fail(sp + ".P", "empty axis");
                for (auto v : *P) {
                    if (v == 0) r.fail(sp + ".P", "P must be positive");
                }
                cfg.sweep.P.assign(P->begin(), P->end());
            }
            if (auto g = r.numbers(*s, "gap", sp)) {
                if (g->empty()) r.fail(sp + ".gap", "empty axis");
                for (double v : *g) {
                    if (v < 0.0) r.fail(sp + ".gap", "gaps must be nonnegative");
                }
                cfg.sweep.gap = *g;
            }
        }
    }

    if (const json* b = r.find(root, "bounds", top, false)) cfg.bounds = read_bounds(r, *b, "$.bounds");

    // Cross-field rules.
    if (cfg.covariates && cfg.partition.kind == PartitionSpec::Kind::none) {
        r.fail("$.policy.partition", "covariate environments need a partition");
    }
    if (!cfg.covariates && cfg.partition.kind != PartitionSpec::Kind::none) {
        r.fail("$.policy.partition", "partitions need a covariate environment");
    }
    if (cfg.profile == Profile::standard &&
        (cfg.delay.D > 0 || !cfg.sweep.D.empty())) {
        r.fail("$.policy.profile", "delays need the 'delayed' profile");
    }
    if (!cfg.sweep.P.empty() && cfg.partition.kind != PartitionSpec::Kind::square) {
        r.fail("$.sweep.P", "the P axis needs a square partition");
    }
    if (!cfg.sweep.gap.empty() && cfg.covariates) {
        r.fail("$.sweep.gap", "the gap axis applies to context-free arms");
    }
    const bool uses_gap = std::any_of(cfg.arms.begin(), cfg.arms.end(),
                                      [](const ArmSpec& a) { return a.gap_multiple != 0.0; });
    if (uses_gap && !cfg.gap && cfg.sweep.gap.empty()) {
        r.fail("$.environment.gap", "arms use gap_multiple but no gap is declared");
    }

    if (!r.problems.empty()) throw ConfigError(r.problems);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace seqtreat
