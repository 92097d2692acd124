#include "seqtreat/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seqtreat/policy.hpp"
#include "seqtreat/rng.hpp"

namespace seqtreat {

namespace {

void require_unit_cube(std::span<const double> x, std::size_t d) {
    if (x.size() != d) {
        throw InvalidInput("covariate has dimension " + std::to_string(x.size()) + ", expected " +
                           std::to_string(d));
    }
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("covariate outside [0,1]^d");
    }
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
    for (std::size_t l = 0; l < x.size(); ++l) {
        const bool inside = (x[l] >= lo[l] && x[l] < hi[l]) || (x[l] == 1.0 && hi[l] == 1.0);
        if (!inside) return false;
    }
    return true;
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t l = 0; l < lo.size(); ++l) v *= hi[l] - lo[l];
    return v;
}

std::size_t Partition::num_levels() const noexcept {
    std::size_t n = 1;
    for (int l : levels_) n *= static_cast<std::size_t>(l);
    return n;
}

Partition Partition::square(std::size_t P, std::size_t d) {
    if (P == 0 || d == 0) throw InvalidInput("square partition needs P >= 1 and d >= 1");
    Partition p;
    p.kind_ = Kind::square_grid;
    p.dimension_ = d;
    p.splits_ = P;
    std::size_t count = 1;
    for (std::size_t l = 0; l < d; ++l) count *= P;
    const double side = 1.0 / static_cast<double>(P);
    const double measure = std::pow(side, static_cast<double>(d));
    const double diameter = std::sqrt(static_cast<double>(d)) / static_cast<double>(P);
    p.bins_.reserve(count);
    p.regions_.reserve(count);
    std::vector<std::size_t> k(d, 0);
    for (std::size_t id = 0; id < count; ++id) {
        std::size_t rest = id;
        Box box{std::vector<double>(d), std::vector<double>(d)};
        for (std::size_t l = 0; l < d; ++l) {
            const std::size_t kl = rest % P;
            rest /= P;
            box.lo[l] = static_cast<double>(kl) / static_cast<double>(P);
            box.hi[l] = static_cast<double>(kl + 1) / static_cast<double>(P);
        }
        p.bins_.push_back(Bin{id, measure, diameter, std::nullopt});
        p.regions_.push_back(BinRegion{0, {std::move(box)}});
    }
    return p;
}

Partition Partition::exogenous(std::size_t d, std::vector<ExogenousGroup> groups,
                               std::uint64_t check_seed) {
    if (d == 0) throw InvalidInput("exogenous partition needs d >= 1");
    if (groups.empty()) throw InvalidInput("exogenous partition needs at least one group");
    Partition p;
    p.kind_ = Kind::exogenous;
    p.dimension_ = d;
    const double max_diameter = std::sqrt(static_cast<double>(d));
    for (std::size_t j = 0; j < groups.size(); ++j) {
        auto& g = groups[j];
        if (g.boxes.empty()) throw InvalidInput("group " + std::to_string(j) + " has no boxes");
        for (const auto& b : g.boxes) {
            if (b.lo.size() != d || b.hi.size() != d) {
                throw InvalidInput("group " + std::to_string(j) + " has a box of wrong dimension");
            }
            for (std::size_t l = 0; l < d; ++l) {
                if (!(0.0 <= b.lo[l] && b.lo[l] < b.hi[l] && b.hi[l] <= 1.0)) {
                    throw InvalidInput("group " + std::to_string(j) + " has an invalid box");
                }
            }
        }
        if (!(g.measure > 0.0 && g.measure <= 1.0)) {
            throw InvalidInput("group " + std::to_string(j) + " measure must lie in (0,1]");
        }
        if (!(g.diameter >= 0.0 && g.diameter <= max_diameter + 1e-12)) {
            throw InvalidInput("group " + std::to_string(j) + " diameter must lie in [0, sqrt(d)]");
        }
        p.bins_.push_back(Bin{j, g.measure, g.diameter, std::nullopt});
        p.regions_.push_back(BinRegion{0, g.boxes});
    }

    auto owners = [&](std::span<const double> x) {
        std::size_t n = 0;
        for (const auto& r : p.regions_) {
            n += std::any_of(r.boxes.begin(), r.boxes.end(),
                             [&](const Box& b) { return b.contains(x); })
                     ? 1
                     : 0;
        }
        return n;
    };
    Rng rng(check_seed);
    std::vector<double> x(d);
    auto check = [&](const char* what) {
        const std::size_t n = owners(x);
        if (n != 1) {
            throw InvalidInput(std::string("exogenous groups ") +
                               (n == 0 ? "do not cover " : "overlap at ") + what);
        }
    };
    for (int s = 0; s < 4096; ++s) {
        for (auto& v : x) v = rng.uniform();
        check("a sampled point");
    }
    for (const auto& r : p.regions_) {
        for (const auto& b : r.boxes) {
            for (std::size_t l = 0; l < d; ++l) x[l] = 0.5 * (b.lo[l] + b.hi[l]);
            check("a box center");
        }
    }
    std::fill(x.begin(), x.end(), 1.0);
    check("the far corner");
    return p;
}

Partition Partition::discrete_product(std::vector<int> levels, std::vector<Partition> per_level,
                                      std::vector<std::vector<double>> masses) {
    if (levels.empty()) throw InvalidInput("discrete product needs at least one discrete coordinate");
    std::size_t count = 1;
    for (int l : levels) {
        if (l < 1) throw InvalidInput("each discrete coordinate needs at least one level");
        count *= static_cast<std::size_t>(l);
    }
    if (per_level.size() != count || masses.size() != count) {
        throw InvalidInput("discrete product needs one sub-partition and mass row per level tuple");
    }
    Partition p;
    p.kind_ = Kind::discrete_product;
    p.levels_ = std::move(levels);
    p.dimension_ = per_level.front().dimension();
    double total = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
        const auto& sub = per_level[a];
        if (sub.kind() == Kind::discrete_product) {
            throw InvalidInput("discrete product sub-partitions must be continuous");
        }
        if (sub.dimension() != p.dimension_) {
            throw InvalidInput("discrete product sub-partitions must share a dimension");
        }
        if (masses[a].size() != sub.size()) {
            throw InvalidInput("mass row " + std::to_string(a) + " does not match its partition");
        }
        p.offsets_.push_back(p.bins_.size());
        for (std::size_t j = 0; j < sub.size(); ++j) {
            const double m = masses[a][j];
            if (!(m > 0.0 && m <= 1.0)) {
                throw InvalidInput("bin probability masses must lie in (0,1]");
            }
            total += m;
            const Bin& b = sub.bin(j);
            p.bins_.push_back(Bin{p.bins_.size(), b.measure, b.diameter, m});
            p.regions_.push_back(BinRegion{a, sub.region(j).boxes});
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidInput("bin probability masses must sum to 1");
    }
    p.sub_ = std::move(per_level);
    return p;
}

std::size_t Partition::flatten_level(std::span<const int> tuple) const {
    if (tuple.size() != levels_.size()) throw InvalidInput("wrong number of discrete covariates");
    std::size_t index = 0, stride = 1;
    for (std::size_t l = 0; l < levels_.size(); ++l) {
        if (tuple[l] < 0 || tuple[l] >= levels_[l]) throw InvalidInput("discrete level out of range");
        index += static_cast<std::size_t>(tuple[l]) * stride;
        stride *= static_cast<std::size_t>(levels_[l]);
    }
    return index;
}

std::size_t Partition::locate_continuous(std::span<const double> x) const {
    require_unit_cube(x, dimension_);
    switch (kind_) {
        case Kind::square_grid: {
            std::size_t id = 0, stride = 1;
            const double P = static_cast<double>(splits_);
            for (std::size_t l = 0; l < dimension_; ++l) {
                const auto k = std::min(static_cast<std::size_t>(std::floor(x[l] * P)), splits_ - 1);
                id += k * stride;
                stride *= splits_;
            }
            return id;
        }
        case Kind::exogenous:
            for (std::size_t j = 0; j < regions_.size(); ++j) {
                for (const auto& b : regions_[j].boxes) {
                    if (b.contains(x)) return j;
                }
            }
            throw InvalidInput("covariate falls in no exogenous group");
        case Kind::discrete_product:
            break;
    }
    throw InvalidInput("discrete product partitions need discrete covariates");
}

std::size_t Partition::locate(const Covariate& c) const {
    if (kind_ != Kind::discrete_product) {
        if (!c.levels.empty()) throw InvalidInput("unexpected discrete covariates");
        return locate_continuous(c.x);
    }
    const std::size_t a = flatten_level(c.levels);
    return offsets_[a] + sub_[a].locate_continuous(c.x);
}

std::size_t choose_P(double n, double m_bar, double K, double beta, double d) {
    if (!(n > 0 && m_bar > 0 && K > 0 && beta > 0 && d > 0)) {
        throw InvalidInput("choose_P needs positive arguments");
    }
    const double base = n / (m_bar * K * logbar(m_bar * K));
    const double e = 2.0 * beta + d;
    double P = std::floor(std::pow(base, 1.0 / e));
    // pow() may land a hair below an exact integer root (e.g. 10000^(1/4)).
    if (std::pow(P + 1.0, e) <= base * (1.0 + 1e-12)) P += 1.0;
    return P < 1.0 ? 1 : static_cast<std::size_t>(P);
}

Partition square_partition(std::size_t P, std::size_t d) { return Partition::square(P, d); }

std::size_t locate(const Partition& partition, const Covariate& c) { return partition.locate(c); }

}  // namespace seqtreat
