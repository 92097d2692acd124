#include "seqtreat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace seqtreat {

namespace {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

template <unsigned N>
Rule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    Rule r;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0.0) {
            r.nodes.push_back(0.0);
            r.weights.push_back(w[k]);
        } else {
            r.nodes.push_back(a[k]);
            r.weights.push_back(w[k]);
            r.nodes.push_back(-a[k]);
            r.weights.push_back(w[k]);
        }
    }
    return r;
}

const Rule& low_rule() {
    static const Rule r = make_rule<7>();
    return r;
}

const Rule& high_rule() {
    static const Rule r = make_rule<15>();
    return r;
}

std::array<double, 2> tensor(const PairIntegrand& f, const Box& box, const Rule& rule,
                             std::size_t& evals) {
    const std::size_t d = box.lo.size();
    const std::size_t q = rule.nodes.size();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d), half(d), mid(d);
    double jac = 1.0;
    for (std::size_t l = 0; l < d; ++l) {
        half[l] = 0.5 * (box.hi[l] - box.lo[l]);
        mid[l] = 0.5 * (box.hi[l] + box.lo[l]);
        jac *= half[l];
    }
    std::array<double, 2> sum{0.0, 0.0};
    while (true) {
        double w = jac;
        for (std::size_t l = 0; l < d; ++l) {
            x[l] = mid[l] + half[l] * rule.nodes[idx[l]];
            w *= rule.weights[idx[l]];
        }
        const auto v = f(x);
        sum[0] += w * v[0];
        sum[1] += w * v[1];
        ++evals;
        std::size_t l = 0;
        while (l < d && ++idx[l] == q) idx[l++] = 0;
        if (l == d) break;
    }
    return sum;
}

struct Region {
    Box box;
    std::array<double, 2> value;
    std::array<double, 2> error;
    double priority;
    bool operator<(const Region& o) const { return priority < o.priority; }
};

}  // namespace

std::array<double, 2> integrate_box(const PairIntegrand& f, const Box& box,
                                    const CubatureOptions& opts) {
    std::size_t evals = 0;
    auto assess = [&](Box b) {
        const auto lo = tensor(f, b, low_rule(), evals);
        const auto hi = tensor(f, b, high_rule(), evals);
        std::array<double, 2> err{std::abs(hi[0] - lo[0]), std::abs(hi[1] - lo[1])};
        return Region{std::move(b), hi, err, std::max(err[0], err[1])};
    };

    std::priority_queue<Region> heap;
    heap.push(assess(box));
    std::array<double, 2> total = heap.top().value;
    std::array<double, 2> error = heap.top().error;

    auto converged = [&] {
        for (int c = 0; c < 2; ++c) {
            if (error[c] > std::max(opts.rel_tol * std::abs(total[c]), opts.abs_tol)) return false;
        }
        return true;
    };

    while (!converged()) {
        if (evals >= opts.max_evaluations) {
            throw QuadratureError("cubature did not reach the requested tolerance");
        }
        Region worst = heap.top();
        heap.pop();
        std::size_t axis = 0;
        for (std::size_t l = 1; l < worst.box.lo.size(); ++l) {
            if (worst.box.hi[l] - worst.box.lo[l] > worst.box.hi[axis] - worst.box.lo[axis]) {
                axis = l;
            }
        }
        const double cut = 0.5 * (worst.box.lo[axis] + worst.box.hi[axis]);
        Box left = worst.box, right = worst.box;
        left.hi[axis] = cut;
        right.lo[axis] = cut;
        Region a = assess(std::move(left));
        Region b = assess(std::move(right));
        for (int c = 0; c < 2; ++c) {
            total[c] += a.value[c] + b.value[c] - worst.value[c];
            error[c] += a.error[c] + b.error[c] - worst.error[c];
        }
        heap.push(std::move(a));
        heap.push(std::move(b));
    }
    // Re-sum to shed the drift of the incremental updates.
    std::array<double, 2> exact{0.0, 0.0};
    while (!heap.empty()) {
        exact[0] += heap.top().value[0];
        exact[1] += heap.top().value[1];
        heap.pop();
    }
    return exact;
}

}  // namespace seqtreat
