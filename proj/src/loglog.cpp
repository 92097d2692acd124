#include "seqtreat/loglog.hpp"

#include <cmath>

#include <boost/math/statistics/linear_regression.hpp>

#include "seqtreat/welfare.hpp"

namespace seqtreat {

LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw InvalidInput("log-log fit needs at least three points");
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0)) throw InvalidInput("log-log fit needs positive values");
        x.push_back(std::log(n));
        y.push_back(std::log(v));
    }
    try {
        const auto [c0, c1, r2] =
            boost::math::statistics::simple_ordinary_least_squares_with_R_squared(x, y);
        return {c1, c0, r2};
    } catch (const std::domain_error& e) {
        throw InvalidInput(e.what());
    }
}

}  // namespace seqtreat
