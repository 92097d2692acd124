#pragma once

#include <utility>
#include <vector>

namespace seqtreat {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of ln(value) on ln(n). Needs at least 3 points, all positive,
/// with at least two distinct n.
LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points);

}  // namespace seqtreat
