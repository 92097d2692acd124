#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>

#include "seqtreat/partition.hpp"

namespace seqtreat {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two integrands evaluated together (the bin moment code needs E[mu] and
/// E[sigma2 + mu^2] over the same box).
using PairIntegrand = std::function<std::array<double, 2>(std::span<const double>)>;

struct CubatureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    std::size_t max_evaluations = 20'000'000;
};

/// Globally adaptive tensor Gauss-Legendre cubature over a box: each region is
/// integrated with 7- and 15-point rules, and the region with the largest
/// disagreement is bisected along its longest side until the summed error
/// estimate meets the tolerance. Throws QuadratureError when the evaluation
/// budget runs out first.
std::array<double, 2> integrate_box(const PairIntegrand& f, const Box& box,
                                    const CubatureOptions& opts = {});

}  // namespace seqtreat
