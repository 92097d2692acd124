#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqtreat/welfare.hpp"

namespace seqtreat {

/// An individual's covariates: discrete levels (one per discrete coordinate,
/// each in 0..levels_l-1) followed by continuous coordinates in [0,1].
struct Covariate {
    std::vector<int> levels;
    std::vector<double> x;
};

/// Axis-aligned box [lo, hi) per axis, closed at 1.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    bool contains(std::span<const double> x) const;
    double volume() const;
};

struct Bin {
    std::size_t id = 0;
    double measure = 1.0;   // Lebesgue measure of the continuous part
    double diameter = 0.0;  // sup distance between two members
    std::optional<double> prob_mass;
};

/// Geometry of a bin: which discrete level it belongs to (flattened) and the
/// boxes whose union is its continuous part.
struct BinRegion {
    std::size_t level = 0;
    std::vector<Box> boxes;
};

/// Group of an exogenous partition with caller-declared metadata.
struct ExogenousGroup {
    std::vector<Box> boxes;
    double measure = 0.0;
    double diameter = 0.0;
};

/// A finite partition of covariate space into bins, each with its own
/// elimination policy. locate() is total on the space.
class Partition {
public:
    enum class Kind { square_grid, exogenous, discrete_product };

    /// P^d hypercubes of side 1/P, half-open per axis with the last cell closed.
    static Partition square(std::size_t P, std::size_t d);

    /// Groups must be disjoint and cover [0,1]^d; this is spot-checked on a
    /// seeded sample of points plus every box center. Metadata is trusted.
    static Partition exogenous(std::size_t d, std::vector<ExogenousGroup> groups,
                               std::uint64_t check_seed = 0x9a77);

    /// One continuous partition per discrete level tuple (mixed radix, first
    /// coordinate fastest); masses[a][j] = P(X_D = a, X_C in B_{a,j}).
    static Partition discrete_product(std::vector<int> levels, std::vector<Partition> per_level,
                                      std::vector<std::vector<double>> masses);

    Kind kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dimension_; }
    const std::vector<int>& levels() const noexcept { return levels_; }
    std::size_t num_levels() const noexcept;
    std::size_t size() const noexcept { return bins_.size(); }
    std::span<const Bin> bins() const noexcept { return bins_; }
    const Bin& bin(std::size_t j) const { return bins_.at(j); }
    const BinRegion& region(std::size_t j) const { return regions_.at(j); }
    /// Side count of a square grid; 0 otherwise.
    std::size_t splits() const noexcept { return splits_; }

    /// Flattened index of a discrete level tuple.
    std::size_t flatten_level(std::span<const int> tuple) const;

    /// Throws InvalidInput for covariates outside the space.
    std::size_t locate(const Covariate& c) const;
    std::size_t locate_continuous(std::span<const double> x) const;

private:
    Partition() = default;

    Kind kind_ = Kind::square_grid;
    std::size_t dimension_ = 0;
    std::size_t splits_ = 0;
    std::vector<int> levels_;
    std::vector<Bin> bins_;
    std::vector<BinRegion> regions_;
    // discrete_product: continuous sub-partitions and their bin offsets
    std::vector<Partition> sub_;
    std::vector<std::size_t> offsets_;
};

/// floor((n / (m_bar K logbar(m_bar K)))^(1/(2 beta + d))), at least 1.
std::size_t choose_P(double n, double m_bar, double K, double beta, double d);

Partition square_partition(std::size_t P, std::size_t d);
std::size_t locate(const Partition& partition, const Covariate& c);

}  // namespace seqtreat
