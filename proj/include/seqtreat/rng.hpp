#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace seqtreat {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Named sub-streams of one replication. Each random quantity of a run draws
/// from its own stream so that, e.g., sampling covariates never shifts the
/// outcome sequence.
enum class Stream : std::uint64_t {
    horizon = 1,
    batch = 2,
    covariate = 3,
    level = 4,
    outcome = 5,
    aux = 6,
};

/// Seed for (master_seed, cell, replication). Pure function of its inputs,
/// so replications can run in any order on any thread.
constexpr std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t cell,
                                         std::uint64_t replication) noexcept {
    return mix64(mix64(mix64(master_seed) ^ cell) ^ (replication + 0x632be59bd9b4e019ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    Rng(std::uint64_t replication_seed, Stream stream)
        : engine_(mix64(replication_seed ^ mix64(static_cast<std::uint64_t>(stream)))) {}

    /// Uniform on [0, 1) with 53 random bits; platform independent.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [lo, hi] by rejection; platform independent.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
        const std::uint64_t span = hi - lo + 1;
        if (span == 0) return engine_();
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return lo + r % span;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace seqtreat
