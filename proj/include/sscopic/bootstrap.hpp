#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sscopic {

struct BootstrapOptions {
    std::size_t replicas = 200;
    /// Claims need margin > k standard errors.
    double k = 3.0;
    std::uint64_t seed = 0;
};

/// SplitMix64 mix of (seed, stream); used to give each replica or trial its
/// own reproducible generator.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

std::mt19937_64 seeded_rng(std::uint64_t seed);

/// Resampling multiplicities for n records (n draws with replacement).
std::vector<double> multinomial_weights(std::size_t n, std::mt19937_64& rng);

/// Sample standard deviation of replica statistics (n - 1 denominator).
double replica_standard_error(std::span<const double> values);

}  // namespace sscopic
