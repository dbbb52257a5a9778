#include "sscopic/bootstrap.hpp"

#include <cmath>
#include <cstdint>

namespace sscopic {

namespace {
__extension__ typedef unsigned __int128 wide;
}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 seeded_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> multinomial_weights(std::size_t n, std::mt19937_64& rng) {
    // Multiply-shift index draw: bias is below n / 2^64, negligible for any n here.
    // Counting into 32-bit cells keeps the scattered increments cache friendly.
    std::vector<std::uint32_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>((static_cast<wide>(rng()) * n) >> 64)];
    return {counts.begin(), counts.end()};
}

double replica_standard_error(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    long double mean = 0;
    for (double v : values) mean += v;
    mean /= values.size();
    long double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(static_cast<double>(ss / (values.size() - 1)));
}

}  // namespace sscopic
