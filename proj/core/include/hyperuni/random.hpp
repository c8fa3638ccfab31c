#pragma once

#include <cstdint>
#include <random>

namespace hyperuni {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Role tags for seed derivation. A substream is identified by
// (master seed, role, index), so adding trials never shifts earlier ones.
enum class SeedRole : std::uint64_t {
    stratum = 0x5354,
    host = 0x484f,
    guest = 0x4755,
    trial = 0x5452,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedRole role, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(role))) + index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace hyperuni
