#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "hyperuni/hypergraph.hpp"

namespace hyperuni {

enum class GuestFamily { uniform, capped, skew };

std::string_view to_string(GuestFamily family) noexcept;
GuestFamily parse_family(std::string_view text);

// Parameters of a random D-degenerate guest. In every family the identity
// order 0..n-1 certifies back-degree <= D.
struct GenSpec {
    int r = 2;
    std::size_t n = 0;
    std::size_t D = 2;
    GuestFamily family = GuestFamily::uniform;
    std::uint64_t seed = 0;
    double alpha = 1.0;              // skew exponent
    std::size_t min_back_degree = 0;  // uniform/skew: lower end of the back-degree draw
};

/// Each vertex i >= r-1 draws d_i uniform in [min_back_degree, D] and that
/// many distinct uniform (r-1)-subsets of {0..i-1}.
Hypergraph gen_uniform(const GenSpec& spec);

/// Connected guests of maximum degree <= rD+1: each vertex i >= r-1 adds
/// between 1 and D back-edges, using only earlier vertices whose current
/// degree is at most rD.
Hypergraph gen_capped(const GenSpec& spec);

/// Like gen_uniform, but back-edge endpoints are drawn with weight
/// (current degree + 1)^alpha.
Hypergraph gen_skew(const GenSpec& spec);

/// Dispatches on spec.family.
Hypergraph generate(const GenSpec& spec);

}  // namespace hyperuni
