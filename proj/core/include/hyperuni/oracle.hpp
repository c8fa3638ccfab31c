#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hyperuni/block_model.hpp"
#include "hyperuni/hypergraph.hpp"

namespace hyperuni {

// ---------------------------------------------------------------------------
// Embedding validity

enum class ViolationKind { unmapped, out_of_range, collision, missing_edge };

struct Violation {
    ViolationKind kind = ViolationKind::unmapped;
    std::vector<Vertex> guest;  // offending guest vertices (or the guest edge)
    std::vector<Vertex> host;   // their images

    std::string describe() const;
};

/// Empty iff `map` is total, injective, in range, and sends every guest edge
/// to a host edge.
std::vector<Violation> verify_embedding(const Hypergraph& guest, const Hypergraph& host,
                                        const std::vector<Vertex>& map);

// ---------------------------------------------------------------------------
// Exhaustive search

enum class SearchStatus { found, none, budget_exhausted };

struct BacktrackResult {
    SearchStatus status = SearchStatus::none;
    std::vector<Vertex> map;  // filled when found
    std::uint64_t nodes = 0;  // candidate assignments tried
};

/// Complete backtracking search in degeneracy order. Candidates are filtered
/// by the embedded back-link exactly as the greedy strategy does, then every
/// candidate is tried. `node_budget` caps the number of assignments.
BacktrackResult backtrack_embed(const Hypergraph& guest, const Hypergraph& host, std::uint64_t node_budget);
BacktrackResult backtrack_embed(const Hypergraph& guest, const Hypergraph& host, const LinkIndex& host_links,
                                std::uint64_t node_budget);

// ---------------------------------------------------------------------------
// Class enumeration

struct EnumerationOptions {
    /// Only graphs built by adding between 1 and D back-edges at every vertex
    /// i >= r-1; these are exactly the connected ones reachable that way.
    bool connected_only = false;
    /// Running degree cap: an earlier vertex may join a new edge only while
    /// its degree is below the cap, so every degree stays <= cap.
    std::optional<std::size_t> degree_cap;
    /// Refuse inputs with C(n, r) * D * n above this.
    std::uint64_t state_cap = 10'000'000;
};

/// Visits every labeled r-graph on 0..n-1 whose identity order has every
/// back-degree <= D, without duplicates, in a fixed order. The visitor
/// returns false to stop early. Returns the number of graphs visited.
std::uint64_t enumerate_class(int r, std::size_t n, std::size_t D, const EnumerationOptions& options,
                              const std::function<bool(const Hypergraph&)>& visit);

enum class UniversalityStatus { ok, counterexample, undecided };

struct UniversalityResult {
    UniversalityStatus status = UniversalityStatus::ok;
    std::optional<Hypergraph> guest;  // the counterexample or the undecided guest
    std::uint64_t rank = 0;           // its enumeration rank
    std::uint64_t checked = 0;        // guests decided before stopping
};

/// Runs backtrack_embed for every guest of enumerate_class(r, n, D) and stops
/// at the first one that does not embed (or exhausts `node_budget`).
UniversalityResult universality_check(const Hypergraph& host, int r, std::size_t n, std::size_t D,
                                      std::uint64_t node_budget, const EnumerationOptions& options = {});

// ---------------------------------------------------------------------------
// Back-link multisets

// A multiset of embedded back-links; each entry is a set of (r-1)-sets of host vertices.
struct BackLinkMultiset {
    std::vector<std::vector<VertexSet>> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

struct SubblockBackLinks {
    int block = 0;
    int subblock = 0;
    BackLinkMultiset multiset;
};

/// Groups the embedded back-links psi(L^-(x)) of every placed guest vertex x
/// by the sub-block that x landed in. Sub-blocks with no placed vertex are skipped.
std::vector<SubblockBackLinks> harvest_back_links(const Hypergraph& guest, const DegeneracyOrdering& ordering,
                                                  const BlockGraph& host, const std::vector<Vertex>& map);

enum class WbClause { none, wb1, wb2, wb3 };

struct WellBehavedResult {
    WbClause clause = WbClause::none;
    std::size_t entry = 0;  // WB1: offending entry
    Vertex vertex = 0;      // WB2: offending host vertex
    int block = 0;          // WB2/WB3
    int subblock = 0;       // WB3
    std::size_t observed = 0;
    long double limit = 0;

    bool ok() const noexcept { return clause == WbClause::none; }
    std::string describe() const;
};

/// Checks WB1 (|B_i| <= D), WB2 (each u in W_k lies in V(B_i) for at most
/// Delta_{k-1} entries) and, if `check_wb3`, WB3 (|V(B) cap W_{k,j}| <= |W_{k,j}|/2).
/// Reports the first violated clause in that order.
WellBehavedResult check_well_behaved(const BlockGraph& host, const BackLinkMultiset& ms, bool check_wb3 = true);

struct DensityMeasurement {
    std::size_t hits = 0;  // u in W_{k,j} whose link contains some entry
    std::size_t size = 0;  // |W_{k,j}|
    double observed = 0;
    double bound = 0;  // min{1/16, (t/4)(log n)^2 (loglog n)^D n^(D^(1-k)-1)}
};

/// Observed fraction of W_{k,j} covered by candidates of some entry, next to
/// the density bound. Throws std::invalid_argument on an empty sub-block.
DensityMeasurement measure_candidate_density(const BlockGraph& host, const BackLinkMultiset& ms, int k, int j);

/// The bound alone.
double candidate_density_bound(const ModelParams& params, std::size_t t, int k);

}  // namespace hyperuni
