#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperuni/block_model.hpp"
#include "hyperuni/hypergraph.hpp"

namespace hyperuni {

/// Smallest k in [1, N] with Delta_k < degree, or N when there is none.
int target_block(const ModelParams& params, std::size_t degree);

/// Available candidates in W_{k,j}: unused u with b + {u} a host edge for
/// every b in `back_link`. Ascending.
std::vector<Vertex> candidates(const BlockGraph& host, const std::vector<VertexSet>& back_link, int k, int j,
                               const std::vector<bool>& used);

/// Occupancy caps L_{k,j} from the success argument, indexed [k-1][j-1].
std::vector<std::vector<long double>> fill_thresholds(const ModelParams& params);

enum class EmbedOutcome { success, failed };

struct Placement {
    Vertex guest = 0;
    Vertex host = 0;
    int block = 0;
    int subblock = 0;
    std::size_t degree = 0;
    std::size_t candidates = 0;  // available candidates in the chosen sub-block
};

struct EmbedReport {
    EmbedOutcome outcome = EmbedOutcome::success;
    std::size_t failed_at = 0;  // 1-based time of failure, 0 on success
    int failed_block = 0;
    std::vector<Vertex> map;           // guest vertex -> host vertex or kUnmapped
    std::vector<Placement> placements;  // in placement order
    std::vector<std::vector<std::size_t>> occupancy;  // [k-1][j-1], never decreases so final == peak
    std::vector<std::vector<long double>> thresholds;

    bool success() const noexcept { return outcome == EmbedOutcome::success; }
};

// Greedy placement in degeneracy order. Each guest vertex goes to the block
// chosen by its full degree and to the first sub-block holding an available
// candidate, on the smallest such host vertex. Never backtracks.
//
// Throws std::invalid_argument if r differs, the guest is larger than the
// host, or the ordering does not certify back-degrees <= D.
EmbedReport embed(const Hypergraph& guest, const DegeneracyOrdering& ordering, const BlockGraph& host);

nlohmann::json to_json(const EmbedReport& report);

/// Reads the vertex map from a report produced by to_json.
std::vector<Vertex> map_from_json(const nlohmann::json& report);

}  // namespace hyperuni
