#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hyperuni/block_model.hpp"
#include "hyperuni/hypergraph.hpp"

namespace fixtures {

using namespace hyperuni;

// Valid model parameters with the partition replaced by hand-picked sizes.
// Every block gets the same number of sub-blocks as the first row. All Delta
// are 1, so edge probabilities equal min{1, pstar}.
inline ModelParams shaped_params(int r, int D, std::vector<std::vector<std::uint64_t>> subblocks) {
    ModelParams p = compute_params({r, 100, D, ModelMode::scaled, 0.1, 1.0});
    p.N = static_cast<int>(subblocks.size());
    p.delta.assign(static_cast<std::size_t>(p.N) + 1, 1.0L);  // so pstar alone sets every p
    p.block_sizes.clear();
    for (const auto& row : subblocks) {
        std::uint64_t s = 0;
        for (auto x : row) s += x;
        p.block_sizes.push_back(s);
    }
    p.subblock_sizes = std::move(subblocks);
    return p;
}

// Complete r-graph on n vertices.
inline Hypergraph complete(int r, std::size_t n) {
    std::vector<VertexSet> edges;
    VertexSet cur;
    auto rec = [&](auto&& self, Vertex start) -> void {
        if (static_cast<int>(cur.size()) == r) {
            edges.push_back(cur);
            return;
        }
        for (Vertex v = start; v < n; ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return Hypergraph::from_edges(r, n, edges);
}

// Each r-set kept independently with probability p.
inline Hypergraph random_graph(int r, std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(p);
    const Hypergraph full = complete(r, n);
    std::vector<VertexSet> edges;
    for (const auto& e : full.edge_list())
        if (keep(rng)) edges.push_back(e);
    return Hypergraph::from_edges(r, n, edges);
}

}  // namespace fixtures
