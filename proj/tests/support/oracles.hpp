#pragma once

// Deliberately naive reference implementations. They share no code with the
// library beyond the Hypergraph container, so agreement is evidence rather
// than tautology.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "hyperuni/hypergraph.hpp"

namespace oracles {

using hyperuni::Hypergraph;
using hyperuni::Vertex;

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

// Edges as std::set of sorted vectors, straight from the flat storage.
inline std::set<std::vector<Vertex>> edge_set(const Hypergraph& h) {
    std::set<std::vector<Vertex>> out;
    for (std::size_t i = 0; i < h.num_edges(); ++i) {
        auto e = h.edge(i);
        out.emplace(e.begin(), e.end());
    }
    return out;
}

// Max over positions of the number of edges whose last vertex (in `order`) is that position.
inline std::size_t max_back_degree(const Hypergraph& h, const std::vector<Vertex>& order) {
    std::vector<std::size_t> pos(h.num_vertices());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::vector<std::size_t> back(h.num_vertices(), 0);
    for (const auto& e : edge_set(h)) {
        std::size_t last = 0;
        for (Vertex v : e) last = std::max(last, pos[v]);
        ++back[last];
    }
    return back.empty() ? 0 : *std::max_element(back.begin(), back.end());
}

// Minimum over all n! orderings.
inline std::size_t exhaustive_degeneracy(const Hypergraph& h) {
    std::vector<Vertex> order(h.num_vertices());
    std::iota(order.begin(), order.end(), Vertex{0});
    std::size_t best = h.num_edges();
    do {
        best = std::min(best, max_back_degree(h, order));
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

// Assigns guest vertices 0, 1, ... in index order to unused host vertices and
// checks each guest edge once its last vertex is assigned.
inline std::optional<std::vector<Vertex>> naive_embedding(const Hypergraph& guest, const Hypergraph& host) {
    const auto host_edges = edge_set(host);
    std::vector<std::vector<std::vector<Vertex>>> closing(guest.num_vertices());
    for (const auto& e : edge_set(guest)) closing[e.back()].push_back(e);
    std::vector<Vertex> map(guest.num_vertices());
    std::vector<bool> used(host.num_vertices(), false);
    auto rec = [&](auto&& self, std::size_t v) -> bool {
        if (v == guest.num_vertices()) return true;
        for (Vertex u = 0; u < host.num_vertices(); ++u) {
            if (used[u]) continue;
            map[v] = u;
            bool ok = true;
            for (const auto& e : closing[v]) {
                std::vector<Vertex> image;
                for (Vertex x : e) image.push_back(map[x]);
                std::sort(image.begin(), image.end());
                if (!host_edges.count(image)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            used[u] = true;
            if (self(self, v + 1)) return true;
            used[u] = false;
        }
        return false;
    };
    if (guest.num_vertices() > host.num_vertices()) return std::nullopt;
    if (rec(rec, 0)) return map;
    return std::nullopt;
}

// Number of labeled r-graphs on 0..n-1 in which every vertex i closes between
// `min_back` and D edges inside {0..i}: a product over vertices of the number
// of ways to pick that many of the C(i, r-1) available back-edges.
inline std::uint64_t product_class_count(int r, std::size_t n, std::size_t D, std::size_t min_back = 0) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t avail = choose(i, static_cast<std::uint64_t>(r - 1));
        if (avail == 0) continue;  // vertices before r-1 close nothing
        std::uint64_t ways = 0;
        for (std::size_t d = min_back; d <= D; ++d) ways += choose(avail, d);
        total *= ways;
    }
    return total;
}

// All r-subsets of {0..n-1}, lexicographic.
inline std::vector<std::vector<Vertex>> all_r_sets(std::size_t n, int r) {
    std::vector<std::vector<Vertex>> out;
    std::vector<Vertex> cur;
    auto rec = [&](auto&& self, Vertex start) -> void {
        if (static_cast<int>(cur.size()) == r) {
            out.push_back(cur);
            return;
        }
        for (Vertex v = start; v < n; ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

struct ClassFilter {
    std::size_t min_back = 0;          // per vertex i >= r-1
    std::optional<std::size_t> max_degree;
    bool connected = false;
};

// Scans every subset of the complete r-graph and keeps those whose identity
// order has back-degrees in [min_back, D] (min_back only from vertex r-1 on),
// maximum degree within the cap, and co-occurrence connectivity if asked.
inline std::uint64_t subset_scan_count(int r, std::size_t n, std::size_t D, const ClassFilter& f = {}) {
    const auto sets = all_r_sets(n, r);
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << sets.size()); ++mask) {
        std::vector<std::size_t> back(n, 0), deg(n, 0);
        std::vector<Vertex> parent(n);
        std::iota(parent.begin(), parent.end(), Vertex{0});
        auto find = [&](Vertex x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t b = 0; b < sets.size(); ++b) {
            if (!(mask >> b & 1)) continue;
            ++back[sets[b].back()];
            for (Vertex v : sets[b]) {
                ++deg[v];
                parent[find(v)] = find(sets[b].front());
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (back[i] > D) ok = false;
            if (i + 1 >= static_cast<std::size_t>(r) && back[i] < f.min_back) ok = false;
            if (f.max_degree && deg[i] > *f.max_degree) ok = false;
        }
        if (ok && f.connected)
            for (Vertex v = 1; v < n && ok; ++v) ok = find(v) == find(0);
        count += ok;
    }
    return count;
}

}  // namespace oracles
