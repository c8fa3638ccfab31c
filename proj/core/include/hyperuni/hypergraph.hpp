#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace hyperuni {

using Vertex = std::uint32_t;

/// An ascending list of distinct vertices.
using VertexSet = std::vector<Vertex>;

/// Marks an unplaced guest vertex in a vertex map.
inline constexpr Vertex kUnmapped = std::numeric_limits<Vertex>::max();

/// Largest supported uniformity. Keeps link keys and pattern vectors small.
inline constexpr int kMaxUniformity = 8;

// r-uniform hypergraph on vertices 0..n-1.
//
// Edges are stored flat (stride r), each edge ascending, the edge list
// lexicographically sorted and duplicate free. Values are immutable after
// construction.
class Hypergraph {
public:
    Hypergraph() = default;

    /// Empty r-graph on n vertices.
    Hypergraph(int r, std::size_t n);

    /// Takes `flat_edges` as consecutive groups of r vertex ids in any order.
    /// Throws std::invalid_argument on repeated vertices inside an edge,
    /// out-of-range ids, duplicate edges or a length that is not a multiple of r.
    Hypergraph(int r, std::size_t n, std::vector<Vertex> flat_edges);

    static Hypergraph from_edges(int r, std::size_t n, const std::vector<VertexSet>& edges);
    static Hypergraph from_edges(int r, std::size_t n, std::initializer_list<VertexSet> edges);

    int uniformity() const noexcept { return r_; }
    std::size_t num_vertices() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return r_ == 0 ? 0 : edges_.size() / static_cast<std::size_t>(r_); }

    std::span<const Vertex> edge(std::size_t i) const {
        return {edges_.data() + i * static_cast<std::size_t>(r_), static_cast<std::size_t>(r_)};
    }
    std::span<const Vertex> flat_edges() const noexcept { return edges_; }

    /// `e` must be ascending.
    bool has_edge(std::span<const Vertex> e) const;

    std::size_t degree(Vertex v) const { return incidence_offsets_[v + 1] - incidence_offsets_[v]; }

    /// Ids of the edges containing v, ascending.
    std::span<const std::uint32_t> incident_edges(Vertex v) const {
        return {incidence_.data() + incidence_offsets_[v], degree(v)};
    }

    std::vector<VertexSet> edge_list() const;

    friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
        return a.r_ == b.r_ && a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    void build_incidence();

    int r_ = 0;
    std::size_t n_ = 0;
    std::vector<Vertex> edges_;
    std::vector<std::size_t> incidence_offsets_{0};
    std::vector<std::uint32_t> incidence_;
};

/// L(v): every (r-1)-set that forms an edge together with v, ascending.
std::vector<VertexSet> link(const Hypergraph& h, Vertex v);

// A vertex ordering v_1..v_n together with the back-degrees |L^-(v_i)|.
struct DegeneracyOrdering {
    std::vector<Vertex> order;
    std::vector<std::size_t> back_degrees;
    /// position[v] is the index of v in `order`.
    std::vector<std::size_t> position;

    std::size_t max_back_degree() const noexcept;
};

/// Builds an ordering from an explicit permutation and recomputes its back-degrees.
DegeneracyOrdering make_ordering(const Hypergraph& h, std::vector<Vertex> order);

/// The ordering 0, 1, ..., n-1.
DegeneracyOrdering identity_ordering(const Hypergraph& h);

/// L^-(v_i) for the vertex at `position` (0-based).
std::vector<VertexSet> back_link(const Hypergraph& h, const DegeneracyOrdering& ordering,
                                 std::size_t position);

struct DegeneracyResult {
    DegeneracyOrdering ordering;
    std::size_t degeneracy = 0;
};

/// Min-degree peeling (ties to the smallest id), reversed. The returned
/// ordering's largest back-degree equals the degeneracy of h.
DegeneracyResult degeneracy_ordering(const Hypergraph& h);

struct DegreeTail {
    std::size_t count = 0;
    bool bound_ok = true;
};

/// Counts vertices of degree >= k and checks count <= r*D*n/k.
DegreeTail check_degree_tail(const Hypergraph& h, std::size_t k, std::size_t degeneracy);

std::size_t max_degree(const Hypergraph& h);

/// Connectivity of the co-occurrence relation (two vertices are adjacent iff
/// they share an edge). Graphs on at most one vertex are connected.
bool is_connected(const Hypergraph& h);

// Inverted link structure: maps each (r-1)-set b to the ascending list of
// vertices u with b + {u} an edge.
class LinkIndex {
public:
    LinkIndex() = default;
    explicit LinkIndex(const Hypergraph& h);

    /// Vertices u with key + {u} in E. `key` must be ascending with r-1 entries.
    std::span<const Vertex> members(std::span<const Vertex> key) const;

    std::size_t num_keys() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::span<const Vertex> key(std::size_t i) const {
        return {keys_.data() + i * key_size_, key_size_};
    }
    std::span<const Vertex> members_at(std::size_t i) const {
        return {members_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    friend bool operator==(const LinkIndex&, const LinkIndex&) = default;

private:
    std::size_t key_size_ = 0;
    std::vector<Vertex> keys_;
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> members_;
};

/// Sorted intersection of the member lists of every key in `back_link`,
/// restricted to [begin, end) and to vertices with `used[u] == false`.
/// An empty `back_link` yields every unused vertex of the range.
std::vector<Vertex> intersect_links(const LinkIndex& index, const std::vector<VertexSet>& back_link,
                                    Vertex begin, Vertex end, const std::vector<bool>& used);

}  // namespace hyperuni
