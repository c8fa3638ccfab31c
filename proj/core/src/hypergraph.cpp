#include "hyperuni/hypergraph.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace hyperuni {

namespace {

std::string format_edge(std::span<const Vertex> e) {
    std::string s = "{";
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(e[i]);
    }
    return s + "}";
}

template <int R>
void sort_fixed(std::vector<Vertex>& flat) {
    std::vector<std::array<Vertex, R>> rows(flat.size() / R);
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(i * R), R, rows[i].begin());
    std::sort(rows.begin(), rows.end());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(rows[i].begin(), R, flat.begin() + static_cast<std::ptrdiff_t>(i * R));
}

void sort_edges(std::vector<Vertex>& flat, int r) {
    switch (r) {
        case 2: sort_fixed<2>(flat); break;
        case 3: sort_fixed<3>(flat); break;
        case 4: sort_fixed<4>(flat); break;
        case 5: sort_fixed<5>(flat); break;
        case 6: sort_fixed<6>(flat); break;
        case 7: sort_fixed<7>(flat); break;
        case 8: sort_fixed<8>(flat); break;
        default: throw std::invalid_argument("unsupported uniformity " + std::to_string(r));
    }
}

void check_uniformity(int r) {
    if (r < 2 || r > kMaxUniformity)
        throw std::invalid_argument("uniformity must be in [2, " + std::to_string(kMaxUniformity) +
                                    "], got " + std::to_string(r));
}

}  // namespace

Hypergraph::Hypergraph(int r, std::size_t n) : r_(r), n_(n) {
    check_uniformity(r);
    if (n > std::numeric_limits<Vertex>::max())
        throw std::invalid_argument("vertex count exceeds 32-bit ids");
    build_incidence();
}

Hypergraph::Hypergraph(int r, std::size_t n, std::vector<Vertex> flat_edges)
    : r_(r), n_(n), edges_(std::move(flat_edges)) {
    check_uniformity(r);
    if (n > std::numeric_limits<Vertex>::max())
        throw std::invalid_argument("vertex count exceeds 32-bit ids");
    const auto ru = static_cast<std::size_t>(r);
    if (edges_.size() % ru != 0)
        throw std::invalid_argument("flat edge list length is not a multiple of r");
    if (edges_.size() / ru > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("too many edges for 32-bit edge ids");
    for (std::size_t i = 0; i < edges_.size(); i += ru) {
        auto first = edges_.begin() + static_cast<std::ptrdiff_t>(i);
        std::sort(first, first + r);
        for (std::size_t j = 0; j < ru; ++j) {
            if (edges_[i + j] >= n)
                throw std::invalid_argument("vertex id " + std::to_string(edges_[i + j]) +
                                            " out of range in edge " + format_edge(edge(i / ru)));
            if (j > 0 && edges_[i + j] == edges_[i + j - 1])
                throw std::invalid_argument("repeated vertex in edge " + format_edge(edge(i / ru)));
        }
    }
    sort_edges(edges_, r);
    for (std::size_t i = 1; i < num_edges(); ++i) {
        if (std::ranges::equal(edge(i - 1), edge(i)))
            throw std::invalid_argument("duplicate edge " + format_edge(edge(i)));
    }
    build_incidence();
}

Hypergraph Hypergraph::from_edges(int r, std::size_t n, const std::vector<VertexSet>& edges) {
    std::vector<Vertex> flat;
    flat.reserve(edges.size() * static_cast<std::size_t>(std::max(r, 0)));
    for (const auto& e : edges) {
        if (static_cast<int>(e.size()) != r)
            throw std::invalid_argument("edge " + format_edge(e) + " does not have " + std::to_string(r) +
                                        " vertices");
        flat.insert(flat.end(), e.begin(), e.end());
    }
    return Hypergraph(r, n, std::move(flat));
}

Hypergraph Hypergraph::from_edges(int r, std::size_t n, std::initializer_list<VertexSet> edges) {
    return from_edges(r, n, std::vector<VertexSet>(edges));
}

void Hypergraph::build_incidence() {
    incidence_offsets_.assign(n_ + 1, 0);
    for (Vertex v : edges_) ++incidence_offsets_[v + 1];
    for (std::size_t v = 0; v < n_; ++v) incidence_offsets_[v + 1] += incidence_offsets_[v];
    incidence_.resize(edges_.size());
    std::vector<std::size_t> cursor(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
    const auto ru = static_cast<std::size_t>(r_);
    for (std::size_t i = 0; i < edges_.size(); ++i)
        incidence_[cursor[edges_[i]]++] = static_cast<std::uint32_t>(i / ru);
}

bool Hypergraph::has_edge(std::span<const Vertex> e) const {
    if (static_cast<int>(e.size()) != r_) return false;
    std::size_t lo = 0, hi = num_edges();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (std::ranges::lexicographical_compare(edge(mid), e))
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo < num_edges() && std::ranges::equal(edge(lo), e);
}

std::vector<VertexSet> Hypergraph::edge_list() const {
    std::vector<VertexSet> out;
    out.reserve(num_edges());
    for (std::size_t i = 0; i < num_edges(); ++i) {
        auto e = edge(i);
        out.emplace_back(e.begin(), e.end());
    }
    return out;
}

std::vector<VertexSet> link(const Hypergraph& h, Vertex v) {
    if (v >= h.num_vertices()) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
    std::vector<VertexSet> out;
    for (std::uint32_t id : h.incident_edges(v)) {
        VertexSet rest;
        for (Vertex u : h.edge(id))
            if (u != v) rest.push_back(u);
        out.push_back(std::move(rest));
    }
    std::ranges::sort(out);
    return out;
}

std::size_t DegeneracyOrdering::max_back_degree() const noexcept {
    return back_degrees.empty() ? 0 : *std::ranges::max_element(back_degrees);
}

DegeneracyOrdering make_ordering(const Hypergraph& h, std::vector<Vertex> order) {
    const std::size_t n = h.num_vertices();
    if (order.size() != n) throw std::invalid_argument("ordering length differs from vertex count");
    DegeneracyOrdering out;
    out.position.assign(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vertex v = order[i];
        if (v >= n || out.position[v] != n) throw std::invalid_argument("ordering is not a permutation");
        out.position[v] = i;
    }
    out.back_degrees.assign(n, 0);
    for (std::size_t e = 0; e < h.num_edges(); ++e) {
        std::size_t last = 0;
        for (Vertex u : h.edge(e)) last = std::max(last, out.position[u]);
        ++out.back_degrees[last];
    }
    out.order = std::move(order);
    return out;
}

DegeneracyOrdering identity_ordering(const Hypergraph& h) {
    std::vector<Vertex> order(h.num_vertices());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Vertex>(i);
    return make_ordering(h, std::move(order));
}

std::vector<VertexSet> back_link(const Hypergraph& h, const DegeneracyOrdering& ordering, std::size_t position) {
    if (position >= h.num_vertices() || position >= ordering.order.size())
        throw std::out_of_range("position " + std::to_string(position) + " out of range");
    const Vertex v = ordering.order[position];
    std::vector<VertexSet> out;
    for (std::uint32_t id : h.incident_edges(v)) {
        VertexSet rest;
        bool earlier = true;
        for (Vertex u : h.edge(id)) {
            if (u == v) continue;
            if (ordering.position[u] >= position) {
                earlier = false;
                break;
            }
            rest.push_back(u);
        }
        if (earlier) out.push_back(std::move(rest));
    }
    std::ranges::sort(out);
    return out;
}

DegeneracyResult degeneracy_ordering(const Hypergraph& h) {
    const std::size_t n = h.num_vertices();
    std::vector<std::size_t> deg(n);
    std::set<std::pair<std::size_t, Vertex>> queue;
    for (Vertex v = 0; v < n; ++v) {
        deg[v] = h.degree(v);
        queue.emplace(deg[v], v);
    }
    std::vector<bool> edge_alive(h.num_edges(), true);
    std::vector<Vertex> removal;
    std::vector<std::size_t> removal_degree;
    removal.reserve(n);
    removal_degree.reserve(n);
    while (!queue.empty()) {
        const auto [d, v] = *queue.begin();
        queue.erase(queue.begin());
        removal.push_back(v);
        removal_degree.push_back(d);
        for (std::uint32_t id : h.incident_edges(v)) {
            if (!edge_alive[id]) continue;
            edge_alive[id] = false;
            for (Vertex u : h.edge(id)) {
                if (u == v) continue;
                queue.erase({deg[u], u});
                --deg[u];
                queue.emplace(deg[u], u);
            }
        }
    }
    std::ranges::reverse(removal);
    std::ranges::reverse(removal_degree);

    DegeneracyResult out;
    out.ordering = make_ordering(h, std::move(removal));
    if (out.ordering.back_degrees != removal_degree)
        throw std::logic_error("peeling degrees disagree with recomputed back-degrees");
    out.degeneracy = out.ordering.max_back_degree();
    return out;
}

DegreeTail check_degree_tail(const Hypergraph& h, std::size_t k, std::size_t degeneracy) {
    if (k == 0) throw std::invalid_argument("degree threshold k must be >= 1");
    DegreeTail out;
    for (Vertex v = 0; v < h.num_vertices(); ++v)
        if (h.degree(v) >= k) ++out.count;
    // count <= r*D*n/k, kept in integers
    const auto rhs = static_cast<unsigned long long>(h.uniformity()) * degeneracy * h.num_vertices();
    out.bound_ok = static_cast<unsigned long long>(out.count) * k <= rhs;
    return out;
}

std::size_t max_degree(const Hypergraph& h) {
    std::size_t best = 0;
    for (Vertex v = 0; v < h.num_vertices(); ++v) best = std::max(best, h.degree(v));
    return best;
}

bool is_connected(const Hypergraph& h) {
    const std::size_t n = h.num_vertices();
    if (n <= 1) return true;
    std::vector<bool> seen(n, false);
    std::vector<Vertex> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (std::uint32_t id : h.incident_edges(v)) {
            for (Vertex u : h.edge(id)) {
                if (seen[u]) continue;
                seen[u] = true;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == n;
}

namespace {

template <int K>
void build_link_records(const Hypergraph& h, std::vector<Vertex>& keys, std::vector<std::size_t>& offsets,
                        std::vector<Vertex>& members) {
    struct Record {
        std::array<Vertex, K> key;
        Vertex member;
        auto operator<=>(const Record&) const = default;
    };
    const int r = h.uniformity();
    std::vector<Record> records;
    records.reserve(h.num_edges() * static_cast<std::size_t>(r));
    for (std::size_t e = 0; e < h.num_edges(); ++e) {
        auto edge = h.edge(e);
        for (int drop = 0; drop < r; ++drop) {
            Record rec{};
            int w = 0;
            for (int i = 0; i < r; ++i)
                if (i != drop) rec.key[static_cast<std::size_t>(w++)] = edge[static_cast<std::size_t>(i)];
            rec.member = edge[static_cast<std::size_t>(drop)];
            records.push_back(rec);
        }
    }
    std::sort(records.begin(), records.end());
    members.reserve(records.size());
    offsets.push_back(0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i == 0 || records[i].key != records[i - 1].key) {
            if (i != 0) offsets.push_back(members.size());
            keys.insert(keys.end(), records[i].key.begin(), records[i].key.end());
        }
        members.push_back(records[i].member);
    }
    if (!records.empty()) offsets.push_back(members.size());
}

}  // namespace

LinkIndex::LinkIndex(const Hypergraph& h) : key_size_(static_cast<std::size_t>(h.uniformity() - 1)) {
    switch (h.uniformity()) {
        case 2: build_link_records<1>(h, keys_, offsets_, members_); break;
        case 3: build_link_records<2>(h, keys_, offsets_, members_); break;
        case 4: build_link_records<3>(h, keys_, offsets_, members_); break;
        case 5: build_link_records<4>(h, keys_, offsets_, members_); break;
        case 6: build_link_records<5>(h, keys_, offsets_, members_); break;
        case 7: build_link_records<6>(h, keys_, offsets_, members_); break;
        case 8: build_link_records<7>(h, keys_, offsets_, members_); break;
        default: throw std::invalid_argument("unsupported uniformity");
    }
    if (offsets_.size() == 1) offsets_.clear();
}

std::span<const Vertex> LinkIndex::members(std::span<const Vertex> k) const {
    if (k.size() != key_size_) return {};
    std::size_t lo = 0, hi = num_keys();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (std::ranges::lexicographical_compare(key(mid), k))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < num_keys() && std::ranges::equal(key(lo), k)) return members_at(lo);
    return {};
}

std::vector<Vertex> intersect_links(const LinkIndex& index, const std::vector<VertexSet>& back_link,
                                    Vertex begin, Vertex end, const std::vector<bool>& used) {
    std::vector<Vertex> out;
    if (begin >= end) return out;
    if (back_link.empty()) {
        for (Vertex u = begin; u < end; ++u)
            if (!used[u]) out.push_back(u);
        return out;
    }
    std::vector<std::span<const Vertex>> lists;
    lists.reserve(back_link.size());
    for (const auto& b : back_link) {
        auto m = index.members(b);
        auto lo = std::lower_bound(m.begin(), m.end(), begin);
        auto hi = std::lower_bound(lo, m.end(), end);
        if (lo == hi) return out;
        lists.emplace_back(lo, hi);
    }
    std::ranges::sort(lists, {}, [](std::span<const Vertex> s) { return s.size(); });
    for (Vertex u : lists.front()) {
        if (used[u]) continue;
        bool all = true;
        for (std::size_t i = 1; i < lists.size() && all; ++i)
            all = std::binary_search(lists[i].begin(), lists[i].end(), u);
        if (all) out.push_back(u);
    }
    return out;
}

}  // namespace hyperuni
