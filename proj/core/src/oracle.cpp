#include "hyperuni/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "hyperuni/errors.hpp"

namespace hyperuni {

namespace {

std::string join(const std::vector<Vertex>& vs) {
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) s += ' ';
        s += vs[i] == kUnmapped ? std::string("-") : std::to_string(vs[i]);
    }
    return s;
}

}  // namespace

std::string Violation::describe() const {
    switch (kind) {
        case ViolationKind::unmapped: return "guest vertex " + join(guest) + " is unmapped";
        case ViolationKind::out_of_range: return "guest vertex " + join(guest) + " maps outside the host (" + join(host) + ")";
        case ViolationKind::collision: return "guest vertices {" + join(guest) + "} share host vertex " + join(host);
        case ViolationKind::missing_edge: return "guest edge {" + join(guest) + "} maps to non-edge {" + join(host) + "}";
    }
    return "unknown violation";
}

std::vector<Violation> verify_embedding(const Hypergraph& guest, const Hypergraph& host,
                                        const std::vector<Vertex>& map) {
    std::vector<Violation> out;
    if (map.size() != guest.num_vertices()) {
        for (std::size_t v = map.size(); v < guest.num_vertices(); ++v)
            out.push_back({ViolationKind::unmapped, {static_cast<Vertex>(v)}, {}});
    }
    std::unordered_map<Vertex, Vertex> owner;
    bool all_mapped = out.empty();
    for (std::size_t v = 0; v < std::min(map.size(), guest.num_vertices()); ++v) {
        const Vertex u = map[v];
        if (u == kUnmapped) {
            out.push_back({ViolationKind::unmapped, {static_cast<Vertex>(v)}, {}});
            all_mapped = false;
            continue;
        }
        if (u >= host.num_vertices()) {
            out.push_back({ViolationKind::out_of_range, {static_cast<Vertex>(v)}, {u}});
            all_mapped = false;
            continue;
        }
        auto [it, inserted] = owner.emplace(u, static_cast<Vertex>(v));
        if (!inserted) out.push_back({ViolationKind::collision, {it->second, static_cast<Vertex>(v)}, {u}});
    }
    if (guest.uniformity() != host.uniformity()) {
        if (guest.num_edges() > 0)
            for (std::size_t e = 0; e < guest.num_edges(); ++e) {
                auto ge = guest.edge(e);
                out.push_back({ViolationKind::missing_edge, {ge.begin(), ge.end()}, {}});
            }
        return out;
    }
    for (std::size_t e = 0; e < guest.num_edges(); ++e) {
        auto ge = guest.edge(e);
        std::vector<Vertex> image;
        bool usable = all_mapped;
        for (Vertex x : ge) {
            if (x >= map.size() || map[x] == kUnmapped || map[x] >= host.num_vertices()) {
                usable = false;
                break;
            }
            image.push_back(map[x]);
        }
        if (!usable) continue;
        std::ranges::sort(image);
        const bool distinct = std::adjacent_find(image.begin(), image.end()) == image.end();
        if (!distinct || !host.has_edge(image))
            out.push_back({ViolationKind::missing_edge, {ge.begin(), ge.end()}, image});
    }
    return out;
}

// ---------------------------------------------------------------------------

BacktrackResult backtrack_embed(const Hypergraph& guest, const Hypergraph& host, std::uint64_t node_budget) {
    if (guest.uniformity() != host.uniformity()) throw std::invalid_argument("guest and host uniformity differ");
    return backtrack_embed(guest, host, LinkIndex(host), node_budget);
}

BacktrackResult backtrack_embed(const Hypergraph& guest, const Hypergraph& host, const LinkIndex& host_links,
                                std::uint64_t node_budget) {
    if (guest.uniformity() != host.uniformity()) throw std::invalid_argument("guest and host uniformity differ");
    BacktrackResult result;
    const std::size_t n = guest.num_vertices();
    if (n > host.num_vertices()) return result;

    const auto ordering = degeneracy_ordering(guest).ordering;
    std::vector<std::vector<VertexSet>> back_links(n);
    for (std::size_t t = 0; t < n; ++t) back_links[t] = back_link(guest, ordering, t);

    std::vector<Vertex> map(n, kUnmapped);
    std::vector<bool> used(host.num_vertices(), false);
    const auto host_n = static_cast<Vertex>(host.num_vertices());
    bool exhausted = false;

    auto dfs = [&](auto&& self, std::size_t t) -> bool {
        if (t == n) return true;
        std::vector<VertexSet> image;
        image.reserve(back_links[t].size());
        for (const auto& b : back_links[t]) {
            VertexSet mapped;
            for (Vertex x : b) mapped.push_back(map[x]);
            std::ranges::sort(mapped);
            image.push_back(std::move(mapped));
        }
        const Vertex v = ordering.order[t];
        for (Vertex u : intersect_links(host_links, image, 0, host_n, used)) {
            if (result.nodes >= node_budget) {
                exhausted = true;
                return false;
            }
            ++result.nodes;
            map[v] = u;
            used[u] = true;
            if (self(self, t + 1)) return true;
            used[u] = false;
            map[v] = kUnmapped;
            if (exhausted) return false;
        }
        return false;
    };

    if (dfs(dfs, 0)) {
        if (!verify_embedding(guest, host, map).empty())
            throw InvariantError("backtracking produced an invalid embedding");
        result.status = SearchStatus::found;
        result.map = std::move(map);
    } else {
        result.status = exhausted ? SearchStatus::budget_exhausted : SearchStatus::none;
    }
    return result;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<VertexSet> subsets_of_prefix(std::size_t prefix, int size) {
    std::vector<VertexSet> out;
    if (size < 0 || static_cast<std::size_t>(size) > prefix) return out;
    VertexSet cur;
    auto rec = [&](auto&& self, Vertex start) -> void {
        if (static_cast<int>(cur.size()) == size) {
            out.push_back(cur);
            return;
        }
        for (Vertex v = start; v < prefix; ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

unsigned long long binom_ull(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    unsigned long long out = 1;
    for (std::size_t i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
    return out;
}

}  // namespace

std::uint64_t enumerate_class(int r, std::size_t n, std::size_t D, const EnumerationOptions& options,
                              const std::function<bool(const Hypergraph&)>& visit) {
    if (r < 2 || r > kMaxUniformity) throw std::invalid_argument("unsupported uniformity");
    const long double states = static_cast<long double>(binom_ull(n, static_cast<std::size_t>(r))) * D * n;
    if (states > static_cast<long double>(options.state_cap))
        throw ResourceCapError("enumeration of r=" + std::to_string(r) + " n=" + std::to_string(n) + " D=" +
                               std::to_string(D) + " exceeds the state cap " + std::to_string(options.state_cap));

    std::vector<std::vector<VertexSet>> choices(n);
    for (std::size_t i = 0; i < n; ++i) choices[i] = subsets_of_prefix(i, r - 1);

    std::vector<std::size_t> degree(n, 0);
    std::vector<Vertex> flat;
    std::uint64_t visited = 0;
    bool stop = false;

    auto step = [&](auto&& self, std::size_t i) -> void {
        if (stop) return;
        if (i == n) {
            Hypergraph h(r, n, flat);
            if (options.connected_only && !is_connected(h)) return;
            ++visited;
            if (!visit(h)) stop = true;
            return;
        }
        const auto& opts = choices[i];
        const std::size_t lo = (options.connected_only && i + 1 >= static_cast<std::size_t>(r)) ? 1 : 0;
        const std::size_t hi = std::min(D, opts.size());
        // Choose a set of back-edges of size in [lo, hi] by index, in increasing order.
        std::vector<std::size_t> picked;
        auto choose = [&](auto&& rec, std::size_t start) -> void {
            if (stop) return;
            if (picked.size() >= lo) {
                self(self, i + 1);
                if (stop) return;
            }
            if (picked.size() == hi) return;
            for (std::size_t c = start; c < opts.size(); ++c) {
                const auto& b = opts[c];
                if (options.degree_cap) {
                    const std::size_t cap = *options.degree_cap;
                    if (degree[i] + 1 > cap) return;
                    bool fits = true;
                    for (Vertex x : b)
                        if (degree[x] + 1 > cap) fits = false;
                    if (!fits) continue;
                }
                picked.push_back(c);
                for (Vertex x : b) ++degree[x];
                ++degree[i];
                flat.insert(flat.end(), b.begin(), b.end());
                flat.push_back(static_cast<Vertex>(i));
                rec(rec, c + 1);
                flat.resize(flat.size() - static_cast<std::size_t>(r));
                --degree[i];
                for (Vertex x : b) --degree[x];
                picked.pop_back();
                if (stop) return;
            }
        };
        choose(choose, 0);
    };
    step(step, 0);
    return visited;
}

UniversalityResult universality_check(const Hypergraph& host, int r, std::size_t n, std::size_t D,
                                      std::uint64_t node_budget, const EnumerationOptions& options) {
    if (host.uniformity() != r) throw std::invalid_argument("host uniformity differs from r");
    const LinkIndex links(host);
    UniversalityResult result;
    std::uint64_t rank = 0;
    enumerate_class(r, n, D, options, [&](const Hypergraph& g) {
        const auto found = backtrack_embed(g, host, links, node_budget);
        if (found.status == SearchStatus::found) {
            ++result.checked;
            ++rank;
            return true;
        }
        result.status = found.status == SearchStatus::none ? UniversalityStatus::counterexample
                                                           : UniversalityStatus::undecided;
        if (found.status == SearchStatus::none) ++result.checked;
        result.guest = g;
        result.rank = rank;
        return false;
    });
    return result;
}

// ---------------------------------------------------------------------------

std::vector<SubblockBackLinks> harvest_back_links(const Hypergraph& guest, const DegeneracyOrdering& ordering,
                                                  const BlockGraph& host, const std::vector<Vertex>& map) {
    const auto& params = host.params();
    const int J = params.num_subblocks();
    std::vector<BackLinkMultiset> grouped(static_cast<std::size_t>(params.N * J));
    for (std::size_t t = 0; t < guest.num_vertices(); ++t) {
        const Vertex x = ordering.order[t];
        if (map[x] == kUnmapped) continue;
        std::vector<VertexSet> image;
        bool complete = true;
        for (const auto& b : back_link(guest, ordering, t)) {
            VertexSet mapped;
            for (Vertex y : b) {
                if (map[y] == kUnmapped) complete = false;
                mapped.push_back(map[y]);
            }
            std::ranges::sort(mapped);
            image.push_back(std::move(mapped));
        }
        if (!complete) continue;
        std::ranges::sort(image);
        const auto loc = host.locate(map[x]);
        grouped[static_cast<std::size_t>((loc.block - 1) * J + (loc.subblock - 1))].entries.push_back(std::move(image));
    }
    std::vector<SubblockBackLinks> out;
    for (int k = 1; k <= params.N; ++k)
        for (int j = 1; j <= J; ++j) {
            auto& ms = grouped[static_cast<std::size_t>((k - 1) * J + (j - 1))];
            if (ms.entries.empty()) continue;
            out.push_back({k, j, std::move(ms)});
        }
    return out;
}

std::string WellBehavedResult::describe() const {
    switch (clause) {
        case WbClause::none: return "well-behaved";
        case WbClause::wb1:
            return "WB1: entry " + std::to_string(entry) + " has " + std::to_string(observed) + " sets > D = " +
                   std::to_string(static_cast<long long>(limit));
        case WbClause::wb2:
            return "WB2: host vertex " + std::to_string(vertex) + " in block " + std::to_string(block) + " lies in " +
                   std::to_string(observed) + " entries > Delta_" + std::to_string(block - 1) + " = " +
                   std::to_string(static_cast<double>(limit));
        case WbClause::wb3:
            return "WB3: sub-block (" + std::to_string(block) + "," + std::to_string(subblock) + ") has " +
                   std::to_string(observed) + " covered vertices > " + std::to_string(static_cast<double>(limit));
    }
    return "unknown";
}

WellBehavedResult check_well_behaved(const BlockGraph& host, const BackLinkMultiset& ms, bool check_wb3) {
    const auto& params = host.params();
    WellBehavedResult out;
    for (std::size_t i = 0; i < ms.entries.size(); ++i) {
        if (ms.entries[i].size() > static_cast<std::size_t>(params.D())) {
            out.clause = WbClause::wb1;
            out.entry = i;
            out.observed = ms.entries[i].size();
            out.limit = params.D();
            return out;
        }
    }

    std::unordered_map<Vertex, std::size_t> multiplicity;
    for (const auto& entry : ms.entries) {
        VertexSet vs;
        for (const auto& b : entry) vs.insert(vs.end(), b.begin(), b.end());
        std::ranges::sort(vs);
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        for (Vertex u : vs) {
            if (u >= host.num_vertices()) throw std::invalid_argument("multiset mentions a vertex outside the host");
            ++multiplicity[u];
        }
    }
    std::vector<std::pair<Vertex, std::size_t>> counts(multiplicity.begin(), multiplicity.end());
    std::ranges::sort(counts);
    for (const auto& [u, c] : counts) {
        const auto loc = host.locate(u);
        const long double limit = params.delta[static_cast<std::size_t>(loc.block - 1)];
        if (static_cast<long double>(c) > limit) {
            out.clause = WbClause::wb2;
            out.vertex = u;
            out.block = loc.block;
            out.observed = c;
            out.limit = limit;
            return out;
        }
    }
    if (!check_wb3) return out;

    std::vector<std::vector<std::size_t>> covered(static_cast<std::size_t>(params.N),
                                                  std::vector<std::size_t>(static_cast<std::size_t>(params.num_subblocks()), 0));
    for (const auto& [u, c] : counts) {
        const auto loc = host.locate(u);
        ++covered[static_cast<std::size_t>(loc.block - 1)][static_cast<std::size_t>(loc.subblock - 1)];
    }
    for (int k = 1; k <= params.N; ++k)
        for (int j = 1; j <= params.num_subblocks(); ++j) {
            const std::size_t c = covered[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
            // |V cap W_kj| <= |W_kj| / 2, compared as 2c <= |W_kj|
            if (2 * c > params.subblock_size(k, j)) {
                out.clause = WbClause::wb3;
                out.block = k;
                out.subblock = j;
                out.observed = c;
                out.limit = static_cast<long double>(params.subblock_size(k, j)) / 2;
                return out;
            }
        }
    return out;
}

double candidate_density_bound(const ModelParams& params, std::size_t t, int k) {
    if (t == 0) return 0;
    const long double log_n = std::log2(static_cast<long double>(params.n()));
    const long double loglog_n = std::log2(log_n);
    const long double exponent = std::pow(static_cast<long double>(params.D()), 1 - k) - 1;
    const long double log_term = std::log2(static_cast<long double>(t) / 4) + 2 * std::log2(log_n) +
                                 params.D() * std::log2(loglog_n) + exponent * log_n;
    return static_cast<double>(std::min(1.0L / 16, std::exp2(log_term)));
}

DensityMeasurement measure_candidate_density(const BlockGraph& host, const BackLinkMultiset& ms, int k, int j) {
    const Vertex begin = host.subblock_begin(k, j);
    const Vertex end = host.subblock_end(k, j);
    if (begin >= end)
        throw std::invalid_argument("sub-block (" + std::to_string(k) + "," + std::to_string(j) + ") is empty");
    const std::vector<bool> none_used(host.num_vertices(), false);
    std::vector<bool> hit(end - begin, false);
    for (const auto& entry : ms.entries)
        for (Vertex u : intersect_links(host.links(), entry, begin, end, none_used)) hit[u - begin] = true;

    DensityMeasurement out;
    out.size = end - begin;
    out.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
    out.observed = static_cast<double>(out.hits) / static_cast<double>(out.size);
    out.bound = candidate_density_bound(host.params(), ms.size(), k);
    return out;
}

}  // namespace hyperuni
