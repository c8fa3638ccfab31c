#include "hyperuni/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "hyperuni/errors.hpp"
#include "hyperuni/random.hpp"

namespace hyperuni {

namespace {

constexpr int kRedrawAttempts = 100;

// Floyd's algorithm: a uniform `k`-subset of `pool`, ascending.
VertexSet uniform_subset(const std::vector<Vertex>& pool, std::size_t k, Rng& rng) {
    std::set<std::size_t> picked;
    for (std::size_t j = pool.size() - k; j < pool.size(); ++j) {
        std::uniform_int_distribution<std::size_t> d(0, j);
        const std::size_t t = d(rng);
        if (!picked.insert(t).second) picked.insert(j);
    }
    VertexSet out;
    for (auto i : picked) out.push_back(pool[i]);
    std::ranges::sort(out);
    return out;
}

// Sequential weighted draw without replacement.
VertexSet weighted_subset(std::size_t prefix, std::size_t k, const std::vector<std::size_t>& degree, double alpha,
                          Rng& rng) {
    std::vector<double> weight(prefix);
    for (std::size_t v = 0; v < prefix; ++v) weight[v] = std::pow(static_cast<double>(degree[v] + 1), alpha);
    VertexSet out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t draw = 0; draw < k; ++draw) {
        double total = 0;
        for (double w : weight) total += w;
        double target = unit(rng) * total;
        std::size_t chosen = prefix;
        for (std::size_t v = 0; v < prefix; ++v) {
            if (weight[v] == 0) continue;
            chosen = v;
            target -= weight[v];
            if (target < 0) break;
        }
        out.push_back(static_cast<Vertex>(chosen));
        weight[chosen] = 0;
    }
    std::ranges::sort(out);
    return out;
}

void check_spec(const GenSpec& spec, GuestFamily family) {
    if (spec.family != family) throw std::invalid_argument("generator called with a different family");
    if (spec.r < 2 || spec.r > kMaxUniformity) throw std::invalid_argument("r out of range");
    if (spec.n < static_cast<std::size_t>(spec.r)) throw std::invalid_argument("n must be at least r");
    const std::size_t min_d = family == GuestFamily::capped ? 1 : 2;
    if (spec.D < min_d) throw std::invalid_argument("D too small for family " + std::string(to_string(family)));
    if (spec.min_back_degree > spec.D) throw std::invalid_argument("min back-degree exceeds D");
}

template <typename Draw>
Hypergraph grow(const GenSpec& spec, Rng& rng, Draw&& draw) {
    const auto k = static_cast<std::size_t>(spec.r - 1);
    std::vector<std::size_t> degree(spec.n, 0);
    std::vector<Vertex> flat;
    std::uniform_int_distribution<std::size_t> count(spec.min_back_degree, spec.D);
    for (std::size_t i = k; i < spec.n; ++i) {
        const std::size_t d = count(rng);
        std::set<VertexSet> chosen;
        for (std::size_t e = 0; e < d; ++e) {
            for (int attempt = 0; attempt < kRedrawAttempts; ++attempt) {
                VertexSet b = draw(i, degree);
                if (chosen.insert(b).second) {
                    for (Vertex x : b) ++degree[x];
                    ++degree[i];
                    break;
                }
            }
        }
        for (const auto& b : chosen) {
            flat.insert(flat.end(), b.begin(), b.end());
            flat.push_back(static_cast<Vertex>(i));
        }
    }
    return Hypergraph(spec.r, spec.n, std::move(flat));
}

}  // namespace

std::string_view to_string(GuestFamily family) noexcept {
    switch (family) {
        case GuestFamily::uniform: return "uniform";
        case GuestFamily::capped: return "capped";
        case GuestFamily::skew: return "skew";
    }
    return "unknown";
}

GuestFamily parse_family(std::string_view text) {
    if (text == "uniform") return GuestFamily::uniform;
    if (text == "capped") return GuestFamily::capped;
    if (text == "skew") return GuestFamily::skew;
    throw std::invalid_argument("unknown family '" + std::string(text) + "' (expected uniform, capped or skew)");
}

Hypergraph gen_uniform(const GenSpec& spec) {
    check_spec(spec, GuestFamily::uniform);
    Rng rng = make_rng(spec.seed);
    const auto k = static_cast<std::size_t>(spec.r - 1);
    std::vector<Vertex> pool;
    return grow(spec, rng, [&](std::size_t i, const std::vector<std::size_t>&) {
        pool.resize(i);
        for (std::size_t v = 0; v < i; ++v) pool[v] = static_cast<Vertex>(v);
        return uniform_subset(pool, k, rng);
    });
}

Hypergraph gen_skew(const GenSpec& spec) {
    check_spec(spec, GuestFamily::skew);
    if (!std::isfinite(spec.alpha)) throw std::invalid_argument("alpha must be finite");
    Rng rng = make_rng(spec.seed);
    const auto k = static_cast<std::size_t>(spec.r - 1);
    return grow(spec, rng, [&](std::size_t i, const std::vector<std::size_t>& degree) {
        return weighted_subset(i, k, degree, spec.alpha, rng);
    });
}

Hypergraph gen_capped(const GenSpec& spec) {
    check_spec(spec, GuestFamily::capped);
    Rng rng = make_rng(spec.seed);
    const auto k = static_cast<std::size_t>(spec.r - 1);
    const std::size_t cap = static_cast<std::size_t>(spec.r) * spec.D;  // eligible while degree <= rD
    std::vector<std::size_t> degree(spec.n, 0);
    std::vector<Vertex> flat;
    std::uniform_int_distribution<std::size_t> count(1, spec.D);
    std::vector<Vertex> eligible;
    for (std::size_t i = k; i < spec.n; ++i) {
        const std::size_t d = count(rng);
        std::set<VertexSet> chosen;
        for (std::size_t e = 0; e < d; ++e) {
            eligible.clear();
            for (std::size_t v = 0; v < i; ++v)
                if (degree[v] <= cap) eligible.push_back(static_cast<Vertex>(v));
            if (eligible.size() < k)
                throw InvariantError("capped generator: only " + std::to_string(eligible.size()) +
                                     " eligible vertices before vertex " + std::to_string(i));
            // Every earlier vertex is already in the component of 0, so any
            // back-edge meets the connected prefix.
            for (int attempt = 0; attempt < kRedrawAttempts; ++attempt) {
                VertexSet b = uniform_subset(eligible, k, rng);
                if (chosen.insert(b).second) {
                    for (Vertex x : b) ++degree[x];
                    ++degree[i];
                    break;
                }
            }
        }
        for (const auto& b : chosen) {
            flat.insert(flat.end(), b.begin(), b.end());
            flat.push_back(static_cast<Vertex>(i));
        }
    }
    return Hypergraph(spec.r, spec.n, std::move(flat));
}

Hypergraph generate(const GenSpec& spec) {
    switch (spec.family) {
        case GuestFamily::uniform: return gen_uniform(spec);
        case GuestFamily::capped: return gen_capped(spec);
        case GuestFamily::skew: return gen_skew(spec);
    }
    throw std::invalid_argument("unknown family");
}

}  // namespace hyperuni
