#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "hyperuni/block_model.hpp"
#include "hyperuni/errors.hpp"

using namespace hyperuni;

namespace {

ModelParams exact(int r, std::uint64_t n, int D) { return compute_params({r, n, D, ModelMode::paper_exact, 1, 1}); }

// Pattern of an r-set computed from block sizes alone.
Pattern pattern_of(const ModelParams& p, const std::vector<Vertex>& e) {
    Pattern out(static_cast<std::size_t>(p.N), 0);
    for (Vertex v : e) {
        std::uint64_t start = 0;
        for (int k = 0; k < p.N; ++k) {
            if (v < start + p.block_sizes[static_cast<std::size_t>(k)]) {
                ++out[static_cast<std::size_t>(k)];
                break;
            }
            start += p.block_sizes[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

std::vector<std::vector<Vertex>> split(const StratumSample& s, int r) {
    std::vector<std::vector<Vertex>> out;
    for (std::size_t i = 0; i < s.edges.size(); i += static_cast<std::size_t>(r))
        out.emplace_back(s.edges.begin() + static_cast<long>(i), s.edges.begin() + static_cast<long>(i) + r);
    return out;
}

}  // namespace

TEST(Params, PaperExactExample) {
    const auto p = exact(2, 65536, 2);
    ASSERT_EQ(p.N, 3);
    ASSERT_EQ(p.delta.size(), 4u);
    EXPECT_DOUBLE_EQ(static_cast<double>(p.delta[0]), 131072.0);
    EXPECT_NEAR(static_cast<double>(p.delta[1]), 256.0, 1e-9);
    EXPECT_NEAR(static_cast<double>(p.delta[2]), 16.0, 1e-9);
    EXPECT_NEAR(static_cast<double>(p.delta[3]), 4.0, 1e-9);
    EXPECT_EQ(p.block_sizes, (std::vector<std::uint64_t>{460800, 7372800, 29491200}));
    EXPECT_EQ(p.num_subblocks(), 16);
    for (int k = 1; k <= p.N; ++k) {
        std::uint64_t sum = 0;
        for (int j = 1; j <= p.num_subblocks(); ++j) sum += p.subblock_size(k, j);
        EXPECT_EQ(sum, p.block_size(k));
    }
    EXPECT_EQ(p.total_vertices(), 460800u + 7372800u + 29491200u);
}

TEST(Params, BlockCountBracket) {
    // loglog n / (2 log D) <= N < loglog n and Delta_{N-1} in [3^D, 3^(D^2)].
    const auto p = exact(2, 65536, 2);
    const double ll = std::log2(std::log2(65536.0));
    EXPECT_LE(ll / (2 * std::log2(2.0)), p.N);
    EXPECT_LT(p.N, ll);
    EXPECT_GE(p.delta[static_cast<std::size_t>(p.N - 1)], 9.0L);
    EXPECT_LE(p.delta[static_cast<std::size_t>(p.N - 1)], 81.0L);
}

TEST(Params, PstarAtTwoToTheForty) {
    const auto p = exact(2, std::uint64_t{1} << 40, 2);
    // 4 * 40 * (log2 40)^3 / 2^20, evaluated independently.
    EXPECT_NEAR(static_cast<double>(p.pstar), 0.02299995978965521, 1e-12);
    EXPECT_EQ(edge_probability(p, {0, 2, 0, 0}), 1.0L);
}

TEST(Params, Errors) {
    EXPECT_THROW(compute_params({2, 16, 2, ModelMode::scaled, 1, 1}), std::invalid_argument);
    EXPECT_THROW(compute_params({1, 65536, 2, ModelMode::scaled, 1, 1}), std::invalid_argument);
    EXPECT_THROW(compute_params({2, 65536, 1, ModelMode::scaled, 1, 1}), std::invalid_argument);
    EXPECT_THROW(compute_params({2, 65536, 2, ModelMode::scaled, 0, 1}), std::invalid_argument);
    EXPECT_THROW(compute_params({2, 65536, 2, ModelMode::scaled, 1, -1}), std::invalid_argument);
    EXPECT_NO_THROW(compute_params({2, 65536, 2, ModelMode::scaled, 1, 0}));
    EXPECT_EQ(parse_mode("paper-exact"), ModelMode::paper_exact);
    EXPECT_EQ(to_string(ModelMode::scaled), "scaled");
    EXPECT_THROW(parse_mode("exact"), std::invalid_argument);
}

TEST(Params, PaperExactIgnoresKnobs) {
    const auto a = compute_params({2, 65536, 2, ModelMode::paper_exact, 0.5, 7});
    const auto b = exact(2, 65536, 2);
    EXPECT_EQ(a.block_sizes, b.block_sizes);
    EXPECT_EQ(a.pstar, b.pstar);
    EXPECT_EQ(a.config.size_scale, 900.0);
    EXPECT_EQ(a.config.pstar_mult, 1.0);
}

TEST(Params, InvariantsAcrossGrid) {
    for (int r : {2, 3, 4})
        for (int D : {2, 3})
            for (std::uint64_t n : {std::uint64_t{1} << 20, std::uint64_t{1} << 30}) {
                const auto p = compute_params({r, n, D, ModelMode::scaled, 1e-3, 1});
                if (p.N < 2) continue;
                // Delta decreasing, Delta_0 = D n, Delta_k = n^(D^-k).
                EXPECT_NEAR(static_cast<double>(p.delta[0]), static_cast<double>(D) * static_cast<double>(n), 1e-3);
                for (int k = 1; k <= p.N; ++k) {
                    EXPECT_LT(p.delta[static_cast<std::size_t>(k)], p.delta[static_cast<std::size_t>(k - 1)]);
                    EXPECT_NEAR(std::log(static_cast<double>(p.delta[static_cast<std::size_t>(k)])),
                                std::log(static_cast<double>(n)) * std::pow(D, -k), 1e-9);
                }
                EXPECT_EQ(p.num_subblocks(), static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))));
                EXPECT_EQ(block_count(n, D), p.N);
            }
}

TEST(EdgeProbability, Examples) {
    const auto p = exact(2, 65536, 2);
    // Inside W_1 the clamp always binds in paper-exact mode.
    EXPECT_EQ(edge_probability(p, {2, 0, 0}), 1.0L);
    auto q = compute_params({2, 100, 2, ModelMode::scaled, 0.1, 1});
    ASSERT_GE(q.pstar, 1.0L);
    for (const auto& pat : enumerate_patterns(q)) EXPECT_EQ(edge_probability(q, pat), 1.0L);

    EXPECT_THROW(edge_probability(p, {0, 0, 0}), std::invalid_argument);
    EXPECT_THROW(edge_probability(p, {1, 0}), std::invalid_argument);
    EXPECT_THROW(edge_probability(p, {3, -1, 0}), std::invalid_argument);
}

TEST(EdgeProbability, MatchesFormula) {
    const auto p = compute_params({3, std::uint64_t{1} << 30, 2, ModelMode::scaled, 1e-3, 1e-6});
    for (const auto& pat : enumerate_patterns(p)) {
        long double x = p.pstar;
        for (int k = 0; k < p.N; ++k) x *= std::pow(p.delta[static_cast<std::size_t>(k + 1)], pat[static_cast<std::size_t>(k)]);
        EXPECT_NEAR(static_cast<double>(edge_probability(p, pat)), static_cast<double>(std::min(1.0L, x)), 1e-15);
    }
}

TEST(Strata, CardinalityExamples) {
    const auto p = fixtures::shaped_params(2, 2, {{4}, {5}});
    EXPECT_EQ(stratum_cardinality(p, {1, 1}), BigInt(20));
    EXPECT_EQ(stratum_cardinality(p, {2, 0}), BigInt(6));
    EXPECT_EQ(stratum_cardinality(p, {0, 2}), BigInt(10));
    EXPECT_THROW(stratum_cardinality(p, {0, 0}), std::invalid_argument);

    const auto big = exact(2, 65536, 2);
    EXPECT_EQ(stratum_cardinality(big, {0, 0, 2}), BigInt(29491200) * 29491199 / 2);
}

TEST(Strata, PatternsCoverAllRSets) {
    const auto p = compute_params({3, std::uint64_t{1} << 30, 2, ModelMode::scaled, 1e-3, 1});
    const auto pats = enumerate_patterns(p);
    EXPECT_EQ(pats.size(), oracles::choose(static_cast<std::uint64_t>(p.N + 2), 3));
    EXPECT_TRUE(std::is_sorted(pats.begin(), pats.end(), std::greater<>()));
    BigInt total = 0;
    for (const auto& pat : pats) total += stratum_cardinality(p, pat);
    const BigInt v = p.total_vertices();
    EXPECT_EQ(total, v * (v - 1) * (v - 2) / 6);
}

TEST(ExpectedEdges, ZeroMultiplierLeavesDeterministicPart) {
    const auto p = compute_params({2, 2000, 2, ModelMode::scaled, 1, 0});
    const auto e = expected_edges(p);
    EXPECT_EQ(e.expected, e.deterministic);
    BigInt det = 0;
    for (const auto& pat : enumerate_patterns(p))
        if (edge_probability(p, pat) == 1.0L) det += stratum_cardinality(p, pat);
    EXPECT_EQ(e.deterministic, BigFloat(det));
}

TEST(ExpectedEdges, PaperExactBounds) {
    for (auto [r, n, D] : {std::tuple{2, std::uint64_t{65536}, 2}, std::tuple{3, std::uint64_t{1} << 30, 2}}) {
        const auto p = exact(r, n, D);
        const auto e = expected_edges(p);
        EXPECT_GE(e.expected, lower_bound_value(r, n, D));
        // The complete W_1 stratum alone exceeds n^(r - r/D).
        Pattern w1(static_cast<std::size_t>(p.N), 0);
        w1[0] = r;
        EXPECT_GT(BigFloat(stratum_cardinality(p, w1)),
                  boost::multiprecision::pow(BigFloat(n), BigFloat(r) - BigFloat(r) / D));
    }
}

TEST(LowerBound, Values) {
    // n^(r - 1/D) / (100 r^2 D).
    EXPECT_NEAR(static_cast<double>(lower_bound_value(2, 100, 1)), 0.25, 1e-15);
    EXPECT_NEAR(static_cast<double>(lower_bound_value(2, 1, 2)), 1.0 / 800, 1e-18);
    EXPECT_NEAR(static_cast<double>(lower_bound_value(3, 1000, 3)), std::pow(1000.0, 3 - 1.0 / 3) / 2700, 1e-6);
}

TEST(Sampling, FullStrataEmitEveryRSet) {
    auto p = fixtures::shaped_params(3, 2, {{3, 1}, {2, 2}, {5, 0}});
    p.pstar = 1;
    const auto all = oracles::all_r_sets(p.total_vertices(), 3);
    const auto pats = enumerate_patterns(p);
    for (std::size_t i = 0; i < pats.size(); ++i) {
        const auto s = sample_stratum(p, 5, i);
        std::set<std::vector<Vertex>> want;
        for (const auto& e : all)
            if (pattern_of(p, e) == pats[i]) want.insert(e);
        const auto got = split(s, 3);
        EXPECT_EQ(std::set<std::vector<Vertex>>(got.begin(), got.end()), want);
        EXPECT_EQ(got.size(), want.size());
        EXPECT_EQ(s.cardinality, want.size());
    }
}

TEST(Sampling, ZeroProbabilityStrataAreEmpty) {
    auto p = fixtures::shaped_params(2, 2, {{4}, {6}});
    p.pstar = 0;
    for (const auto& s : sample_strata(p, 3)) EXPECT_TRUE(s.edges.empty());
}

TEST(Sampling, EdgesLieInTheirStratum) {
    const auto p = compute_params({3, 2000, 2, ModelMode::scaled, 0.1, 1e-7});
    const auto strata = sample_strata(p, 11);
    for (const auto& s : strata) {
        const auto edges = split(s, 3);
        std::set<std::vector<Vertex>> seen;
        for (const auto& e : edges) {
            ASSERT_TRUE(std::is_sorted(e.begin(), e.end()));
            ASSERT_TRUE(std::adjacent_find(e.begin(), e.end()) == e.end());
            ASSERT_EQ(pattern_of(p, e), s.pattern);
            ASSERT_TRUE(seen.insert(e).second) << "duplicate edge";
        }
        if (s.probability == 1.0L) EXPECT_EQ(edges.size(), s.cardinality);
    }
}

TEST(Sampling, DeterministicAcrossThreadCounts) {
    const auto p = compute_params({3, 2000, 2, ModelMode::scaled, 0.1, 1e-7});
    const auto one = sample_model(p, 99, {}, 1);
    const auto four = sample_model(p, 99, {}, 4);
    EXPECT_EQ(one.graph(), four.graph());
    EXPECT_FALSE(sample_model(p, 100, {}, 2).graph() == one.graph());

    const auto strata = sample_strata(p, 99, {}, 3);
    for (std::size_t i = 0; i < strata.size(); ++i) EXPECT_EQ(sample_stratum(p, 99, i).edges, strata[i].edges);
}

// Each r-set of a stratum must appear with frequency p, whichever path draws it.
TEST(Sampling, InclusionFrequenciesMatchProbability) {
    auto p = fixtures::shaped_params(2, 2, {{4}, {6}});
    for (long double prob : {0.05L, 0.5L}) {
        p.pstar = prob;
        const std::size_t index = 1;  // pattern (1, 1), 24 r-sets
        ASSERT_EQ(enumerate_patterns(p)[index], (Pattern{1, 1}));
        const int seeds = 4000;
        std::map<std::vector<Vertex>, int> hits;
        for (int s = 0; s < seeds; ++s)
            for (const auto& e : split(sample_stratum(p, static_cast<std::uint64_t>(s), index), 2)) ++hits[e];
        ASSERT_EQ(hits.size(), 24u);
        const double q = static_cast<double>(prob);
        const double sd = std::sqrt(q * (1 - q) / seeds);
        for (const auto& [e, h] : hits) EXPECT_NEAR(h / static_cast<double>(seeds), q, 5 * sd);
    }
}

TEST(Sampling, CapsAreEnforced) {
    const auto p = compute_params({3, 2000, 2, ModelMode::scaled, 0.1, 1e-7});
    EXPECT_THROW(sample_model(p, 1, {10, 50'000'000}), ResourceCapError);
    EXPECT_THROW(sample_model(p, 1, {20'000'000, 10}), ResourceCapError);
}

TEST(BlockGraph, PartitionAndLinks) {
    const auto p = compute_params({2, 100, 2, ModelMode::scaled, 0.1, 0.02});
    const auto host = sample_model(p, 4);
    const auto offs = block_offsets(p);
    ASSERT_EQ(offs.size(), static_cast<std::size_t>(p.N) + 1);
    EXPECT_EQ(offs.back(), p.total_vertices());
    for (Vertex v = 0; v < host.num_vertices(); ++v) {
        const auto loc = host.locate(v);
        EXPECT_GE(v, host.subblock_begin(loc.block, loc.subblock));
        EXPECT_LT(v, host.subblock_end(loc.block, loc.subblock));
        EXPECT_GE(v, host.block_begin(loc.block));
        EXPECT_LT(v, host.block_end(loc.block));
    }
    EXPECT_THROW(host.locate(static_cast<Vertex>(host.num_vertices())), std::out_of_range);
    for (const auto& e : host.graph().edge_list()) {
        const auto pat = host.pattern_of(e);
        int sum = 0;
        for (int x : pat) sum += x;
        EXPECT_EQ(sum, 2);
        for (std::size_t i = 0; i < e.size(); ++i) {
            VertexSet key = e;
            const Vertex u = key[i];
            key.erase(key.begin() + static_cast<long>(i));
            const auto m = host.links().members(key);
            EXPECT_TRUE(std::binary_search(m.begin(), m.end(), u));
        }
    }
    EXPECT_THROW(BlockGraph(p, Hypergraph(2, 5)), std::invalid_argument);
    EXPECT_THROW(BlockGraph(p, Hypergraph(3, p.total_vertices())), std::invalid_argument);
}
