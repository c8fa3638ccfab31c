#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "hyperuni/hypergraph.hpp"

namespace hyperuni {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

enum class ModelMode { paper_exact, scaled };

std::string_view to_string(ModelMode mode) noexcept;
/// Accepts "paper-exact" and "scaled".
ModelMode parse_mode(std::string_view text);

// User-facing knobs of the block model. In paper-exact mode `size_scale` and
// `pstar_mult` are ignored and resolved to 100*3^D and 1.
struct ModelConfig {
    int r = 2;
    std::uint64_t n = 0;
    int D = 2;
    ModelMode mode = ModelMode::scaled;
    double size_scale = 1.0;
    double pstar_mult = 1.0;
};

// Block-count vector over blocks 1..N: pattern[k-1] = |s intersect W_k|.
using Pattern = std::vector<int>;

// All derived quantities of the random block model.
//
// Blocks and sub-blocks are 1-based in the mathematical sense; the vectors
// below are indexed from 0 (block k lives at index k-1).
struct ModelParams {
    ModelConfig config;  // resolved: size_scale and pstar_mult hold the values in effect
    int N = 0;
    std::vector<long double> delta;  // delta[0..N]
    std::vector<std::uint64_t> block_sizes;
    std::vector<std::vector<std::uint64_t>> subblock_sizes;
    long double pstar = 0;

    int r() const noexcept { return config.r; }
    int D() const noexcept { return config.D; }
    std::uint64_t n() const noexcept { return config.n; }
    int num_subblocks() const noexcept {
        return subblock_sizes.empty() ? 0 : static_cast<int>(subblock_sizes.front().size());
    }
    std::uint64_t block_size(int k) const { return block_sizes.at(static_cast<std::size_t>(k - 1)); }
    std::uint64_t subblock_size(int k, int j) const {
        return subblock_sizes.at(static_cast<std::size_t>(k - 1)).at(static_cast<std::size_t>(j - 1));
    }
    std::uint64_t total_vertices() const;
};

/// Number of blocks: the smallest N >= 1 with n^(D^(1-N)) <= 3^(D^2).
int block_count(std::uint64_t n, int D);

/// ceil(log2 n) for n >= 2; the number of sub-blocks per block.
int subblock_count(std::uint64_t n);

/// Throws std::invalid_argument when r or D < 2, N < 2, or a knob is invalid
/// (size_scale <= 0, pstar_mult < 0).
ModelParams compute_params(const ModelConfig& config);

/// min{1, p* prod Delta_i^pi_i}. Throws std::invalid_argument on a malformed pattern.
long double edge_probability(const ModelParams& params, const Pattern& pattern);

/// prod_k C(|W_k|, pi_k), exact.
BigInt stratum_cardinality(const ModelParams& params, const Pattern& pattern);

/// Every pattern with sum r and pi_k <= r, in a fixed canonical order
/// (lexicographically decreasing). Its position is the stratum index.
std::vector<Pattern> enumerate_patterns(const ModelParams& params);

struct EdgeExpectation {
    BigFloat expected;           // sum over strata of p * M
    BigFloat deterministic;      // sum of M over strata with p = 1
    BigFloat closed_form_bound;  // 2 (20 3^D r)^r (loglog n)^(2r+1) (log n)^(2/D) n^(r-1/D)
};

EdgeExpectation expected_edges(const ModelParams& params);

/// n^(r-1/D) / (100 r^2 D).
BigFloat lower_bound_value(int r, std::uint64_t n, int D);

// ---------------------------------------------------------------------------
// Sampling

struct SampleCaps {
    std::uint64_t max_edges = 20'000'000;
    std::uint64_t max_vertices = 50'000'000;
};

struct StratumSample {
    std::size_t index = 0;
    Pattern pattern;
    std::uint64_t cardinality = 0;
    long double probability = 0;
    std::vector<Vertex> edges;  // flat, stride r

    std::size_t count(int r) const { return edges.size() / static_cast<std::size_t>(r); }
};

/// Vertex id where block k (1-based) starts; blocks are laid out contiguously.
std::vector<std::uint64_t> block_offsets(const ModelParams& params);

/// Samples every stratum independently. Stratum i uses the substream
/// derive_seed(seed, stratum, i), so the output is independent of `threads`.
/// `threads == 0` picks the HYPERUNI_THREADS / hardware default.
std::vector<StratumSample> sample_strata(const ModelParams& params, std::uint64_t seed,
                                         const SampleCaps& caps = {}, unsigned threads = 0);

// A sampled host: partition bookkeeping plus the link index used for
// candidate queries. Immutable after construction.
class BlockGraph {
public:
    struct Location {
        int block = 0;     // 1-based
        int subblock = 0;  // 1-based
    };

    BlockGraph(ModelParams params, Hypergraph graph);

    const ModelParams& params() const noexcept { return params_; }
    const Hypergraph& graph() const noexcept { return graph_; }
    const LinkIndex& links() const noexcept { return links_; }
    std::size_t num_vertices() const noexcept { return graph_.num_vertices(); }

    Vertex block_begin(int k) const { return static_cast<Vertex>(block_offsets_.at(static_cast<std::size_t>(k - 1))); }
    Vertex block_end(int k) const { return static_cast<Vertex>(block_offsets_.at(static_cast<std::size_t>(k))); }
    Vertex subblock_begin(int k, int j) const;
    Vertex subblock_end(int k, int j) const;

    Location locate(Vertex v) const;
    Pattern pattern_of(std::span<const Vertex> s) const;

private:
    ModelParams params_;
    Hypergraph graph_;
    LinkIndex links_;
    std::vector<std::uint64_t> block_offsets_;
    std::vector<std::vector<std::uint64_t>> subblock_offsets_;
};

/// Stratum `index` alone, drawn from the same substream sample_strata uses.
StratumSample sample_stratum(const ModelParams& params, std::uint64_t seed, std::size_t index,
                             const SampleCaps& caps = {});

BlockGraph sample_model(const ModelParams& params, std::uint64_t seed, const SampleCaps& caps = {},
                        unsigned threads = 0);

/// Worker count from HYPERUNI_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

// Block-graph file format (.bhg): the .hg format preceded by comment headers
//
//   #model r n D mode size_scale pstar_mult
//   #blocks N |W_1| ... |W_N|
//   #subblocks k J |W_k,1| ... |W_k,J|      (one line per block)
void write_bhg(std::ostream& out, const BlockGraph& g);
void write_bhg_file(const std::filesystem::path& path, const BlockGraph& g);
BlockGraph read_bhg(std::istream& in);
BlockGraph read_bhg_file(const std::filesystem::path& path);

}  // namespace hyperuni
