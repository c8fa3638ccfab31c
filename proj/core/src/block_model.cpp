#include "hyperuni/block_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hyperuni/errors.hpp"
#include "hyperuni/random.hpp"
#include "parallel.hpp"

namespace hyperuni {

namespace {

std::string pattern_string(const Pattern& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(p[i]);
    }
    return s + ")";
}

BigInt big_binomial(std::uint64_t n, int k) {
    if (k < 0 || static_cast<std::uint64_t>(k) > n) return 0;
    BigInt out = 1;
    for (int t = 0; t < k; ++t) {
        out *= BigInt(n - static_cast<std::uint64_t>(t));
        out /= t + 1;
    }
    return out;
}

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

// C(n, k) for small k, saturating at 2^64 - 1.
std::uint64_t binomial_u64(std::uint64_t n, int k) {
    if (k < 0 || static_cast<std::uint64_t>(k) > n) return 0;
    // C(n, t+1) = C(n, t) (n-t) / (t+1); dividing out the gcd first keeps
    // every intermediate no larger than the result.
    std::uint64_t out = 1;
    for (int t = 0; t < k; ++t) {
        const std::uint64_t g = std::gcd(out, static_cast<std::uint64_t>(t + 1));
        const std::uint64_t factor = (n - static_cast<std::uint64_t>(t)) / ((static_cast<std::uint64_t>(t) + 1) / g);
        if (__builtin_mul_overflow(out / g, factor, &out)) return kSaturated;
    }
    return out;
}

}  // namespace

std::string_view to_string(ModelMode mode) noexcept {
    return mode == ModelMode::paper_exact ? "paper-exact" : "scaled";
}

ModelMode parse_mode(std::string_view text) {
    if (text == "paper-exact") return ModelMode::paper_exact;
    if (text == "scaled") return ModelMode::scaled;
    throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected paper-exact or scaled)");
}

std::uint64_t ModelParams::total_vertices() const {
    std::uint64_t total = 0;
    for (auto s : block_sizes) total += s;
    return total;
}

int block_count(std::uint64_t n, int D) {
    if (n < 2 || D < 2) throw std::invalid_argument("block_count needs n >= 2 and D >= 2");
    // n^(D^(1-N)) <= 3^(D^2)  <=>  n <= 3^(D^(N+1)); 3^41 already exceeds 2^64.
    for (int N = 1;; ++N) {
        unsigned long long exponent = 1;
        bool big = false;
        for (int i = 0; i < N + 1; ++i) {
            exponent *= static_cast<unsigned long long>(D);
            if (exponent > 40) {
                big = true;
                break;
            }
        }
        if (big) return N;
        std::uint64_t bound = 1;  // 3^exponent <= 3^40 < 2^64
        for (unsigned long long i = 0; i < exponent; ++i) bound *= 3;
        if (n <= bound) return N;
    }
}

int subblock_count(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("subblock_count needs n >= 2");
    int j = 0;
    while (j < 64 && (std::uint64_t{1} << j) < n) ++j;
    return j;
}

ModelParams compute_params(const ModelConfig& config) {
    if (config.r < 2 || config.r > kMaxUniformity)
        throw std::invalid_argument("r must be in [2, " + std::to_string(kMaxUniformity) + "]");
    if (config.D < 2) throw std::invalid_argument("D must be >= 2");
    if (config.n < 2) throw std::invalid_argument("n must be >= 2");

    ModelParams p;
    p.config = config;
    if (config.mode == ModelMode::paper_exact) {
        p.config.size_scale = 100.0 * std::pow(3.0, config.D);
        p.config.pstar_mult = 1.0;
    }
    if (!(p.config.size_scale > 0) || !std::isfinite(p.config.size_scale))
        throw std::invalid_argument("size scale must be positive");
    if (!(p.config.pstar_mult >= 0) || !std::isfinite(p.config.pstar_mult))
        throw std::invalid_argument("pstar multiplier must be non-negative");

    const int D = config.D;
    const int r = config.r;
    const auto n = config.n;
    p.N = block_count(n, D);
    if (p.N < 2)
        throw std::invalid_argument("n = " + std::to_string(n) + " is too small for D = " + std::to_string(D) +
                                    ": the model needs at least two blocks (n^(1/D) must exceed 3^(D^2))");

    const long double log_n = std::log2(static_cast<long double>(n));
    p.delta.resize(static_cast<std::size_t>(p.N) + 1);
    p.delta[0] = static_cast<long double>(D) * static_cast<long double>(n);
    long double power = 1;
    for (int k = 1; k <= p.N; ++k) {
        power *= D;
        p.delta[static_cast<std::size_t>(k)] = std::exp2(log_n / power);
    }

    const long double numer =
        static_cast<long double>(p.config.size_scale) * static_cast<long double>(r) * static_cast<long double>(n);
    const int J = subblock_count(n);
    for (int k = 1; k <= p.N; ++k) {
        const long double size = std::ceil(numer / p.delta[static_cast<std::size_t>(k)]);
        if (size >= 9.2e18L) throw std::invalid_argument("block size overflows 64 bits");
        const auto w = static_cast<std::uint64_t>(size);
        p.block_sizes.push_back(w);

        std::vector<std::uint64_t> sub(static_cast<std::size_t>(J), 0);
        sub[0] = (w + 1) / 2;
        if (J > 1) {
            const std::uint64_t rest = w - sub[0];
            const auto parts = static_cast<std::uint64_t>(J - 1);
            for (std::uint64_t j = 0; j < parts; ++j)
                sub[static_cast<std::size_t>(j + 1)] = rest / parts + (j < rest % parts ? 1 : 0);
        } else {
            sub[0] = w;
        }
        p.subblock_sizes.push_back(std::move(sub));
    }

    const long double loglog_n = std::log2(log_n);
    p.pstar = static_cast<long double>(p.config.pstar_mult) * std::exp2(static_cast<long double>(r - 1)) *
              std::pow(2.0L * (r - 1) * D, 1.0L / D) * std::pow(log_n, 2.0L / D) * std::pow(loglog_n, r + 1.0L) /
              p.delta[1];
    return p;
}

namespace {

void validate_pattern(const ModelParams& params, const Pattern& pattern) {
    if (static_cast<int>(pattern.size()) != params.N)
        throw std::invalid_argument("pattern " + pattern_string(pattern) + " must have " + std::to_string(params.N) +
                                    " entries");
    int sum = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] < 0 || pattern[i] > params.r())
            throw std::invalid_argument("pattern entry out of range in " + pattern_string(pattern));
        sum += pattern[i];
    }
    if (sum != params.r())
        throw std::invalid_argument("pattern " + pattern_string(pattern) + " does not sum to r = " +
                                    std::to_string(params.r()));
}

}  // namespace

long double edge_probability(const ModelParams& params, const Pattern& pattern) {
    validate_pattern(params, pattern);
    for (std::size_t i = 0; i < pattern.size(); ++i)
        if (static_cast<std::uint64_t>(pattern[i]) > params.block_sizes[i])
            throw std::invalid_argument("pattern " + pattern_string(pattern) + " exceeds the size of block " +
                                        std::to_string(i + 1));
    if (params.pstar <= 0) return 0;
    long double log_p = std::log2(params.pstar);
    for (std::size_t i = 0; i < pattern.size(); ++i)
        log_p += pattern[i] * std::log2(params.delta[i + 1]);
    if (log_p >= 0) return 1;
    return std::exp2(log_p);
}

BigInt stratum_cardinality(const ModelParams& params, const Pattern& pattern) {
    validate_pattern(params, pattern);
    BigInt out = 1;
    for (std::size_t i = 0; i < pattern.size(); ++i) out *= big_binomial(params.block_sizes[i], pattern[i]);
    return out;
}

std::vector<Pattern> enumerate_patterns(const ModelParams& params) {
    std::vector<Pattern> out;
    Pattern current(static_cast<std::size_t>(params.N), 0);
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == current.size()) {
            current[pos] = remaining;
            out.push_back(current);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            current[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, params.r());
    return out;
}

EdgeExpectation expected_edges(const ModelParams& params) {
    const int r = params.r();
    const int D = params.D();
    const BigFloat n(params.n());
    const BigFloat log_n = boost::multiprecision::log2(n);
    const BigFloat loglog_n = boost::multiprecision::log2(log_n);

    std::vector<BigFloat> delta(static_cast<std::size_t>(params.N) + 1);
    delta[0] = BigFloat(D) * n;
    BigFloat power = 1;
    for (int k = 1; k <= params.N; ++k) {
        power *= D;
        delta[static_cast<std::size_t>(k)] = boost::multiprecision::exp2(log_n / power);
    }
    const BigFloat pstar = BigFloat(params.config.pstar_mult) * boost::multiprecision::pow(BigFloat(2), r - 1) *
                           boost::multiprecision::pow(BigFloat(2 * (r - 1) * D), BigFloat(1) / D) *
                           boost::multiprecision::pow(log_n, BigFloat(2) / D) *
                           boost::multiprecision::pow(loglog_n, r + 1) / delta[1];

    EdgeExpectation out;
    for (const auto& pattern : enumerate_patterns(params)) {
        const BigInt m = stratum_cardinality(params, pattern);
        if (m == 0) continue;
        BigFloat p = pstar;
        for (std::size_t i = 0; i < pattern.size(); ++i)
            p *= boost::multiprecision::pow(delta[i + 1], pattern[i]);
        const BigFloat mf(m);
        if (p >= 1) {
            out.expected += mf;
            out.deterministic += mf;
        } else {
            out.expected += p * mf;
        }
    }
    out.closed_form_bound = 2 * boost::multiprecision::pow(BigFloat(20) * boost::multiprecision::pow(BigFloat(3), D) * r, r) *
                            boost::multiprecision::pow(loglog_n, 2 * r + 1) *
                            boost::multiprecision::pow(log_n, BigFloat(2) / D) *
                            boost::multiprecision::pow(n, BigFloat(r) - BigFloat(1) / D);
    return out;
}

BigFloat lower_bound_value(int r, std::uint64_t n, int D) {
    if (r < 2 || D < 1) throw std::invalid_argument("lower_bound_value needs r >= 2 and D >= 1");
    return boost::multiprecision::pow(BigFloat(n), BigFloat(r) - BigFloat(1) / D) / (BigFloat(100) * r * r * D);
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> block_offsets(const ModelParams& params) {
    std::vector<std::uint64_t> out{0};
    for (auto s : params.block_sizes) out.push_back(out.back() + s);
    return out;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("HYPERUNI_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

// Per-block slice of a stratum: choose `count` of the `size` vertices at `offset`.
struct BlockPart {
    std::uint64_t offset = 0;
    std::uint64_t size = 0;
    int count = 0;
    std::uint64_t combos = 0;
    // binom[i][m] = C(m, i) for m < size, filled when size is small enough.
    std::vector<std::vector<std::uint64_t>> binom;

    BlockPart(std::uint64_t offset_, std::uint64_t size_, int count_)
        : offset(offset_), size(size_), count(count_), combos(binomial_u64(size_, count_)) {
        if (size > (std::uint64_t{1} << 22)) return;
        binom.assign(static_cast<std::size_t>(count + 1), std::vector<std::uint64_t>(size));
        for (int i = 0; i <= count; ++i)
            for (std::uint64_t m = 0; m < size; ++m) binom[static_cast<std::size_t>(i)][m] = binomial_u64(m, i);
    }

    std::uint64_t choose(std::uint64_t m, int i) const {
        return binom.empty() ? binomial_u64(m, i) : binom[static_cast<std::size_t>(i)][m];
    }

    // Writes the colex-unranked subset (ascending) to out.
    void unrank(std::uint64_t rank, Vertex* out) const {
        for (int i = count; i >= 1; --i) {
            std::uint64_t lo = static_cast<std::uint64_t>(i - 1), hi = size - 1;
            while (lo < hi) {
                const std::uint64_t mid = lo + (hi - lo + 1) / 2;
                if (choose(mid, i) <= rank)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            out[i - 1] = static_cast<Vertex>(offset + lo);
            rank -= choose(lo, i);
        }
    }
};

void unrank_edge(std::uint64_t rank, const std::vector<BlockPart>& parts, Vertex* out) {
    for (const auto& part : parts) {
        part.unrank(rank % part.combos, out);
        rank /= part.combos;
        out += part.count;
    }
}

// Walks the edges of a stratum in rank order without unranking each one.
class RankCursor {
public:
    explicit RankCursor(const std::vector<BlockPart>& parts) : parts_(parts) {
        for (const auto& part : parts_)
            for (int i = 0; i < part.count; ++i) cur_.push_back(static_cast<Vertex>(i));
    }

    void write(Vertex* out) const {
        std::size_t at = 0;
        for (const auto& part : parts_)
            for (int i = 0; i < part.count; ++i, ++at) out[at] = static_cast<Vertex>(part.offset + cur_[at]);
    }

    // Colex successor in the first part, carrying into the next on wrap-around.
    void advance() {
        std::size_t base = 0;
        for (const auto& part : parts_) {
            Vertex* c = cur_.data() + base;
            const int k = part.count;
            int i = 0;
            while (i < k && (i + 1 < k ? c[i] + 1 == c[i + 1] : c[i] + 1 == part.size)) ++i;
            if (i < k) {
                ++c[i];
                for (int j = 0; j < i; ++j) c[j] = static_cast<Vertex>(j);
                return;
            }
            for (int j = 0; j < k; ++j) c[j] = static_cast<Vertex>(j);
            base += static_cast<std::size_t>(k);
        }
    }

private:
    const std::vector<BlockPart>& parts_;
    std::vector<Vertex> cur_;  // local ids, part by part
};

constexpr std::uint64_t kEnumerationThreshold = 10'000'000;

void sample_one(const ModelParams& params, const std::vector<std::uint64_t>& offsets, std::uint64_t seed,
                StratumSample& s) {
    const auto r = static_cast<std::size_t>(params.r());
    if (s.cardinality == 0 || s.probability <= 0) return;

    std::vector<BlockPart> parts;
    for (std::size_t k = 0; k < s.pattern.size(); ++k) {
        if (s.pattern[k] == 0) continue;
        parts.emplace_back(offsets[k], params.block_sizes[k], s.pattern[k]);
    }
    Rng rng = make_rng(derive_seed(seed, SeedRole::stratum, s.index));
    const std::uint64_t M = s.cardinality;

    std::uint64_t X = M;
    if (s.probability < 1) {
        std::binomial_distribution<long long> binom(static_cast<long long>(M), static_cast<double>(s.probability));
        X = static_cast<std::uint64_t>(binom(rng));
    }
    if (X == 0) return;
    s.edges.resize(X * r);

    RankCursor cursor(parts);
    if (X == M) {
        for (std::uint64_t rank = 0; rank < M; ++rank, cursor.advance()) cursor.write(s.edges.data() + rank * r);
        return;
    }
    if (X >= M / 8 && M <= kEnumerationThreshold) {
        // Selection sampling over the ranks: every X-subset equally likely.
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uint64_t chosen = 0;
        for (std::uint64_t rank = 0; rank < M && chosen < X; ++rank, cursor.advance()) {
            if (static_cast<double>(M - rank) * unit(rng) < static_cast<double>(X - chosen)) {
                cursor.write(s.edges.data() + chosen * r);
                ++chosen;
            }
        }
        if (chosen != X) throw InvariantError("selection sampling drew " + std::to_string(chosen) + " of " +
                                              std::to_string(X) + " edges");
        return;
    }
    // Draw until X distinct ranks are seen, discarding repeats. Batches of
    // exactly the missing count never overshoot, so this is the sequential
    // rejection process and the result is a uniform X-subset.
    std::uniform_int_distribution<std::uint64_t> pick(0, M - 1);
    std::vector<std::uint64_t> ranks;
    ranks.reserve(X);
    std::uint64_t draws = 0;
    std::vector<std::uint64_t> batch, fresh;
    while (ranks.size() < X) {
        const std::uint64_t missing = X - ranks.size();
        batch.resize(missing);
        for (auto& x : batch) x = pick(rng);
        draws += missing;
        std::ranges::sort(batch);
        batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
        fresh.clear();
        std::ranges::set_difference(batch, ranks, std::back_inserter(fresh));
        const auto mid = static_cast<std::ptrdiff_t>(ranks.size());
        ranks.insert(ranks.end(), fresh.begin(), fresh.end());
        std::inplace_merge(ranks.begin(), ranks.begin() + mid, ranks.end());
        if (draws - ranks.size() > 100 * X)
            throw Error("stratum " + pattern_string(s.pattern) + ": too many rejections drawing " +
                        std::to_string(X) + " of " + std::to_string(M) + " sets");
    }
    for (std::uint64_t i = 0; i < X; ++i) unrank_edge(ranks[i], parts, s.edges.data() + i * r);
}

}  // namespace

namespace {

void check_vertex_cap(const ModelParams& params, const SampleCaps& caps) {
    const std::uint64_t total_vertices = params.total_vertices();
    if (total_vertices > caps.max_vertices || total_vertices > std::numeric_limits<Vertex>::max())
        throw ResourceCapError("host has " + std::to_string(total_vertices) + " vertices, cap is " +
                               std::to_string(std::min<std::uint64_t>(caps.max_vertices,
                                                                      std::numeric_limits<Vertex>::max())));
}

// Fills index, pattern, cardinality and probability; returns the expectation.
long double prepare_stratum(const ModelParams& params, const SampleCaps& caps, std::size_t index,
                            const Pattern& pattern, StratumSample& s) {
    s.index = index;
    s.pattern = pattern;
    const BigInt m = stratum_cardinality(params, s.pattern);
    if (m == 0) return 0;
    s.probability = edge_probability(params, s.pattern);
    const long double expected = s.probability * m.convert_to<long double>();
    if (expected > static_cast<long double>(caps.max_edges))
        throw ResourceCapError("stratum " + pattern_string(s.pattern) + " expects " +
                               std::to_string(static_cast<double>(expected)) + " edges, cap is " +
                               std::to_string(caps.max_edges));
    if (m > BigInt(std::uint64_t{1} << 62))
        throw ResourceCapError("stratum " + pattern_string(s.pattern) + " has too many r-sets to sample");
    s.cardinality = m.convert_to<std::uint64_t>();
    return expected;
}

}  // namespace

std::vector<StratumSample> sample_strata(const ModelParams& params, std::uint64_t seed, const SampleCaps& caps,
                                         unsigned threads) {
    check_vertex_cap(params, caps);
    const auto patterns = enumerate_patterns(params);
    std::vector<StratumSample> out(patterns.size());
    long double total_expected = 0;
    for (std::size_t i = 0; i < patterns.size(); ++i) total_expected += prepare_stratum(params, caps, i, patterns[i], out[i]);
    if (total_expected > static_cast<long double>(caps.max_edges))
        throw ResourceCapError("host expects " + std::to_string(static_cast<double>(total_expected)) +
                               " edges, cap is " + std::to_string(caps.max_edges));

    const auto offsets = block_offsets(params);
    if (threads == 0) threads = default_thread_count();
    detail::parallel_for(out.size(), threads, [&](std::size_t i) { sample_one(params, offsets, seed, out[i]); });

    std::uint64_t total = 0;
    for (const auto& s : out) total += s.count(params.r());
    if (total > caps.max_edges)
        throw ResourceCapError("sampled " + std::to_string(total) + " edges, cap is " + std::to_string(caps.max_edges));
    return out;
}

StratumSample sample_stratum(const ModelParams& params, std::uint64_t seed, std::size_t index,
                             const SampleCaps& caps) {
    check_vertex_cap(params, caps);
    const auto patterns = enumerate_patterns(params);
    if (index >= patterns.size())
        throw std::invalid_argument("stratum index " + std::to_string(index) + " out of range (" +
                                    std::to_string(patterns.size()) + " strata)");
    StratumSample s;
    prepare_stratum(params, caps, index, patterns[index], s);
    sample_one(params, block_offsets(params), seed, s);
    return s;
}

BlockGraph sample_model(const ModelParams& params, std::uint64_t seed, const SampleCaps& caps, unsigned threads) {
    auto strata = sample_strata(params, seed, caps, threads);
    std::size_t total = 0;
    for (const auto& s : strata) total += s.edges.size();
    std::vector<Vertex> flat;
    flat.reserve(total);
    for (auto& s : strata) {
        flat.insert(flat.end(), s.edges.begin(), s.edges.end());
        std::vector<Vertex>().swap(s.edges);
    }
    Hypergraph graph(params.r(), static_cast<std::size_t>(params.total_vertices()), std::move(flat));
    return BlockGraph(params, std::move(graph));
}

// ---------------------------------------------------------------------------

BlockGraph::BlockGraph(ModelParams params, Hypergraph graph)
    : params_(std::move(params)), graph_(std::move(graph)), block_offsets_(block_offsets(params_)) {
    if (graph_.uniformity() != params_.r())
        throw std::invalid_argument("host uniformity differs from the model's r");
    if (graph_.num_vertices() != params_.total_vertices())
        throw std::invalid_argument("host has " + std::to_string(graph_.num_vertices()) +
                                    " vertices, the partition has " + std::to_string(params_.total_vertices()));
    for (int k = 1; k <= params_.N; ++k) {
        std::vector<std::uint64_t> offs{block_offsets_[static_cast<std::size_t>(k - 1)]};
        for (auto s : params_.subblock_sizes[static_cast<std::size_t>(k - 1)]) offs.push_back(offs.back() + s);
        subblock_offsets_.push_back(std::move(offs));
    }
    links_ = LinkIndex(graph_);
}

Vertex BlockGraph::subblock_begin(int k, int j) const {
    return static_cast<Vertex>(subblock_offsets_.at(static_cast<std::size_t>(k - 1)).at(static_cast<std::size_t>(j - 1)));
}

Vertex BlockGraph::subblock_end(int k, int j) const {
    return static_cast<Vertex>(subblock_offsets_.at(static_cast<std::size_t>(k - 1)).at(static_cast<std::size_t>(j)));
}

BlockGraph::Location BlockGraph::locate(Vertex v) const {
    if (v >= num_vertices()) throw std::out_of_range("host vertex " + std::to_string(v) + " out of range");
    const auto bit = std::upper_bound(block_offsets_.begin(), block_offsets_.end(), v);
    const auto k = static_cast<std::size_t>(bit - block_offsets_.begin());  // 1-based block
    const auto& subs = subblock_offsets_[k - 1];
    const auto sit = std::upper_bound(subs.begin(), subs.end(), v);
    return {static_cast<int>(k), static_cast<int>(sit - subs.begin())};
}

Pattern BlockGraph::pattern_of(std::span<const Vertex> s) const {
    Pattern out(static_cast<std::size_t>(params_.N), 0);
    for (Vertex v : s) ++out[static_cast<std::size_t>(locate(v).block - 1)];
    return out;
}

}  // namespace hyperuni
