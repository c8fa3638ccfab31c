#include "hyperuni/hg_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hyperuni/errors.hpp"

namespace hyperuni {

namespace {

// Splits on spaces/tabs and parses each token as an unsigned decimal.
std::vector<unsigned long long> parse_numbers(const std::string& line, std::size_t lineno) {
    std::vector<unsigned long long> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        unsigned long long value = 0;
        auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, value);
        if (ec != std::errc{} || ptr != line.data() + j)
            throw ParseError(lineno, "expected a non-negative integer, got '" + line.substr(i, j - i) + "'");
        out.push_back(value);
        i = j;
    }
    return out;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

Hypergraph read_hg(std::istream& in, std::vector<CommentLine>* comments) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    int r = 0;
    std::size_t n = 0, m = 0;
    std::vector<Vertex> flat;
    std::vector<std::size_t> edge_lines;

    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line[first] == '#') {
            if (comments) comments->push_back({lineno, line.substr(first + 1)});
            continue;
        }
        if (is_blank(line)) continue;
        const auto nums = parse_numbers(line, lineno);
        if (!have_header) {
            if (nums.size() != 3) throw ParseError(lineno, "header must be 'r n m'");
            if (nums[0] < 2 || nums[0] > static_cast<unsigned long long>(kMaxUniformity))
                throw ParseError(lineno, "unsupported uniformity " + std::to_string(nums[0]));
            if (nums[1] > 0xffffffffULL) throw ParseError(lineno, "vertex count exceeds 32-bit ids");
            r = static_cast<int>(nums[0]);
            n = static_cast<std::size_t>(nums[1]);
            m = static_cast<std::size_t>(nums[2]);
            have_header = true;
            flat.reserve(std::min<std::size_t>(m, 1u << 24) * static_cast<std::size_t>(r));
            continue;
        }
        if (edge_lines.size() == m)
            throw ParseError(lineno, "more edge lines than the declared " + std::to_string(m));
        if (nums.size() != static_cast<std::size_t>(r))
            throw ParseError(lineno, "edge has " + std::to_string(nums.size()) + " vertices, expected " +
                                         std::to_string(r));
        const std::size_t start = flat.size();
        for (auto v : nums) {
            if (v >= n)
                throw ParseError(lineno, "vertex id " + std::to_string(v) + " out of range [0, " +
                                             std::to_string(n) + ")");
            flat.push_back(static_cast<Vertex>(v));
        }
        std::sort(flat.begin() + static_cast<std::ptrdiff_t>(start), flat.end());
        if (std::adjacent_find(flat.begin() + static_cast<std::ptrdiff_t>(start), flat.end()) != flat.end())
            throw ParseError(lineno, "repeated vertex in edge");
        edge_lines.push_back(lineno);
    }
    if (!have_header) throw ParseError(lineno, "missing 'r n m' header");
    if (edge_lines.size() != m)
        throw ParseError(lineno, "declared " + std::to_string(m) + " edges, found " +
                                     std::to_string(edge_lines.size()));

    // Duplicate detection, reporting the later line of the pair.
    const auto ru = static_cast<std::size_t>(r);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    auto edge_at = [&](std::size_t i) { return std::span<const Vertex>(flat.data() + i * ru, ru); };
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        auto ea = edge_at(a), eb = edge_at(b);
        if (std::ranges::equal(ea, eb)) return a < b;
        return std::ranges::lexicographical_compare(ea, eb);
    });
    for (std::size_t i = 1; i < m; ++i) {
        if (std::ranges::equal(edge_at(idx[i - 1]), edge_at(idx[i])))
            throw ParseError(edge_lines[idx[i]], "duplicate edge (first seen on line " +
                                                     std::to_string(edge_lines[idx[i - 1]]) + ")");
    }
    return Hypergraph(r, n, std::move(flat));
}

Hypergraph read_hg_file(const std::filesystem::path& path, std::vector<CommentLine>* comments) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_hg(in, comments);
}

void write_hg(std::ostream& out, const Hypergraph& h) {
    std::string buf;
    buf.reserve(64);
    out << h.uniformity() << ' ' << h.num_vertices() << ' ' << h.num_edges() << '\n';
    for (std::size_t i = 0; i < h.num_edges(); ++i) {
        buf.clear();
        for (Vertex v : h.edge(i)) {
            if (!buf.empty()) buf += ' ';
            buf += std::to_string(v);
        }
        buf += '\n';
        out << buf;
    }
}

void write_hg_file(const std::filesystem::path& path, const Hypergraph& h) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_hg(out, h);
}

std::string to_hg_string(const Hypergraph& h) {
    std::ostringstream os;
    write_hg(os, h);
    return os.str();
}

}  // namespace hyperuni
