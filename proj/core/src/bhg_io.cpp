#include <charconv>
#include <fstream>
#include <sstream>

#include "hyperuni/block_model.hpp"
#include "hyperuni/errors.hpp"
#include "hyperuni/hg_io.hpp"

namespace hyperuni {

namespace {

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::vector<std::string> tokens(const std::string& text) {
    std::istringstream is(text);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line, "bad number '" + s + "'");
    return value;
}

}  // namespace

void write_bhg(std::ostream& out, const BlockGraph& g) {
    const auto& p = g.params();
    out << "#model " << p.r() << ' ' << p.n() << ' ' << p.D() << ' ' << to_string(p.config.mode) << ' '
        << format_double(p.config.size_scale) << ' ' << format_double(p.config.pstar_mult) << '\n';
    out << "#blocks " << p.N;
    for (auto s : p.block_sizes) out << ' ' << s;
    out << '\n';
    for (int k = 1; k <= p.N; ++k) {
        out << "#subblocks " << k << ' ' << p.num_subblocks();
        for (auto s : p.subblock_sizes[static_cast<std::size_t>(k - 1)]) out << ' ' << s;
        out << '\n';
    }
    write_hg(out, g.graph());
}

void write_bhg_file(const std::filesystem::path& path, const BlockGraph& g) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_bhg(out, g);
}

BlockGraph read_bhg(std::istream& in) {
    std::vector<CommentLine> comments;
    Hypergraph graph = read_hg(in, &comments);

    bool have_model = false;
    std::size_t model_line = 0;
    ModelConfig config;
    std::vector<std::string> blocks_tokens;
    std::size_t blocks_line = 0;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> sub_lines;
    for (const auto& c : comments) {
        const auto t = tokens(c.text);
        if (t.empty()) continue;
        if (t[0] == "model") {
            if (t.size() != 7) throw ParseError(c.line, "#model needs r n D mode size_scale pstar_mult");
            config.r = parse_number<int>(t[1], c.line);
            config.n = parse_number<std::uint64_t>(t[2], c.line);
            config.D = parse_number<int>(t[3], c.line);
            try {
                config.mode = parse_mode(t[4]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(c.line, e.what());
            }
            config.size_scale = parse_number<double>(t[5], c.line);
            config.pstar_mult = parse_number<double>(t[6], c.line);
            have_model = true;
            model_line = c.line;
        } else if (t[0] == "blocks") {
            blocks_tokens = t;
            blocks_line = c.line;
        } else if (t[0] == "subblocks") {
            sub_lines.emplace_back(c.line, t);
        }
    }
    if (!have_model) throw ParseError(0, "missing #model header");
    if (blocks_tokens.empty()) throw ParseError(0, "missing #blocks header");

    ModelParams params;
    try {
        params = compute_params(config);
    } catch (const std::invalid_argument& e) {
        throw ParseError(model_line, e.what());
    }

    if (blocks_tokens.size() != static_cast<std::size_t>(params.N) + 2 ||
        parse_number<int>(blocks_tokens[1], blocks_line) != params.N)
        throw ParseError(blocks_line, "#blocks does not match the model's block count " + std::to_string(params.N));
    for (int k = 1; k <= params.N; ++k) {
        if (parse_number<std::uint64_t>(blocks_tokens[static_cast<std::size_t>(k) + 1], blocks_line) !=
            params.block_size(k))
            throw ParseError(blocks_line, "size of block " + std::to_string(k) + " does not match the model");
    }
    if (sub_lines.size() != static_cast<std::size_t>(params.N))
        throw ParseError(0, "expected one #subblocks line per block");
    for (const auto& [line, t] : sub_lines) {
        if (t.size() < 3) throw ParseError(line, "#subblocks needs k J sizes...");
        const int k = parse_number<int>(t[1], line);
        const int J = parse_number<int>(t[2], line);
        if (k < 1 || k > params.N || J != params.num_subblocks() || t.size() != static_cast<std::size_t>(J) + 3)
            throw ParseError(line, "#subblocks does not match the model");
        for (int j = 1; j <= J; ++j)
            if (parse_number<std::uint64_t>(t[static_cast<std::size_t>(j) + 2], line) != params.subblock_size(k, j))
                throw ParseError(line, "size of sub-block (" + std::to_string(k) + "," + std::to_string(j) +
                                           ") does not match the model");
    }
    if (graph.num_vertices() != params.total_vertices())
        throw ParseError(0, "vertex count " + std::to_string(graph.num_vertices()) + " differs from the partition total " +
                                std::to_string(params.total_vertices()));
    if (graph.uniformity() != params.r()) throw ParseError(0, "edge arity differs from the model's r");
    return BlockGraph(std::move(params), std::move(graph));
}

BlockGraph read_bhg_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_bhg(in);
}

}  // namespace hyperuni
