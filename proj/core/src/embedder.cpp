#include "hyperuni/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperuni/errors.hpp"

namespace hyperuni {

int target_block(const ModelParams& params, std::size_t degree) {
    const auto d = static_cast<long double>(degree);
    for (int k = 1; k <= params.N; ++k)
        if (params.delta[static_cast<std::size_t>(k)] < d) return k;
    return params.N;
}

std::vector<Vertex> candidates(const BlockGraph& host, const std::vector<VertexSet>& back_link, int k, int j,
                               const std::vector<bool>& used) {
    return intersect_links(host.links(), back_link, host.subblock_begin(k, j), host.subblock_end(k, j), used);
}

std::vector<std::vector<long double>> fill_thresholds(const ModelParams& params) {
    const long double log_n = std::log2(static_cast<long double>(params.n()));
    const long double n = static_cast<long double>(params.n());
    std::vector<std::vector<long double>> out;
    for (int k = 1; k <= params.N; ++k) {
        const long double first = k < params.N ? params.r() * n * params.D() / params.delta[static_cast<std::size_t>(k)] : n;
        std::vector<long double> row;
        long double value = first;
        for (int j = 1; j <= params.num_subblocks(); ++j) {
            row.push_back(value);
            value /= 4 * log_n;
        }
        out.push_back(std::move(row));
    }
    return out;
}

EmbedReport embed(const Hypergraph& guest, const DegeneracyOrdering& ordering, const BlockGraph& host) {
    const auto& params = host.params();
    if (guest.uniformity() != params.r())
        throw std::invalid_argument("guest uniformity " + std::to_string(guest.uniformity()) + " differs from host r " +
                                    std::to_string(params.r()));
    if (guest.num_vertices() > host.num_vertices())
        throw std::invalid_argument("guest has more vertices than the host");
    const DegeneracyOrdering check = make_ordering(guest, ordering.order);
    if (check.back_degrees != ordering.back_degrees)
        throw std::invalid_argument("ordering back-degrees do not match the guest");
    if (check.max_back_degree() > static_cast<std::size_t>(params.D()))
        throw std::invalid_argument("ordering has back-degree " + std::to_string(check.max_back_degree()) +
                                    " > D = " + std::to_string(params.D()));

    const int J = params.num_subblocks();
    EmbedReport report;
    report.map.assign(guest.num_vertices(), kUnmapped);
    report.occupancy.assign(static_cast<std::size_t>(params.N), std::vector<std::size_t>(static_cast<std::size_t>(J), 0));
    report.thresholds = fill_thresholds(params);
    std::vector<bool> used(host.num_vertices(), false);

    for (std::size_t t = 0; t < guest.num_vertices(); ++t) {
        const Vertex v = ordering.order[t];
        const std::size_t deg = guest.degree(v);
        const int k = target_block(params, deg);

        std::vector<VertexSet> image;
        for (const auto& b : back_link(guest, ordering, t)) {
            VertexSet mapped;
            for (Vertex x : b) mapped.push_back(report.map[x]);
            std::ranges::sort(mapped);
            image.push_back(std::move(mapped));
        }

        bool placed = false;
        for (int j = 1; j <= J && !placed; ++j) {
            const auto cands = candidates(host, image, k, j, used);
            if (cands.empty()) continue;
            const Vertex u = cands.front();
            report.map[v] = u;
            used[u] = true;
            ++report.occupancy[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
            report.placements.push_back({v, u, k, j, deg, cands.size()});
            placed = true;
        }
        if (!placed) {
            report.outcome = EmbedOutcome::failed;
            report.failed_at = t + 1;
            report.failed_block = k;
            return report;
        }
    }

#ifndef NDEBUG
    std::vector<std::vector<std::size_t>> audit(report.occupancy.size(),
                                                std::vector<std::size_t>(static_cast<std::size_t>(J), 0));
    for (Vertex u : report.map) {
        const auto loc = host.locate(u);
        ++audit[static_cast<std::size_t>(loc.block - 1)][static_cast<std::size_t>(loc.subblock - 1)];
    }
    if (audit != report.occupancy) throw InvariantError("occupancy counters disagree with the vertex map");
#endif
    return report;
}

nlohmann::json to_json(const EmbedReport& report) {
    nlohmann::json j;
    j["outcome"] = report.success() ? "success" : "failed";
    j["failed_at"] = report.failed_at;
    j["failed_block"] = report.failed_block;
    auto& map = j["map"] = nlohmann::json::array();
    for (Vertex u : report.map) {
        if (u == kUnmapped)
            map.push_back(-1);
        else
            map.push_back(u);
    }
    auto& placements = j["placements"] = nlohmann::json::array();
    for (std::size_t t = 0; t < report.placements.size(); ++t) {
        const auto& p = report.placements[t];
        placements.push_back({{"t", t + 1},
                              {"guest", p.guest},
                              {"host", p.host},
                              {"block", p.block},
                              {"subblock", p.subblock},
                              {"degree", p.degree},
                              {"candidates", p.candidates}});
    }
    j["occupancy"] = report.occupancy;
    auto& thresholds = j["thresholds"] = nlohmann::json::array();
    for (const auto& row : report.thresholds) {
        auto& out = thresholds.emplace_back(nlohmann::json::array());
        for (long double x : row) out.push_back(static_cast<double>(x));
    }
    return j;
}

std::vector<Vertex> map_from_json(const nlohmann::json& report) {
    std::vector<Vertex> out;
    for (const auto& x : report.at("map")) {
        const long long v = x.get<long long>();
        out.push_back(v < 0 ? kUnmapped : static_cast<Vertex>(v));
    }
    return out;
}

}  // namespace hyperuni
