// hyperuni: command-line front end for the block model, the greedy embedder
// and the verification oracles.
//
// Exit codes: 0 success, 1 usage/config/input error (and a rejected map in
// `verify`), 2 resource cap, 3 internal invariant violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperuni/block_model.hpp"
#include "hyperuni/embedder.hpp"
#include "hyperuni/errors.hpp"
#include "hyperuni/experiment.hpp"
#include "hyperuni/generators.hpp"
#include "hyperuni/hg_io.hpp"
#include "hyperuni/oracle.hpp"

namespace fs = std::filesystem;
using namespace hyperuni;

namespace {

// Output goes to a file when a path is given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct ModelFlags {
    int r = 2;
    std::uint64_t n = 0;
    int D = 2;
    std::string mode = "scaled";
    double scale = 1.0;
    double pstar_mult = 1.0;

    void add(CLI::App* app) {
        app->add_option("--r", r, "uniformity")->required();
        app->add_option("--n", n, "guest class size n")->required();
        app->add_option("--D", D, "degeneracy bound")->required();
        app->add_option("--mode", mode, "paper-exact or scaled")->capture_default_str();
        app->add_option("--scale", scale, "block size constant c (scaled mode)")->capture_default_str();
        app->add_option("--pstar-mult", pstar_mult, "multiplier on p* (scaled mode)")->capture_default_str();
    }
    ModelConfig config() const { return {r, n, D, parse_mode(mode), scale, pstar_mult}; }
};

std::string fmt(long double x) {
    std::ostringstream s;
    s << std::setprecision(10) << static_cast<double>(x);
    return s.str();
}

template <typename T>
std::string join(const std::vector<T>& v, const char* sep = " ") {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? sep : "") << v[i];
    return s.str();
}

void print_params(std::ostream& out, const ModelParams& p) {
    const auto e = expected_edges(p);
    out << "r " << p.r() << "\nn " << p.n() << "\nD " << p.D() << "\nmode " << to_string(p.config.mode)
        << "\nscale " << fmt(p.config.size_scale) << "\npstar_mult " << fmt(p.config.pstar_mult) << "\nN " << p.N
        << "\nJ " << p.num_subblocks() << "\ndelta";
    for (long double d : p.delta) out << ' ' << fmt(d);
    out << "\nblock_sizes " << join(p.block_sizes) << '\n';
    for (int k = 1; k <= p.N; ++k) out << "subblocks " << k << ' ' << join(p.subblock_sizes[static_cast<std::size_t>(k - 1)]) << '\n';
    out << "total_vertices " << p.total_vertices() << "\npstar " << fmt(p.pstar) << "\nexpected_edges "
        << e.expected.str(12) << "\ndeterministic_edges " << e.deterministic.str(12) << "\nclosed_form_bound "
        << e.closed_form_bound.str(12) << "\nlower_bound " << lower_bound_value(p.r(), p.n(), p.D()).str(12) << '\n';
}

bool is_bhg(const std::string& path) { return fs::path(path).extension() == ".bhg"; }

// Hosts may be given as .bhg (sampled block model) or plain .hg.
Hypergraph load_host_graph(const std::string& path) {
    return is_bhg(path) ? read_bhg_file(path).graph() : read_hg_file(path);
}

std::vector<Vertex> load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
        return map_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

nlohmann::json map_json(const std::vector<Vertex>& map) {
    auto out = nlohmann::json::array();
    for (Vertex u : map) {
        if (u == kUnmapped)
            out.push_back(-1);
        else
            out.push_back(u);
    }
    return out;
}

// Config file plus `--set key=value` plus the explicit model flags, in that order.
struct ExperimentFlags {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<int> r, D;
    std::optional<std::uint64_t> n, seed, cap_edges;
    std::optional<std::string> mode;
    std::optional<double> scale, pstar_mult;
    std::string out;

    void add(CLI::App* app) {
        app->add_option("--config", config_path, "key = value config file");
        app->add_option("--set", sets, "override one key (key=value), repeatable");
        app->add_option("--r", r);
        app->add_option("--n", n);
        app->add_option("--D", D);
        app->add_option("--mode", mode);
        app->add_option("--scale", scale);
        app->add_option("--pstar-mult", pstar_mult);
        app->add_option("--seed", seed);
        app->add_option("--cap-edges", cap_edges);
        app->add_option("-o,--out", out, "output path (default stdout)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c;
        if (!config_path.empty()) c = read_config_file(config_path);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
            apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
        }
        if (r) c.model.r = *r;
        if (n) c.model.n = *n;
        if (D) c.model.D = *D;
        if (mode) c.model.mode = parse_mode(*mode);
        if (scale) c.model.size_scale = *scale;
        if (pstar_mult) c.model.pstar_mult = *pstar_mult;
        if (seed) c.seed = *seed;
        if (cap_edges) c.cap_edges = *cap_edges;
        validate(c);
        return c;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Universal hypergraphs: random block model, greedy embedding, oracles"};
    app.require_subcommand(1);

    // params
    ModelFlags params_flags;
    bool params_json = false;
    auto* params_cmd = app.add_subcommand("params", "print the derived model parameters");
    params_flags.add(params_cmd);
    params_cmd->add_flag("--json", params_json);
    params_cmd->callback([&] {
        const auto p = compute_params(params_flags.config());
        if (params_json) {
            auto j = to_json(p);
            const auto e = expected_edges(p);
            j["expected_edges"] = e.expected.convert_to<double>();
            j["closed_form_bound"] = e.closed_form_bound.convert_to<double>();
            j["lower_bound"] = lower_bound_value(p.r(), p.n(), p.D()).convert_to<double>();
            std::cout << j.dump(2) << '\n';
        } else {
            print_params(std::cout, p);
        }
    });

    // gen-model
    ModelFlags model_flags;
    std::uint64_t model_seed = 0;
    SampleCaps caps;
    unsigned model_threads = 0;
    std::string model_out;
    auto* gen_model = app.add_subcommand("gen-model", "sample a block-model host (.bhg)");
    model_flags.add(gen_model);
    gen_model->add_option("--seed", model_seed)->capture_default_str();
    gen_model->add_option("--cap-edges", caps.max_edges)->capture_default_str();
    gen_model->add_option("--cap-vertices", caps.max_vertices)->capture_default_str();
    gen_model->add_option("--threads", model_threads, "0: HYPERUNI_THREADS or hardware");
    gen_model->add_option("-o,--out", model_out);
    gen_model->callback([&] {
        const auto g = sample_model(compute_params(model_flags.config()), model_seed, caps, model_threads);
        Output out(model_out);
        write_bhg(out.stream(), g);
    });

    // gen-h
    GenSpec spec;
    std::string family = "uniform";
    std::string gen_out;
    auto* gen_h = app.add_subcommand("gen-h", "generate a random D-degenerate guest (.hg)");
    gen_h->add_option("--family", family, "uniform, capped or skew")->capture_default_str();
    gen_h->add_option("--r", spec.r)->required();
    gen_h->add_option("--n", spec.n)->required();
    gen_h->add_option("--D", spec.D)->required();
    gen_h->add_option("--seed", spec.seed)->capture_default_str();
    gen_h->add_option("--alpha", spec.alpha, "skew exponent")->capture_default_str();
    gen_h->add_option("--min-back-degree", spec.min_back_degree)->capture_default_str();
    gen_h->add_option("-o,--out", gen_out);
    gen_h->callback([&] {
        spec.family = parse_family(family);
        Output out(gen_out);
        write_hg(out.stream(), generate(spec));
    });

    // embed
    std::string embed_host, embed_guest, embed_order = "degeneracy", embed_out;
    auto* embed_cmd = app.add_subcommand("embed", "greedy embedding of a guest into a sampled host");
    embed_cmd->add_option("--host", embed_host, ".bhg host")->required();
    embed_cmd->add_option("--guest", embed_guest, ".hg guest")->required();
    embed_cmd->add_option("--ordering", embed_order, "degeneracy or identity")->capture_default_str();
    embed_cmd->add_option("-o,--out", embed_out, "JSON report path");
    embed_cmd->callback([&] {
        const auto host = read_bhg_file(embed_host);
        const auto guest = read_hg_file(embed_guest);
        DegeneracyOrdering ordering;
        if (embed_order == "degeneracy")
            ordering = degeneracy_ordering(guest).ordering;
        else if (embed_order == "identity")
            ordering = identity_ordering(guest);
        else
            throw std::invalid_argument("unknown ordering '" + embed_order + "'");
        const auto report = embed(guest, ordering, host);
        Output out(embed_out);
        out.stream() << to_json(report).dump(2) << '\n';
    });

    // verify
    std::string verify_host, verify_guest, verify_map;
    bool verify_ok = true;
    auto* verify_cmd = app.add_subcommand("verify", "check a vertex map against guest and host");
    verify_cmd->add_option("--host", verify_host, ".bhg or .hg host")->required();
    verify_cmd->add_option("--guest", verify_guest, ".hg guest")->required();
    verify_cmd->add_option("--map", verify_map, "JSON with a \"map\" array (e.g. an embed report)")->required();
    verify_cmd->callback([&] {
        const auto violations =
            verify_embedding(read_hg_file(verify_guest), load_host_graph(verify_host), load_map(verify_map));
        if (violations.empty()) {
            std::cout << "ok\n";
        } else {
            verify_ok = false;
            std::cout << "violations " << violations.size() << '\n';
            for (const auto& v : violations) std::cout << v.describe() << '\n';
        }
    });

    // oracle-embed
    std::string oracle_host, oracle_guest, oracle_out;
    std::uint64_t oracle_budget = 10'000'000;
    auto* oracle_cmd = app.add_subcommand("oracle-embed", "exhaustive backtracking embedding");
    oracle_cmd->add_option("--host", oracle_host, ".bhg or .hg host")->required();
    oracle_cmd->add_option("--guest", oracle_guest, ".hg guest")->required();
    oracle_cmd->add_option("--budget", oracle_budget, "node budget")->capture_default_str();
    oracle_cmd->add_option("-o,--out", oracle_out);
    oracle_cmd->callback([&] {
        const auto res = backtrack_embed(read_hg_file(oracle_guest), load_host_graph(oracle_host), oracle_budget);
        nlohmann::json j;
        j["status"] = res.status == SearchStatus::found  ? "found"
                      : res.status == SearchStatus::none ? "none"
                                                         : "budget-exhausted";
        j["nodes"] = res.nodes;
        j["map"] = map_json(res.map);
        Output out(oracle_out);
        out.stream() << j.dump(2) << '\n';
    });

    // enumerate / universal-check share the class flags
    int cls_r = 2;
    std::size_t cls_n = 0, cls_D = 1;
    bool cls_connected = false;
    std::optional<std::size_t> cls_cap;
    std::uint64_t cls_state_cap = EnumerationOptions{}.state_cap;
    auto add_class = [&](CLI::App* cmd) {
        cmd->add_option("--r", cls_r)->required();
        cmd->add_option("--n", cls_n)->required();
        cmd->add_option("--D", cls_D)->required();
        cmd->add_flag("--connected", cls_connected, "only graphs with 1..D back-edges per step, connected");
        cmd->add_option("--degree-cap", cls_cap, "running degree cap (rD+1 for the capped class)");
        cmd->add_option("--state-cap", cls_state_cap)->capture_default_str();
    };
    auto class_options = [&] {
        EnumerationOptions o;
        o.connected_only = cls_connected;
        o.degree_cap = cls_cap;
        o.state_cap = cls_state_cap;
        return o;
    };

    std::string enum_dir;
    auto* enum_cmd = app.add_subcommand("enumerate", "count (and optionally write) the D-degenerate class");
    add_class(enum_cmd);
    enum_cmd->add_option("--out-dir", enum_dir, "write each graph as <rank>.hg");
    enum_cmd->callback([&] {
        std::uint64_t rank = 0;
        if (!enum_dir.empty()) fs::create_directories(enum_dir);
        const auto count = enumerate_class(cls_r, cls_n, cls_D, class_options(), [&](const Hypergraph& h) {
            if (!enum_dir.empty()) write_hg_file(fs::path(enum_dir) / (std::to_string(rank) + ".hg"), h);
            ++rank;
            return true;
        });
        std::cout << "count " << count << '\n';
    });

    std::string uc_host;
    std::uint64_t uc_budget = 10'000'000;
    auto* uc_cmd = app.add_subcommand("universal-check", "check a host against every guest of the class");
    add_class(uc_cmd);
    uc_cmd->add_option("--host", uc_host, ".bhg or .hg host")->required();
    uc_cmd->add_option("--budget", uc_budget, "node budget per guest")->capture_default_str();
    uc_cmd->callback([&] {
        const auto res = universality_check(load_host_graph(uc_host), cls_r, cls_n, cls_D, uc_budget, class_options());
        switch (res.status) {
            case UniversalityStatus::ok: std::cout << "ok checked " << res.checked << '\n'; return;
            case UniversalityStatus::counterexample: std::cout << "# counterexample rank " << res.rank << '\n'; break;
            case UniversalityStatus::undecided: std::cout << "# undecided rank " << res.rank << '\n'; break;
        }
        write_hg(std::cout, *res.guest);
    });

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "seeded experiments");
    exp_cmd->require_subcommand(1);
    ExperimentFlags sr_flags, edges_flags, l45_flags;
    auto* sr_cmd = exp_cmd->add_subcommand("success-rate", "greedy embedding success rate");
    sr_flags.add(sr_cmd);
    sr_cmd->callback([&] {
        const auto report = run_success_rate(sr_flags.resolve());
        Output out(sr_flags.out);
        out.stream() << to_json(report).dump(2) << '\n';
    });
    auto* edges_cmd = exp_cmd->add_subcommand("edges", "sampled edge counts against the expectation");
    edges_flags.add(edges_cmd);
    edges_cmd->callback([&] {
        const auto report = run_edges(edges_flags.resolve());
        Output out(edges_flags.out);
        out.stream() << to_json(report).dump(2) << '\n';
    });
    std::string l45_format = "tsv";
    auto* l45_cmd = exp_cmd->add_subcommand("lemma45", "candidate density of harvested back-link multisets");
    l45_flags.add(l45_cmd);
    l45_cmd->add_option("--format", l45_format, "tsv or json")->capture_default_str();
    l45_cmd->callback([&] {
        if (l45_format != "tsv" && l45_format != "json")
            throw std::invalid_argument("unknown format '" + l45_format + "'");
        const auto report = run_lemma45(l45_flags.resolve());
        Output out(l45_flags.out);
        if (l45_format == "tsv")
            write_tsv(out.stream(), report);
        else
            out.stream() << to_json(report).dump(2) << '\n';
    });

    // calibrate
    ExperimentFlags cal_flags;
    std::string cal_log;
    auto* cal_cmd = app.add_subcommand("calibrate", "search pstar_mult for 99% success, write the doubled value");
    cal_flags.add(cal_cmd);
    cal_cmd->add_option("--log", cal_log, "JSON path for the probe log");
    cal_cmd->callback([&] {
        const auto result = calibrate(cal_flags.resolve());
        Output out(cal_flags.out);
        out.stream() << "# smallest pstar_mult with >= 99% success: " << result.smallest_passing << '\n'
                     << "# committed value is twice that\n"
                     << to_text(result.config);
        if (!cal_log.empty()) {
            Output log(cal_log);
            log.stream() << to_json(result).dump(2) << '\n';
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return verify_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << '\n';
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
