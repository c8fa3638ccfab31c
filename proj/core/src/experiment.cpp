#include "hyperuni/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hyperuni/embedder.hpp"
#include "hyperuni/errors.hpp"
#include "hyperuni/oracle.hpp"
#include "hyperuni/random.hpp"
#include "parallel.hpp"

namespace hyperuni {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string join_families(const std::vector<GuestFamily>& families) {
    std::string out;
    for (auto f : families) {
        if (!out.empty()) out += ',';
        out += to_string(f);
    }
    return out;
}

unsigned worker_count(const ExperimentConfig& config) {
    return config.threads == 0 ? default_thread_count() : config.threads;
}

nlohmann::json to_json(const std::vector<std::vector<long double>>& rows) {
    auto out = nlohmann::json::array();
    for (const auto& row : rows) {
        auto& r = out.emplace_back(nlohmann::json::array());
        for (long double x : row) r.push_back(static_cast<double>(x));
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const ModelParams& params) {
    nlohmann::json j;
    j["N"] = params.N;
    j["J"] = params.num_subblocks();
    auto& delta = j["delta"] = nlohmann::json::array();
    for (long double d : params.delta) delta.push_back(static_cast<double>(d));
    j["block_sizes"] = params.block_sizes;
    j["subblock_sizes"] = params.subblock_sizes;
    j["total_vertices"] = params.total_vertices();
    j["size_scale"] = params.config.size_scale;
    j["pstar_mult"] = params.config.pstar_mult;
    j["pstar"] = static_cast<double>(params.pstar);
    return j;
}

namespace {

// One embedding trial: everything a report row may need.
struct TrialContext {
    std::size_t host;
    std::size_t family_index;
    GuestFamily family;
    std::size_t index;
    std::uint64_t seed;
    const BlockGraph& graph;
    const Hypergraph& guest;
    const DegeneracyResult& ordering;
    const EmbedReport& report;
};

// Samples each host in turn and runs its trials on the worker pool. Results
// come back in (host, family, index) order whatever the schedule.
template <typename Result, typename Fn>
std::vector<Result> run_trials(const ExperimentConfig& config, const ModelParams& params,
                               std::vector<std::size_t>* host_edges, Fn&& fn) {
    const unsigned threads = worker_count(config);
    const std::size_t per_host = config.families.size() * config.guests;
    std::vector<Result> out;
    out.reserve(config.hosts * per_host);
    for (std::size_t h = 0; h < config.hosts; ++h) {
        const BlockGraph host = sample_model(params, derive_seed(config.seed, SeedRole::host, h), config.caps(), threads);
        if (host_edges) host_edges->push_back(host.graph().num_edges());
        const std::uint64_t guest_master = derive_seed(config.seed, SeedRole::guest, h);
        std::vector<Result> results(per_host);
        detail::parallel_for(per_host, threads, [&](std::size_t slot) {
            const std::size_t f = slot / config.guests;
            const std::size_t i = slot % config.guests;
            GenSpec spec;
            spec.r = params.r();
            spec.n = config.resolved_guest_n();
            spec.D = static_cast<std::size_t>(params.D());
            spec.family = config.families[f];
            spec.seed = derive_seed(guest_master, SeedRole::trial, (std::uint64_t{f} << 32) | i);
            spec.alpha = config.alpha;
            spec.min_back_degree = config.min_back_degree;
            const Hypergraph guest = generate(spec);
            const DegeneracyResult ordering = degeneracy_ordering(guest);
            const EmbedReport report = embed(guest, ordering.ordering, host);
            results[slot] = fn(TrialContext{h, f, spec.family, i, spec.seed, host, guest, ordering, report});
        });
        for (auto& r : results) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "r") config.model.r = parse_number<int>(key, value);
    else if (key == "n") config.model.n = parse_number<std::uint64_t>(key, value);
    else if (key == "D") config.model.D = parse_number<int>(key, value);
    else if (key == "mode") config.model.mode = parse_mode(value);
    else if (key == "scale") config.model.size_scale = parse_number<double>(key, value);
    else if (key == "pstar_mult") config.model.pstar_mult = parse_number<double>(key, value);
    else if (key == "cap_edges") config.cap_edges = parse_number<std::uint64_t>(key, value);
    else if (key == "cap_vertices") config.cap_vertices = parse_number<std::uint64_t>(key, value);
    else if (key == "guest_n") config.guest_n = parse_number<std::uint64_t>(key, value);
    else if (key == "hosts") config.hosts = parse_number<std::size_t>(key, value);
    else if (key == "guests") config.guests = parse_number<std::size_t>(key, value);
    else if (key == "families") {
        std::vector<GuestFamily> families;
        std::string_view rest = value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            families.push_back(parse_family(trim(rest.substr(0, comma))));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        config.families = std::move(families);
    } else if (key == "alpha") config.alpha = parse_number<double>(key, value);
    else if (key == "min_back_degree") config.min_back_degree = parse_number<std::size_t>(key, value);
    else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threads") config.threads = parse_number<unsigned>(key, value);
    else if (key == "calib_lo") config.calib_lo = parse_number<double>(key, value);
    else if (key == "calib_hi") config.calib_hi = parse_number<double>(key, value);
    else if (key == "calib_steps") config.calib_steps = parse_number<int>(key, value);
    else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig read_config(std::istream& in, ExperimentConfig base) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        try {
            apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return base;
}

ExperimentConfig read_config_file(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    try {
        return read_config(in, std::move(base));
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

void validate(const ExperimentConfig& config) {
    const ModelParams params = compute_params(config.model);
    const auto gn = config.resolved_guest_n();
    if (gn < static_cast<std::uint64_t>(config.model.r)) throw std::invalid_argument("guest_n must be at least r");
    if (gn > params.total_vertices())
        throw std::invalid_argument("guest_n " + std::to_string(gn) + " exceeds the host's " +
                                    std::to_string(params.total_vertices()) + " vertices");
    if (config.families.empty()) throw std::invalid_argument("families must not be empty");
    if (!std::isfinite(config.alpha)) throw std::invalid_argument("alpha must be finite");
    if (config.min_back_degree > static_cast<std::size_t>(config.model.D))
        throw std::invalid_argument("min_back_degree exceeds D");
    if (!(config.calib_lo > 0) || !(config.calib_hi > config.calib_lo))
        throw std::invalid_argument("need 0 < calib_lo < calib_hi");
    if (config.calib_steps < 0) throw std::invalid_argument("calib_steps must be nonnegative");
}

std::string to_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "r = " << c.model.r << '\n'
        << "n = " << c.model.n << '\n'
        << "D = " << c.model.D << '\n'
        << "mode = " << to_string(c.model.mode) << '\n'
        << "scale = " << format_double(c.model.size_scale) << '\n'
        << "pstar_mult = " << format_double(c.model.pstar_mult) << '\n'
        << "cap_edges = " << c.cap_edges << '\n'
        << "cap_vertices = " << c.cap_vertices << '\n'
        << "guest_n = " << c.guest_n << '\n'
        << "hosts = " << c.hosts << '\n'
        << "guests = " << c.guests << '\n'
        << "families = " << join_families(c.families) << '\n'
        << "alpha = " << format_double(c.alpha) << '\n'
        << "min_back_degree = " << c.min_back_degree << '\n'
        << "seed = " << c.seed << '\n'
        << "threads = " << c.threads << '\n'
        << "calib_lo = " << format_double(c.calib_lo) << '\n'
        << "calib_hi = " << format_double(c.calib_hi) << '\n'
        << "calib_steps = " << c.calib_steps << '\n';
    return out.str();
}

nlohmann::json to_json(const ExperimentConfig& c) {
    // Worker count is left out: it never changes results, and reports stay
    // byte-identical across machines.
    return {{"r", c.model.r},
            {"n", c.model.n},
            {"D", c.model.D},
            {"mode", to_string(c.model.mode)},
            {"scale", c.model.size_scale},
            {"pstar_mult", c.model.pstar_mult},
            {"cap_edges", c.cap_edges},
            {"cap_vertices", c.cap_vertices},
            {"guest_n", c.resolved_guest_n()},
            {"hosts", c.hosts},
            {"guests", c.guests},
            {"families", join_families(c.families)},
            {"alpha", c.alpha},
            {"min_back_degree", c.min_back_degree},
            {"seed", c.seed},
            {"calib_lo", c.calib_lo},
            {"calib_hi", c.calib_hi},
            {"calib_steps", c.calib_steps}};
}

// ---------------------------------------------------------------------------

std::size_t SuccessRateReport::successes() const {
    return static_cast<std::size_t>(std::ranges::count_if(trials, [](const auto& t) { return t.success; }));
}

std::size_t SuccessRateReport::successes(GuestFamily family) const {
    return static_cast<std::size_t>(
        std::ranges::count_if(trials, [&](const auto& t) { return t.family == family && t.success; }));
}

std::size_t SuccessRateReport::count(GuestFamily family) const {
    return static_cast<std::size_t>(std::ranges::count_if(trials, [&](const auto& t) { return t.family == family; }));
}

double SuccessRateReport::success_fraction() const {
    return trials.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(trials.size());
}

SuccessRateReport run_success_rate(const ExperimentConfig& config) {
    validate(config);
    SuccessRateReport rep;
    rep.config = config;
    rep.params = compute_params(config.model);
    rep.thresholds = fill_thresholds(rep.params);
    rep.peak_occupancy.assign(static_cast<std::size_t>(rep.params.N),
                              std::vector<std::size_t>(static_cast<std::size_t>(rep.params.num_subblocks()), 0));
    rep.trials = run_trials<TrialRecord>(config, rep.params, &rep.host_edges, [](const TrialContext& c) {
        TrialRecord t;
        t.host = c.host;
        t.family = c.family;
        t.index = c.index;
        t.guest_seed = c.seed;
        t.guest_edges = c.guest.num_edges();
        t.guest_degeneracy = c.ordering.degeneracy;
        t.success = c.report.success();
        t.failed_at = c.report.failed_at;
        t.failed_block = c.report.failed_block;
        if (t.success) t.violations = verify_embedding(c.guest, c.graph.graph(), c.report.map).size();
        t.occupancy = c.report.occupancy;
        return t;
    });
    for (const auto& t : rep.trials)
        for (std::size_t k = 0; k < t.occupancy.size(); ++k)
            for (std::size_t j = 0; j < t.occupancy[k].size(); ++j)
                rep.peak_occupancy[k][j] = std::max(rep.peak_occupancy[k][j], t.occupancy[k][j]);
    return rep;
}

nlohmann::json to_json(const SuccessRateReport& rep) {
    nlohmann::json j;
    j["experiment"] = "success-rate";
    j["config"] = to_json(rep.config);
    j["params"] = to_json(rep.params);
    j["host_edges"] = rep.host_edges;
    auto& summary = j["summary"];
    summary["trials"] = rep.trials.size();
    summary["successes"] = rep.successes();
    summary["success_fraction"] = rep.success_fraction();
    for (auto f : rep.config.families)
        summary["families"][std::string(to_string(f))] = {{"trials", rep.count(f)}, {"successes", rep.successes(f)}};
    auto& trials = j["trials"] = nlohmann::json::array();
    for (const auto& t : rep.trials) {
        trials.push_back({{"host", t.host},
                          {"family", to_string(t.family)},
                          {"index", t.index},
                          {"guest_seed", t.guest_seed},
                          {"guest_edges", t.guest_edges},
                          {"guest_degeneracy", t.guest_degeneracy},
                          {"outcome", t.success ? "success" : "failed"},
                          {"failed_at", t.failed_at},
                          {"failed_block", t.failed_block},
                          {"violations", t.violations}});
    }
    j["peak_occupancy"] = rep.peak_occupancy;
    j["thresholds"] = to_json(rep.thresholds);
    return j;
}

// ---------------------------------------------------------------------------

double EdgesReport::mean() const {
    if (edge_counts.empty()) return 0.0;
    double sum = 0;
    for (auto c : edge_counts) sum += static_cast<double>(c);
    return sum / static_cast<double>(edge_counts.size());
}

EdgesReport run_edges(const ExperimentConfig& config) {
    validate(config);
    EdgesReport rep;
    rep.config = config;
    rep.params = compute_params(config.model);
    rep.expectation = expected_edges(rep.params);
    const unsigned threads = worker_count(config);
    for (std::size_t s = 0; s < config.hosts; ++s) {
        const auto seed = derive_seed(config.seed, SeedRole::host, s);
        std::size_t total = 0;
        for (const auto& st : sample_strata(rep.params, seed, config.caps(), threads)) total += st.count(rep.params.r());
        rep.seeds.push_back(seed);
        rep.edge_counts.push_back(total);
    }
    return rep;
}

nlohmann::json to_json(const EdgesReport& rep) {
    nlohmann::json j;
    j["experiment"] = "edges";
    j["config"] = to_json(rep.config);
    j["params"] = to_json(rep.params);
    auto& rows = j["hosts"] = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.seeds.size(); ++i)
        rows.push_back({{"host", i}, {"seed", rep.seeds[i]}, {"edges", rep.edge_counts[i]}});
    const double expected = rep.expectation.expected.convert_to<double>();
    const double bound = rep.expectation.closed_form_bound.convert_to<double>();
    j["mean_edges"] = rep.mean();
    j["expected_edges"] = expected;
    j["deterministic_edges"] = rep.expectation.deterministic.convert_to<double>();
    j["closed_form_bound"] = bound;
    j["bound_ratio"] = expected / bound;
    j["lower_bound"] = lower_bound_value(rep.params.r(), rep.params.n(), rep.params.D()).convert_to<double>();
    return j;
}

// ---------------------------------------------------------------------------

Lemma45Report run_lemma45(const ExperimentConfig& config) {
    validate(config);
    Lemma45Report rep;
    rep.config = config;
    rep.params = compute_params(config.model);
    auto per_trial = run_trials<std::vector<DensityRow>>(config, rep.params, nullptr, [](const TrialContext& c) {
        std::vector<DensityRow> rows;
        for (const auto& group : harvest_back_links(c.guest, c.ordering.ordering, c.graph, c.report.map)) {
            const auto wb = check_well_behaved(c.graph, group.multiset);
            const auto m = measure_candidate_density(c.graph, group.multiset, group.block, group.subblock);
            rows.push_back({c.host, c.family, c.index, c.report.success(), group.block, group.subblock,
                            group.multiset.size(), m.hits, m.size, m.observed, m.bound,
                            wb.ok() ? "ok" : wb.describe()});
        }
        return rows;
    });
    for (auto& rows : per_trial)
        for (auto& row : rows) rep.rows.push_back(std::move(row));
    return rep;
}

nlohmann::json to_json(const Lemma45Report& rep) {
    nlohmann::json j;
    j["experiment"] = "lemma45";
    j["config"] = to_json(rep.config);
    j["params"] = to_json(rep.params);
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"host", r.host},
                        {"family", to_string(r.family)},
                        {"index", r.index},
                        {"outcome", r.success ? "success" : "failed"},
                        {"k", r.block},
                        {"j", r.subblock},
                        {"t", r.t},
                        {"hits", r.hits},
                        {"size", r.size},
                        {"observed", r.observed},
                        {"bound", r.bound},
                        {"well_behaved", r.well_behaved}});
    }
    return j;
}

void write_tsv(std::ostream& out, const Lemma45Report& rep) {
    std::istringstream header(to_text(rep.config));
    for (std::string line; std::getline(header, line);)
        if (!line.starts_with("threads")) out << "# " << line << '\n';
    out << "host\tfamily\tindex\toutcome\tk\tj\tt\thits\tsize\tobserved\tbound\twell_behaved\n";
    for (const auto& r : rep.rows) {
        out << r.host << '\t' << to_string(r.family) << '\t' << r.index << '\t' << (r.success ? "success" : "failed")
            << '\t' << r.block << '\t' << r.subblock << '\t' << r.t << '\t' << r.hits << '\t' << r.size << '\t'
            << format_double(r.observed) << '\t' << format_double(r.bound) << '\t' << r.well_behaved << '\n';
    }
}

// ---------------------------------------------------------------------------

CalibrationResult calibrate(const ExperimentConfig& config) {
    validate(config);
    if (config.model.mode != ModelMode::scaled) throw std::invalid_argument("calibration needs scaled mode");
    CalibrationResult result;
    auto probe = [&](double mult) {
        ExperimentConfig c = config;
        c.model.pstar_mult = mult;
        const auto rep = run_success_rate(c);
        result.probes.push_back({mult, rep.successes(), rep.trials.size()});
        return !rep.trials.empty() && rep.successes() * 100 >= rep.trials.size() * 99;
    };
    double lo = config.calib_lo;
    double hi = config.calib_hi;
    if (!probe(hi))
        throw std::runtime_error("calibration: pstar_mult = " + format_double(hi) + " does not reach 99% success");
    if (probe(lo)) {
        hi = lo;
    } else {
        for (int step = 0; step < config.calib_steps; ++step) {
            const double mid = std::sqrt(lo * hi);
            (probe(mid) ? hi : lo) = mid;
        }
    }
    result.smallest_passing = hi;
    result.committed = 2 * hi;
    result.config = config;
    result.config.model.pstar_mult = result.committed;
    return result;
}

nlohmann::json to_json(const CalibrationResult& result) {
    nlohmann::json j;
    j["experiment"] = "calibrate";
    j["config"] = to_json(result.config);
    auto& probes = j["probes"] = nlohmann::json::array();
    for (const auto& p : result.probes)
        probes.push_back({{"pstar_mult", p.pstar_mult}, {"successes", p.successes}, {"trials", p.trials}});
    j["smallest_passing"] = result.smallest_passing;
    j["committed"] = result.committed;
    return j;
}

}  // namespace hyperuni
