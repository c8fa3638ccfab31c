#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperuni/block_model.hpp"
#include "hyperuni/generators.hpp"

namespace hyperuni {

// Everything an experiment needs, read from a flat `key = value` file and
// overridable key by key. Unknown keys are rejected.
//
//   r n D mode scale pstar_mult     model knobs
//   cap_edges cap_vertices          sampling caps
//   guest_n                         guest size (0: the model's n)
//   hosts guests                    hosts sampled, guests per family per host
//   families                        comma list of uniform, capped, skew
//   alpha min_back_degree           generator knobs
//   seed threads                    master seed, worker count (0: default)
//   calib_lo calib_hi calib_steps   pstar_mult search bracket and bisection steps
struct ExperimentConfig {
    ModelConfig model;
    std::uint64_t cap_edges = SampleCaps{}.max_edges;
    std::uint64_t cap_vertices = SampleCaps{}.max_vertices;
    std::uint64_t guest_n = 0;
    std::size_t hosts = 1;
    std::size_t guests = 100;
    std::vector<GuestFamily> families{GuestFamily::uniform, GuestFamily::capped};
    double alpha = 1.0;
    std::size_t min_back_degree = 0;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double calib_lo = 1e-9;
    double calib_hi = 1.0;
    int calib_steps = 24;

    SampleCaps caps() const { return {cap_edges, cap_vertices}; }
    std::uint64_t resolved_guest_n() const { return guest_n == 0 ? model.n : guest_n; }
};

/// Sets one key. Throws std::invalid_argument on an unknown key or bad value.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads `key = value` lines; `#` starts a comment. Throws ParseError.
ExperimentConfig read_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig read_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// Checks every field, including that the model parameters resolve.
/// Throws std::invalid_argument.
void validate(const ExperimentConfig& config);

/// Every key in a fixed order, in a form read_config accepts.
std::string to_text(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const ModelParams& params);

// ---------------------------------------------------------------------------
// success-rate

struct TrialRecord {
    std::size_t host = 0;
    GuestFamily family = GuestFamily::uniform;
    std::size_t index = 0;  // within (host, family)
    std::uint64_t guest_seed = 0;
    std::size_t guest_edges = 0;
    std::size_t guest_degeneracy = 0;
    bool success = false;
    std::size_t failed_at = 0;
    int failed_block = 0;
    std::size_t violations = 0;  // from verify_embedding, successes only
    std::vector<std::vector<std::size_t>> occupancy;
};

struct SuccessRateReport {
    ExperimentConfig config;
    ModelParams params;
    std::vector<std::size_t> host_edges;
    std::vector<TrialRecord> trials;  // host-major, then family, then index
    std::vector<std::vector<std::size_t>> peak_occupancy;  // over all trials
    std::vector<std::vector<long double>> thresholds;

    std::size_t successes() const;
    std::size_t successes(GuestFamily family) const;
    std::size_t count(GuestFamily family) const;
    double success_fraction() const;
};

/// Samples `hosts` hosts and embeds `guests` guests of every family into each.
/// Host h uses derive_seed(seed, host, h); guest i of family f on host h uses
/// derive_seed(derive_seed(seed, guest, h), trial, f << 32 | i).
SuccessRateReport run_success_rate(const ExperimentConfig& config);
nlohmann::json to_json(const SuccessRateReport& report);

// ---------------------------------------------------------------------------
// edges

struct EdgesReport {
    ExperimentConfig config;
    ModelParams params;
    EdgeExpectation expectation;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> edge_counts;

    double mean() const;
};

EdgesReport run_edges(const ExperimentConfig& config);
nlohmann::json to_json(const EdgesReport& report);

// ---------------------------------------------------------------------------
// lemma45

struct DensityRow {
    std::size_t host = 0;
    GuestFamily family = GuestFamily::uniform;
    std::size_t index = 0;
    bool success = false;
    int block = 0;
    int subblock = 0;
    std::size_t t = 0;
    std::size_t hits = 0;
    std::size_t size = 0;
    double observed = 0;
    double bound = 0;
    std::string well_behaved;  // "ok" or the first violated clause
};

struct Lemma45Report {
    ExperimentConfig config;
    ModelParams params;
    std::vector<DensityRow> rows;
};

/// Runs the success-rate trials and, per trial, measures candidate density for
/// every sub-block that received placed vertices.
Lemma45Report run_lemma45(const ExperimentConfig& config);
nlohmann::json to_json(const Lemma45Report& report);
/// Tab-separated rows preceded by `# key = value` config lines.
void write_tsv(std::ostream& out, const Lemma45Report& report);

// ---------------------------------------------------------------------------
// calibration

struct CalibrationProbe {
    double pstar_mult = 0;
    std::size_t successes = 0;
    std::size_t trials = 0;
};

struct CalibrationResult {
    ExperimentConfig config;  // with pstar_mult set to the committed value
    std::vector<CalibrationProbe> probes;
    double smallest_passing = 0;
    double committed = 0;
};

/// Bisects log(pstar_mult) in [calib_lo, calib_hi] for the smallest value at
/// which at least 99% of the success-rate trials succeed, then doubles it.
/// Every probe reuses the same seeds. Throws std::runtime_error when calib_hi
/// does not pass.
CalibrationResult calibrate(const ExperimentConfig& config);
nlohmann::json to_json(const CalibrationResult& result);

}  // namespace hyperuni
