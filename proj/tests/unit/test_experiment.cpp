#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hyperuni/errors.hpp"
#include "hyperuni/experiment.hpp"
#include "hyperuni/random.hpp"

using namespace hyperuni;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return read_config(in);
}

std::size_t error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

// A 10-vertex scaled host that is complete because every p clamps to 1.
ExperimentConfig complete_host() {
    return parse(
        "r = 2\nn = 100\nD = 2\nmode = scaled\nscale = 0.1\npstar_mult = 1000\n"
        "guest_n = 7\nhosts = 2\nguests = 5\nseed = 3\n");
}

// About 10k edges on 104 vertices; embeddings sometimes fail.
ExperimentConfig sparse_host() {
    return parse(
        "r = 3\nn = 2000\nD = 2\nmode = scaled\nscale = 0.1\npstar_mult = 1e-6\n"
        "guest_n = 20\nhosts = 2\nguests = 6\nfamilies = uniform, capped, skew\nseed = 9\n");
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
    const auto c = parse(
        "# comment\n\nr = 3\n  n=4096  \nD = 3 # trailing\nmode = paper-exact\nfamilies = capped,skew\n"
        "guest_n = 50\nseed = 18446744073709551615\ncalib_steps = 3\n");
    EXPECT_EQ(c.model.r, 3);
    EXPECT_EQ(c.model.n, 4096u);
    EXPECT_EQ(c.model.D, 3);
    EXPECT_EQ(c.model.mode, ModelMode::paper_exact);
    EXPECT_EQ(c.families, (std::vector<GuestFamily>{GuestFamily::capped, GuestFamily::skew}));
    EXPECT_EQ(c.guest_n, 50u);
    EXPECT_EQ(c.resolved_guest_n(), 50u);
    EXPECT_EQ(c.seed, 18446744073709551615ULL);
    EXPECT_EQ(c.calib_steps, 3);
    EXPECT_EQ(ExperimentConfig{}.resolved_guest_n(), 0u);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("r = 2\nbogus = 1\n"), 2u);
    EXPECT_EQ(error_line("r = 2\n\nn 100\n"), 3u);
    EXPECT_EQ(error_line("# x\nr = two\n"), 2u);
    EXPECT_EQ(error_line("mode = exact\n"), 1u);
    EXPECT_EQ(error_line("families = uniform,nope\n"), 1u);
    EXPECT_EQ(error_line("hosts = -1\n"), 1u);
    EXPECT_EQ(error_line("seed = 1x\n"), 1u);
    ExperimentConfig c;
    EXPECT_THROW(apply_setting(c, "unknown", "1"), std::invalid_argument);
    EXPECT_THROW(read_config_file("/nonexistent/hyperuni.cfg"), std::invalid_argument);
}

TEST(Config, TextRoundTrips) {
    auto c = sparse_host();
    c.alpha = 0.3;
    c.calib_lo = 1.25e-7;
    const auto text = to_text(c);
    EXPECT_EQ(to_text(parse(text)), text);
    const auto j = to_json(c);
    EXPECT_FALSE(j.contains("threads"));
    EXPECT_EQ(j.at("guest_n"), 20);
}

TEST(Config, Validation) {
    EXPECT_NO_THROW(validate(sparse_host()));
    auto bad = [](const std::string& key, const std::string& value) {
        auto c = sparse_host();
        apply_setting(c, key, value);
        EXPECT_THROW(validate(c), std::invalid_argument) << key << " = " << value;
    };
    bad("n", "16");
    bad("guest_n", "2");
    bad("guest_n", "100000");
    bad("families", "");
    bad("min_back_degree", "3");
    bad("calib_lo", "2");
    bad("calib_lo", "0");
    bad("calib_steps", "-1");
    bad("scale", "0");
}

TEST(Config, ShippedFilesValidate) {
    for (const char* name : {"calibration.cfg", "calibrated.cfg"}) {
        const auto c = read_config_file(std::string(HYPERUNI_CONFIG_DIR) + "/" + name);
        EXPECT_NO_THROW(validate(c)) << name;
        EXPECT_EQ(c.model.mode, ModelMode::scaled);
    }
}

TEST(SuccessRate, NoGuestsGivesEmptyReport) {
    auto c = complete_host();
    c.guests = 0;
    const auto rep = run_success_rate(c);
    EXPECT_TRUE(rep.trials.empty());
    EXPECT_EQ(rep.successes(), 0u);
    EXPECT_EQ(rep.host_edges.size(), 2u);
}

TEST(SuccessRate, CompleteHostAlwaysSucceeds) {
    const auto c = complete_host();
    const auto rep = run_success_rate(c);
    const std::size_t v = rep.params.total_vertices();
    for (auto e : rep.host_edges) EXPECT_EQ(e, v * (v - 1) / 2);
    ASSERT_EQ(rep.trials.size(), 2u * 5u * 2u);
    EXPECT_EQ(rep.success_fraction(), 1.0);
    for (const auto& t : rep.trials) EXPECT_EQ(t.violations, 0u);
}

TEST(SuccessRate, LayoutAndSeeds) {
    const auto c = sparse_host();
    const auto rep = run_success_rate(c);
    ASSERT_EQ(rep.trials.size(), 2u * 3u * 6u);
    std::size_t i = 0;
    for (std::size_t h = 0; h < 2; ++h)
        for (std::size_t f = 0; f < 3; ++f)
            for (std::size_t g = 0; g < 6; ++g, ++i) {
                const auto& t = rep.trials[i];
                EXPECT_EQ(t.host, h);
                EXPECT_EQ(t.family, c.families[f]);
                EXPECT_EQ(t.index, g);
                EXPECT_EQ(t.guest_seed,
                          derive_seed(derive_seed(c.seed, SeedRole::guest, h), SeedRole::trial, f << 32 | g));
                EXPECT_LE(t.guest_degeneracy, 2u);
                if (!t.success) EXPECT_GT(t.failed_at, 0u);
            }
    for (auto f : c.families) EXPECT_EQ(rep.count(f), 12u);
    std::size_t by_family = 0;
    for (auto f : c.families) by_family += rep.successes(f);
    EXPECT_EQ(by_family, rep.successes());
}

TEST(SuccessRate, IndependentOfThreadCount) {
    auto c = sparse_host();
    c.threads = 1;
    const auto one = to_json(run_success_rate(c));
    c.threads = 3;
    const auto three = to_json(run_success_rate(c));
    EXPECT_EQ(one, three);
}

TEST(Edges, ZeroMultiplierIsDeterministic) {
    auto c = sparse_host();
    c.model.pstar_mult = 0;
    c.hosts = 1;
    const auto rep = run_edges(c);
    ASSERT_EQ(rep.edge_counts.size(), 1u);
    EXPECT_EQ(BigFloat(rep.edge_counts[0]), rep.expectation.deterministic);
    EXPECT_EQ(rep.mean(), static_cast<double>(rep.edge_counts[0]));
}

TEST(Edges, MeanTracksExpectation) {
    auto c = sparse_host();
    c.hosts = 20;
    const auto rep = run_edges(c);
    const double expected = static_cast<double>(rep.expectation.expected);
    EXPECT_NEAR(rep.mean(), expected, 0.05 * expected);
    EXPECT_EQ(rep.seeds.size(), 20u);
}

TEST(Lemma45, EmptyRunHasNoRows) {
    auto c = sparse_host();
    c.guests = 0;
    const auto rep = run_lemma45(c);
    EXPECT_TRUE(rep.rows.empty());
    std::ostringstream out;
    write_tsv(out, rep);
    std::istringstream lines(out.str());
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("# ", 0) == 0) {
            EXPECT_EQ(line.find("threads"), std::string::npos);
            continue;
        }
        EXPECT_EQ(line.rfind("host\t", 0), 0u) << line;
    }
}

TEST(Lemma45, RowsDescribePlacedSubblocks) {
    const auto c = sparse_host();
    const auto rep = run_lemma45(c);
    ASSERT_FALSE(rep.rows.empty());
    for (const auto& row : rep.rows) {
        EXPECT_GT(row.t, 0u);
        EXPECT_GT(row.size, 0u);
        EXPECT_LE(row.hits, row.size);
        EXPECT_DOUBLE_EQ(row.observed, static_cast<double>(row.hits) / static_cast<double>(row.size));
        EXPECT_LE(row.bound, 1.0 / 16);
        EXPECT_FALSE(row.well_behaved.empty());
    }
    std::ostringstream out;
    write_tsv(out, rep);
    std::istringstream lines(out.str());
    std::string line;
    std::size_t data = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 11) << line;
        ++data;
    }
    EXPECT_EQ(data, rep.rows.size() + 1);
}

TEST(Calibrate, BisectsAndDoubles) {
    auto c = sparse_host();
    c.hosts = 1;
    c.guests = 4;
    c.calib_lo = 1e-8;
    c.calib_hi = 1e-3;
    c.calib_steps = 5;
    const auto res = calibrate(c);
    ASSERT_EQ(res.probes.size(), 2u + 5u);
    EXPECT_EQ(res.committed, 2 * res.smallest_passing);
    EXPECT_EQ(res.config.model.pstar_mult, res.committed);
    bool found = false;
    for (const auto& p : res.probes) {
        EXPECT_EQ(p.trials, 4u * 3u);  // one host, four guests, three families
        if (p.pstar_mult == res.smallest_passing) {
            found = true;
            EXPECT_GE(p.successes * 100, p.trials * 99);
        }
    }
    EXPECT_TRUE(found);
}

TEST(Calibrate, Preconditions) {
    auto c = sparse_host();
    c.calib_lo = 1e-14;
    c.calib_hi = 1e-12;
    EXPECT_THROW(calibrate(c), std::runtime_error);
    c.model.mode = ModelMode::paper_exact;
    EXPECT_THROW(calibrate(c), std::invalid_argument);
}
