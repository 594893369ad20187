// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "skyreplay/io.hpp"

namespace fs = std::filesystem;
using namespace skyreplay;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("skyreplay_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error(std::string_view text) {
    try {
        (void)parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cells.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        out.push_back(std::move(cells));
    }
    return out;
}

ExperimentReport small_report() {
    auto sweep = SweepSpec::experiment(1, MissionPhase::ReentryDL);
    sweep.platforms = {Platform::RQ4};
    sweep.n_seeds = 1;
    auto base = ScenarioSpec::preset(MissionPhase::ReentryDL);
    base.n_frames = 8;
    sweep.base = base;
    return run_experiment(sweep);
}

}  // namespace

TEST_CASE("config: minimal preset") {
    const auto cfg = parse_config(R"({"preset": "reentry-ul", "seed": 7})");
    CHECK(cfg.scenario.phase == MissionPhase::ReentryUL);
    CHECK(cfg.seed == 7);
    CHECK(cfg.scenario.seed == 7);
    CHECK(cfg.scenario.attacker.name == Platform::RQ4);
    CHECK(cfg.receiver.profile == ReceiverProfile::Baseline);
    CHECK(cfg.formats == std::vector<ReportFormat>{ReportFormat::CSV});
    CHECK_FALSE(cfg.sweep.has_value());
}

TEST_CASE("config: overrides") {
    const auto cfg = parse_config(R"({
        "preset": "launch-dl", "seed": 3, "platform": "MQ9",
        "attacker": {"output_gain_db": -35, "input_gain_db": -10},
        "legit_input_gain_db": -5,
        "receiver": {"profile": "hardened", "sampling_offset_mode": "estimated"},
        "sweep": {"experiment": 3, "n_seeds": 4},
        "output": {"dir": "o", "formats": ["json", "csv"]},
        "jobs": 2
    })");
    CHECK(cfg.scenario.attacker.name == Platform::MQ9);
    CHECK(cfg.scenario.attacker.output_gain_db == -35.0);
    CHECK(cfg.scenario.attacker.input_gain_db == -10.0);
    CHECK(cfg.scenario.legit_input_gain_db == -5.0);
    CHECK(cfg.receiver.profile == ReceiverProfile::Hardened);
    CHECK(cfg.receiver.sampling_offset_mode == SamplingOffsetMode::Estimated);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->kind == ExperimentKind::LegitGain);
    CHECK(cfg.sweep->n_seeds == 4);
    CHECK(cfg.out_dir == fs::path("o"));
    CHECK(cfg.formats == std::vector<ReportFormat>{ReportFormat::JSON, ReportFormat::CSV});
    const auto sw = cfg.resolved_sweep();
    CHECK(sw.seed == 3);
    CHECK(sw.jobs == 2);
    CHECK(sw.profile == ReceiverProfile::Hardened);
    CHECK(sw.phase == MissionPhase::LaunchDL);
}

TEST_CASE("config: geometry override reaches the link delay") {
    const auto cfg = parse_config(R"({"preset": "reentry-ul", "seed": 1, "geometry": {"d4_km": 8.74}})");
    const double d = cfg.scenario.link_distance_km(LinkId::GSR_OR);
    CHECK(std::abs(propagation_delay(d) - 29.153e-6) < 1e-9);
    const auto moved = parse_config(R"({"preset": "reentry-ul", "seed": 1, "geometry": {"d4_km": 10.0}})");
    CHECK(moved.scenario.link_distance_km(LinkId::GSR_OR) == 10.0);
}

TEST_CASE("config: errors") {
    CHECK(config_error(R"({"preset": "reentry-dl"})").find("seed") != std::string::npos);
    CHECK(config_error(R"({"seed": 1})").find("preset") != std::string::npos);

    const auto typo = config_error(R"({"preset": "reentry-dl", "seed": 1, "attakcer": {}})");
    CHECK(typo.find("attakcer") != std::string::npos);
    const auto nested = config_error(R"({"preset": "reentry-dl", "seed": 1, "attacker": {"gain": 1}})");
    CHECK(nested.find("attacker") != std::string::npos);
    CHECK(nested.find("\"gain\"") != std::string::npos);

    const auto syntax = config_error("{\n  \"preset\": \"reentry-dl\",\n  \"seed\": ,\n}");
    CHECK(syntax.find("cfg.json:3:") != std::string::npos);

    CHECK_FALSE(config_error(R"({"preset": "orbit", "seed": 1})").empty());
    CHECK_FALSE(config_error(R"({"preset": "reentry-dl", "seed": -1})").empty());
    CHECK_FALSE(config_error(R"({"preset": "reentry-dl", "seed": 1, "n_frames": 0})").empty());
    CHECK_FALSE(config_error(R"({"preset": "reentry-dl", "seed": 1, "output": {"formats": ["xml"]}})").empty());
    CHECK_FALSE(config_error(R"({"preset": "reentry-dl", "seed": 1, "receiver": "fast"})").empty());
    CHECK_THROWS_AS((void)load_config("/nonexistent/skyreplay.json"), ConfigError);
}

TEST_CASE("iq: float32 layout and round trip") {
    TempDir dir("iq_roundtrip");
    const std::vector<cplx> s{{1.0, -1.0}, {0.5, 0.25}, {-2.0, 0.0}, {0.0, 3.0}};
    const IQBuffer buf(s, 250'000.0);
    const fs::path data = dir.path / "x.cf32";
    write_iq(data, buf, {250'000.0, kDefaultCarrierHz, "unit", 42});
    CHECK(fs::file_size(data) == 32);
    CHECK(iq_sidecar_path(data) == dir.path / "x.json");

    // Little-endian interleaved I, Q.
    const std::string raw = slurp(data);
    float f[8];
    std::memcpy(f, raw.data(), sizeof f);
    CHECK(f[0] == 1.0f);
    CHECK(f[1] == -1.0f);
    CHECK(f[7] == 3.0f);

    const auto back = read_iq(data);
    CHECK(back.buffer == buf);
    CHECK(back.metadata.sample_rate == 250'000.0);
    CHECK(back.metadata.description == "unit");
    CHECK(back.metadata.seed == 42u);
    CHECK(back.warnings.empty());

    const auto side = nlohmann::json::parse(slurp(iq_sidecar_path(data)));
    CHECK(side["samples"] == 4);
}

TEST_CASE("iq: bit-identical for float-representable buffers") {
    TempDir dir("iq_bits");
    std::vector<cplx> s;
    for (int i = 0; i < 1000; ++i)
        s.emplace_back(static_cast<float>(std::sin(0.01 * i)), static_cast<float>(std::cos(0.37 * i)));
    const IQBuffer buf(s, 125'000.0, 2.2e9);
    write_iq(dir.path / "y.cf32", buf);
    const auto back = read_iq(dir.path / "y.cf32");
    CHECK(back.buffer == buf);
    CHECK(back.buffer.carrier_freq() == 2.2e9);
}

TEST_CASE("iq: missing sidecar and truncated data") {
    TempDir dir("iq_bad");
    const fs::path data = dir.path / "z.cf32";
    write_iq(data, IQBuffer(std::vector<cplx>(8, {1.0, 2.0}), 250'000.0));
    fs::remove(iq_sidecar_path(data));
    CHECK_THROWS((void)read_iq(data));
    const auto f = read_iq(data, 250'000.0);
    CHECK(f.buffer.size() == 8);
    CHECK(f.buffer.sample_rate() == 250'000.0);
    CHECK(f.warnings.size() == 1);

    // Seven floats: odd count.
    fs::resize_file(data, 28);
    CHECK_THROWS((void)read_iq(data, 250'000.0));
    fs::resize_file(data, 30);
    CHECK_THROWS((void)read_iq(data, 250'000.0));
}

TEST_CASE("report: rows, reference and format agreement") {
    const auto report = small_report();
    const auto csv = report_csv(report);
    const auto table = split_csv(csv);
    REQUIRE(table.size() == 8);  // header + reference + 6 grid points
    CHECK(table[0].size() == 14);
    CHECK(table[0][5] == "ber_percent");
    CHECK(table[1][1] == "None");
    CHECK(table[1][2].empty());
    CHECK(std::stod(table[1][7]) == 0.0);

    const auto j = nlohmann::json::parse(report_json(report));
    REQUIRE(j["rows"].size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        const auto& row = j["rows"][i];
        const auto& cells = table[i + 1];
        CHECK(std::stod(cells[5]) == row["ber_percent"].get<double>());
        CHECK(std::stod(cells[7]) == row["delta_snr_db"].get<double>());
        CHECK(std::stod(cells[8]) == row["power_median"].get<double>());
        CHECK(cells[13] == row["station"].get<std::string>());
    }
    CHECK(report_csv(small_report()) == csv);
}

TEST_CASE("report: emitted files") {
    TempDir dir("report");
    const auto report = small_report();
    const auto files = emit_report(report, dir.path, {ReportFormat::CSV, ReportFormat::JSON});
    CHECK(slurp(dir.path / "report.csv") == report_csv(report));
    CHECK(slurp(dir.path / "report.json") == report_json(report));
    const fs::path plot = dir.path / "plot" / "output-gain_reentry-dl_GSR_RQ4.dat";
    REQUIRE(fs::exists(plot));
    const auto lines = split_csv(slurp(plot));
    CHECK(lines.size() == 7);  // comment + 6 grid points
    CHECK(files.size() == 3);
}

TEST_CASE("report formats") {
    CHECK(parse_report_format("csv") == ReportFormat::CSV);
    CHECK(parse_report_format("json") == ReportFormat::JSON);
    CHECK(to_string(ReportFormat::JSON) == "json");
    CHECK_THROWS((void)parse_report_format("xml"));
}
