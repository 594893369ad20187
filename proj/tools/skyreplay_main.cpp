// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// skyreplay command line.
//
//   skyreplay run     --config c.json [--seed N] [--out DIR] [--format csv,json]
//   skyreplay sweep   --config c.json [--seed N] [--out DIR] [--jobs N] [--format csv,json]
//   skyreplay replay  --config c.json [--stage 1|2|both] [--capture FILE] [--out DIR]
//   skyreplay analyze FILE.cf32 [--config c.json] [--rate HZ] [--out DIR]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "skyreplay/io.hpp"
#include "skyreplay/metrics.hpp"
#include "skyreplay/receiver.hpp"
#include "skyreplay/scenario.hpp"

namespace fs = std::filesystem;
using namespace skyreplay;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<unsigned> jobs;
    std::vector<std::string> formats;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required) {
    auto* c = cmd->add_option("--config", o.config, "JSON run configuration");
    if (config_required) c->required();
    cmd->add_option("--seed", o.seed, "Override the configured seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--jobs", o.jobs, "Parallel scenario runs")->check(CLI::PositiveNumber);
    cmd->add_option("--format", o.formats, "Report formats (csv, json)")->delimiter(',');
}

RunConfig resolve(const CommonOptions& o) {
    RunConfig cfg = load_config(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.scenario.seed = *o.seed;
    }
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.jobs) cfg.jobs = *o.jobs;
    if (!o.formats.empty()) {
        cfg.formats.clear();
        for (const auto& f : o.formats) {
            try {
                cfg.formats.push_back(parse_report_format(f));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("--format: ") + e.what());
            }
        }
    }
    return cfg;
}

bool wants(const RunConfig& cfg, ReportFormat f) {
    for (auto g : cfg.formats)
        if (g == f) return true;
    return false;
}

int cmd_run(const CommonOptions& o) {
    const RunConfig cfg = resolve(o);
    const ScenarioOutcome outcome = run_scenario(cfg.scenario, cfg.receiver);
    if (wants(cfg, ReportFormat::CSV))
        write_text_file(cfg.out_dir / "run.csv", outcome_csv(cfg.scenario, outcome, cfg.receiver.profile));
    if (wants(cfg, ReportFormat::JSON))
        write_text_file(cfg.out_dir / "run.json", outcome_json(cfg.scenario, outcome, cfg.receiver.profile));
    for (const auto& s : outcome.stations)
        std::cout << to_string(s.station) << ": BER " << 100.0 * s.ber << " %, SNR " << s.snr_db << " dB, "
                  << (s.diagnostics.lock_flag ? "locked" : "unlocked") << "\n";
    if (outcome.bfs_majority)
        std::cout << "BFS: BER " << 100.0 * outcome.bfs_ber << " % (mostly " << to_string(*outcome.bfs_majority)
                  << ")\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& o, std::optional<int> experiment, std::optional<std::size_t> n_seeds) {
    RunConfig cfg = resolve(o);
    if (experiment) {
        try {
            cfg.sweep = SweepSpec::experiment(*experiment, cfg.scenario.phase);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--experiment: ") + e.what());
        }
    }
    SweepSpec sweep = cfg.resolved_sweep();
    if (n_seeds) sweep.n_seeds = *n_seeds;
    const ExperimentReport report = run_experiment(sweep);
    const auto files = emit_report(report, cfg.out_dir, cfg.formats);
    std::cout << "rows: " << report.rows.size() << "\n";
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    return kExitOk;
}

int cmd_replay(const CommonOptions& o, const std::string& stage, const std::string& capture_path) {
    const RunConfig cfg = resolve(o);
    const ScenarioSpec& spec = cfg.scenario;
    if (!spec.attacker.present()) throw ConfigError("replay needs an attacker platform");
    const IQBuffer tx = scenario_waveform(spec);

    const fs::path cap_file = capture_path.empty() ? cfg.out_dir / "capture.cf32" : fs::path(capture_path);
    if (stage == "1" || stage == "both") {
        const IQBuffer capture = stage1_capture(spec, tx);
        write_iq(cap_file, capture, {capture.sample_rate(), capture.carrier_freq(), "stage 1 capture", spec.seed});
        std::cout << "wrote " << cap_file.string() << " (" << capture.size() << " samples)\n";
    }
    if (stage == "2" || stage == "both") {
        IqFile cap = read_iq(cap_file, spec.modem.sample_rate);
        for (const auto& w : cap.warnings) std::cerr << "warning: " << w << "\n";
        const Station victim = spec.victim();
        const IQBuffer composite = stage2_compose(spec, tx, cap.buffer, victim);
        const fs::path comp_file = cfg.out_dir / "composite.cf32";
        write_iq(comp_file, composite, {composite.sample_rate(), composite.carrier_freq(), "stage 2 composite", spec.seed});
        const ReceiveResult rx = receive(composite, receiver_for(spec, victim, cfg.receiver), spec.modem, spec.frame);
        std::cout << "wrote " << comp_file.string() << "\n"
                  << to_string(victim) << ": BER " << 100.0 * rx.alignment->ber << " %\n";
    }
    return kExitOk;
}

int cmd_analyze(const CommonOptions& o, const std::string& input, std::optional<double> rate) {
    std::optional<RunConfig> cfg;
    if (!o.config.empty()) cfg = resolve(o);
    IqFile file = read_iq(input, rate);
    for (const auto& w : file.warnings) std::cerr << "warning: " << w << "\n";

    ScenarioSpec spec = cfg ? cfg->scenario : ScenarioSpec::preset(MissionPhase::ReentryDL);
    ReceiverConfig rxcfg = cfg ? receiver_for(spec, spec.victim(), cfg->receiver) : ReceiverConfig::baseline();
    if (!cfg) rxcfg.sampling_offset_mode = SamplingOffsetMode::Estimated;
    spec.modem.sample_rate = file.buffer.sample_rate();

    const ReceiveResult rx = receive(file.buffer, rxcfg, spec.modem, spec.frame);
    const auto power = digital_power(file.buffer);
    const std::size_t skip = std::min(rxcfg.warmup_symbols, rx.symbols.size() / 2);
    std::optional<SnrEstimate> snr;
    if (rx.symbols.size() - skip >= kSnrMinSymbols)
        snr = estimate_snr(std::span<const cplx>(rx.symbols).subspan(skip));

    std::string csv = "file,samples,ber_percent,snr_db_blind,lock,power_median,power_q1,power_q3\n";
    PowerStats ps;
    if (power.size() >= 5) ps = boxplot_stats(power);
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", input, file.buffer.size(),
                       rx.alignment ? 100.0 * rx.alignment->ber : 0.0, snr ? snr->db : 0.0,
                       rx.diagnostics.lock_flag ? 1 : 0, ps.median, ps.q1, ps.q3);
    const fs::path out_dir = o.out.empty() ? (cfg ? cfg->out_dir : fs::path("out")) : fs::path(o.out);
    write_text_file(out_dir / "analysis.csv", csv);
    std::cout << csv;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Record-and-replay attack simulator for QPSK telemetry links"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, replay_opts, analyze_opts;
    auto* run = app.add_subcommand("run", "Run one scenario");
    add_common(run, run_opts, true);

    auto* sweep = app.add_subcommand("sweep", "Run an experiment template over a gain grid");
    add_common(sweep, sweep_opts, true);
    std::optional<int> experiment;
    std::optional<std::size_t> n_seeds;
    sweep->add_option("--experiment", experiment, "Experiment template 1, 2 or 3 (overrides the config)");
    sweep->add_option("--n-seeds", n_seeds, "Seeds per row")->check(CLI::PositiveNumber);

    auto* replay = app.add_subcommand("replay", "Stage 1 capture to file and/or Stage 2 composite from file");
    add_common(replay, replay_opts, true);
    std::string stage = "both", capture_path;
    replay->add_option("--stage", stage, "1, 2 or both")->check(CLI::IsMember({"1", "2", "both"}));
    replay->add_option("--capture", capture_path, "Capture file (default <out>/capture.cf32)");

    auto* analyze = app.add_subcommand("analyze", "Recompute metrics from a stored IQ file");
    add_common(analyze, analyze_opts, false);
    std::string input;
    std::optional<double> rate;
    analyze->add_option("input", input, "IQ data file (.cf32)")->required();
    analyze->add_option("--rate", rate, "Sample rate when the sidecar is missing")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*sweep) return cmd_sweep(sweep_opts, experiment, n_seeds);
        if (*replay) return cmd_replay(replay_opts, stage, capture_path);
        if (*analyze) return cmd_analyze(analyze_opts, input, rate);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
