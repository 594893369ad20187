// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// Run configuration, IQ recordings and report emission.
//
// Config files are JSON. Unknown keys are rejected and a seed is mandatory.
// IQ recordings are interleaved little-endian float32 (I, Q) with a JSON
// sidecar of the same basename.

#ifndef SKYREPLAY_IO_HPP
#define SKYREPLAY_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skyreplay/iq_buffer.hpp"
#include "skyreplay/receiver.hpp"
#include "skyreplay/scenario.hpp"

namespace skyreplay {

/// Bad, missing or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ReportFormat { CSV, JSON };

[[nodiscard]] std::string_view to_string(ReportFormat f) noexcept;
[[nodiscard]] ReportFormat parse_report_format(std::string_view s);

struct RunConfig {
    std::string preset = "reentry-dl";
    ScenarioSpec scenario;
    ReceiverConfig receiver;
    std::optional<SweepSpec> sweep;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    std::vector<ReportFormat> formats{ReportFormat::CSV};
    unsigned jobs = 1;

    /// Sweep with the run-level seed, jobs, receiver profile and scenario base applied.
    [[nodiscard]] SweepSpec resolved_sweep() const;
};

/// Throws ConfigError. `origin` names the source in messages.
[[nodiscard]] RunConfig parse_config(std::string_view text, std::string_view origin = "<config>");
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

struct IqMetadata {
    double sample_rate = 0.0;
    double carrier_freq = kDefaultCarrierHz;
    std::string description;
    std::optional<std::uint64_t> seed;
};

struct IqFile {
    IQBuffer buffer;
    IqMetadata metadata;
    std::vector<std::string> warnings;
};

/// Sidecar path for a data file: same basename, ".json" extension.
[[nodiscard]] std::filesystem::path iq_sidecar_path(const std::filesystem::path& data_path);

/// Writes `<path>` and its sidecar. The sidecar's sample_rate and
/// carrier_freq come from the buffer.
void write_iq(const std::filesystem::path& path, const IQBuffer& buffer, const IqMetadata& meta = {});

/// Missing sidecar: proceeds with `fallback_rate` and a warning, or throws
/// when no rate is given. Odd float count throws.
[[nodiscard]] IqFile read_iq(const std::filesystem::path& path,
                             std::optional<double> fallback_rate = std::nullopt);

// Report serialization. Output is a pure function of the report.
[[nodiscard]] std::string report_csv(const ExperimentReport& report);
[[nodiscard]] std::string report_json(const ExperimentReport& report);

/// Plot-ready series: one entry per (station, platform) holding
/// swept value, delta SNR and BER columns.
struct PlotSeries {
    std::string name;
    std::string text;
};
[[nodiscard]] std::vector<PlotSeries> report_plot_series(const ExperimentReport& report);

/// Writes <stem>.csv / <stem>.json and plot series under `dir`. Returns the
/// files written.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                                               const std::vector<ReportFormat>& formats,
                                               std::string_view stem = "report");

/// Summary of a single scenario run.
[[nodiscard]] std::string outcome_csv(const ScenarioSpec& spec, const ScenarioOutcome& outcome,
                                      ReceiverProfile profile);
[[nodiscard]] std::string outcome_json(const ScenarioSpec& spec, const ScenarioOutcome& outcome,
                                       ReceiverProfile profile);

/// Writes `text` to `path`, creating parent directories. Throws std::runtime_error.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace skyreplay

#endif  // SKYREPLAY_IO_HPP
