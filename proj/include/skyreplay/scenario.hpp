// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// Launch / reentry geometry, the two-stage record-and-replay attacker, per-link
// channel construction, the Best Frame Selector and the three experiment
// templates (attacker output gain, attacker input gain, legitimate gain).

#ifndef SKYREPLAY_SCENARIO_HPP
#define SKYREPLAY_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skyreplay/channel.hpp"
#include "skyreplay/iq_buffer.hpp"
#include "skyreplay/metrics.hpp"
#include "skyreplay/modem.hpp"
#include "skyreplay/receiver.hpp"

namespace skyreplay {

enum class MissionPhase { LaunchDL, ReentryUL, ReentryDL };
enum class Platform { RQ4, MQ9, None };
enum class Station { GS1, GS2, GSR, Orion };

/// Directed radio links. Naming is source_destination.
enum class LinkId { OR_GS1, OR_GS2, OR_ADV, ADV_GS1, GSR_OR, GSR_ADV, ADV_OR, OR_GSR, ADV_GSR };

[[nodiscard]] std::string_view to_string(MissionPhase p) noexcept;
[[nodiscard]] std::string_view to_string(Platform p) noexcept;
[[nodiscard]] std::string_view to_string(Station s) noexcept;
[[nodiscard]] std::string_view to_string(LinkId l) noexcept;
[[nodiscard]] MissionPhase parse_phase(std::string_view s);
[[nodiscard]] Platform parse_platform(std::string_view s);

inline constexpr double kKmhToMs = 1.0 / 3.6;

/// Seconds for a one-way hop of `distance_km`.
[[nodiscard]] double propagation_delay(double distance_km);

// Arrival angles between the moving node's velocity and the incoming wave.
struct LinkAngles {
    double legit = 0.0;             // rad, capsule <-> ground station
    double capsule_attacker = 0.0;  // rad
    double ground_attacker = 0.0;   // rad
};

struct GeometrySpec {
    // Launch: d1 GS1-attacker, d2 attacker-Orion, d3 GS1 to Orion ground
    // track, d4 Orion altitude, d5 ground track to GS2.
    // Reentry: d1 GSR-landing site, d2 GSR-attacker, d3 attacker-Orion,
    // d4 Orion-GSR; d5 unused.
    double d1_km = 0.0;
    double d2_km = 0.0;
    double d3_km = 0.0;
    double d4_km = 0.0;
    double d5_km = 0.0;
    double reference_angle = 0.0;  // rad; GS1 elevation (launch) or capsule angle (reentry)
    double orion_speed = 0.0;      // m/s
    LinkAngles angles;

    [[nodiscard]] static GeometrySpec launch();
    [[nodiscard]] static GeometrySpec reentry();
    void validate(MissionPhase phase) const;
};

struct AttackerPlatform {
    Platform name = Platform::None;
    double cruise_speed = 0.0;     // m/s
    double output_gain_db = -25.0; // Stage 1 (capture scaling for later replay)
    double input_gain_db = -8.0;   // Stage 2 (replay scaling)

    [[nodiscard]] static AttackerPlatform rq4();
    [[nodiscard]] static AttackerPlatform mq9();
    [[nodiscard]] static AttackerPlatform none();
    [[nodiscard]] static AttackerPlatform of(Platform p);
    [[nodiscard]] bool present() const noexcept { return name != Platform::None; }
};

/// Per-link channel preset shared by every link of a scenario.
struct LinkPreset {
    double snr_db = 25.0;
    double tap2_gain_db = -10.0;
    double tap2_extra_delay_samples = 2.0;
    double tap2_osc_samples = 0.5;
    double tap2_osc_rate_hz = 1.0;
};

struct ScenarioSpec {
    MissionPhase phase = MissionPhase::ReentryDL;
    GeometrySpec geometry = GeometrySpec::reentry();
    AttackerPlatform attacker = AttackerPlatform::rq4();
    double legit_input_gain_db = -15.0;
    double relay_gain_db = 6.0;         // attacker amplifier chain between capture and replay
    LinkPreset link;
    double record_time = 0.0;            // t1, s
    std::optional<double> replay_time;   // t2, s; default one frame + legit propagation delay
    bool synchronized_replay = false;    // align replayed symbols with the legitimate ones
    std::size_t n_frames = 50;
    Payload frame = lfsr_generate(9, 0x110, 1, 200);
    ModemParams modem;
    std::uint64_t seed = 1;

    [[nodiscard]] static ScenarioSpec preset(MissionPhase phase, Platform platform = Platform::RQ4);
    void validate() const;

    [[nodiscard]] double frame_duration() const;
    [[nodiscard]] Station victim() const noexcept;  // station that sees the replay
    [[nodiscard]] std::vector<Station> stations() const;
    [[nodiscard]] LinkId legit_link(Station s) const;
    [[nodiscard]] LinkId capture_link() const;
    [[nodiscard]] LinkId replay_link() const;
    [[nodiscard]] double link_distance_km(LinkId l) const;
    [[nodiscard]] double effective_replay_time() const;
};

/// Channel profiles for every link of the phase. Without an attacker only the
/// legitimate links are returned.
[[nodiscard]] std::map<LinkId, ChannelProfile> build_link_profiles(const ScenarioSpec& spec);

/// Transmit waveform of the scenario: n_frames repetitions of the frame,
/// shaped and zero padded to hold the longest path delay.
[[nodiscard]] IQBuffer scenario_waveform(const ScenarioSpec& spec);

/// Attacker's record: source signal through the source->attacker channel
/// (with its link noise), scaled by the output gain, from t1 on.
[[nodiscard]] IQBuffer stage1_capture(const ScenarioSpec& spec, const IQBuffer& tx);

/// Victim-side buffer over the legitimate observation window.
[[nodiscard]] IQBuffer stage2_compose(const ScenarioSpec& spec, const IQBuffer& legit_tx,
                                      const std::optional<IQBuffer>& capture,
                                      std::optional<Station> victim = std::nullopt);

struct FrameCandidate {
    Payload bits;
    double snr_db = 0.0;
};

struct FrameSelection {
    Payload bits;
    Station source = Station::GS1;
};

/// Higher SNR wins; ties go to GS1.
[[nodiscard]] FrameSelection best_frame_select(const FrameCandidate& gs1, const FrameCandidate& gs2);

/// Receiver configured for a station of the scenario (oracle offset, symbol count).
[[nodiscard]] ReceiverConfig receiver_for(const ScenarioSpec& spec, Station station, ReceiverConfig base);

struct StationOutcome {
    Station station = Station::GS1;
    double ber = 0.0;
    double snr_db = 0.0;
    std::vector<double> power_levels;
    RxDiagnostics diagnostics;
    std::vector<std::size_t> frame_errors;  // per 100-symbol block after warm-up
    std::vector<double> frame_snr_db;       // blind, same blocks
};

struct ScenarioOutcome {
    std::vector<StationOutcome> stations;
    std::optional<Station> bfs_majority;
    double bfs_ber = 0.0;  // launch only
    double bfs_snr_db = 0.0;
};

/// Full Stage 1 / Stage 2 / receive pipeline for one seed.
[[nodiscard]] ScenarioOutcome run_scenario(const ScenarioSpec& spec, const ReceiverConfig& base);

enum class ExperimentKind { OutputGain = 1, InputGain = 2, LegitGain = 3 };

struct SweepSpec {
    ExperimentKind kind = ExperimentKind::OutputGain;
    MissionPhase phase = MissionPhase::ReentryDL;
    std::vector<Platform> platforms{Platform::RQ4, Platform::MQ9};
    std::vector<double> grid;
    // Values held fixed while the swept one moves.
    double output_gain_db = -25.0;
    double input_gain_db = -8.0;
    double legit_gain_db = -15.0;
    ReceiverProfile profile = ReceiverProfile::Baseline;
    std::size_t n_seeds = 10;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::optional<ScenarioSpec> base;  // overrides the phase preset

    [[nodiscard]] static SweepSpec experiment(int number, MissionPhase phase);
    void validate() const;
};

struct ExperimentRow {
    MissionPhase phase = MissionPhase::ReentryDL;
    Platform platform = Platform::None;
    std::string station;
    std::optional<double> attacker_output_gain_db;
    std::optional<double> attacker_input_gain_db;
    double legit_input_gain_db = 0.0;
    double ber_percent = 0.0;
    double nonzero_ber_fraction = 0.0;
    double delta_snr_db = 0.0;
    PowerStats power;
    ReceiverProfile profile = ReceiverProfile::Baseline;
    std::uint64_t seed = 0;
    bool reference = false;
    std::vector<double> ber_per_seed;
    std::vector<double> cfo_trace_hz;     // first seed, decimated
    std::vector<double> timing_trace;     // first seed, decimated
    std::vector<double> eq_error_trace;   // first seed, decimated
};

struct ExperimentReport {
    ExperimentKind kind = ExperimentKind::OutputGain;
    MissionPhase phase = MissionPhase::ReentryDL;
    std::string swept_parameter;
    std::vector<ExperimentRow> rows;  // reference rows first
};

inline constexpr std::size_t kTraceDecimation = 16;

/// Seed used for run i of a row.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t base, std::size_t i) noexcept;

[[nodiscard]] ExperimentReport run_experiment(const SweepSpec& sweep);

}  // namespace skyreplay

#endif  // SKYREPLAY_SCENARIO_HPP
