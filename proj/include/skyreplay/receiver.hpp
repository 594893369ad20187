// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// Synchronizing QPSK receiver in two profiles.
//
// Baseline:  phase search -> matched filter -> oracle sampling -> CMA
//            -> DPLL (62.8 mrad) -> demodulation
// Hardened:  phase search -> polyphase matched filter bank with Gardner TED
//            -> DPLL (15.7 mrad) -> RSS-normalised DD-LMS -> demodulation
//
// The constant-modulus equalizer is phase blind and runs ahead of the carrier
// loop; the decision-directed equalizer needs phase-coherent decisions and
// runs behind it.

#ifndef SKYREPLAY_RECEIVER_HPP
#define SKYREPLAY_RECEIVER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skyreplay/iq_buffer.hpp"
#include "skyreplay/modem.hpp"

namespace skyreplay {

enum class ReceiverProfile { Baseline, Hardened };
enum class EqualizerKind { CMA, DDLMS };
enum class SamplingOffsetMode { Known, Estimated };

[[nodiscard]] std::string_view to_string(ReceiverProfile p) noexcept;
[[nodiscard]] std::string_view to_string(EqualizerKind e) noexcept;
[[nodiscard]] ReceiverProfile parse_receiver_profile(std::string_view s);
[[nodiscard]] EqualizerKind parse_equalizer(std::string_view s);

struct ReceiverConfig {
    ReceiverProfile profile = ReceiverProfile::Baseline;

    int n_phase_branches = 32;
    int phase_search_window = 64;  // symbols

    double dpll_loop_bw = 62.8e-3;  // Bn*T, rad/symbol
    double dpll_damping = 0.707;
    bool coarse_cfo = true;         // seed the loop integrator with a 4th-power estimate
    int cfo_acquisition_symbols = 96;  // leading symbols the coarse estimate is taken over

    EqualizerKind equalizer = EqualizerKind::CMA;
    int eq_taps = 11;
    double eq_step = 1e-3;

    int polyphase_branches = 32;
    double timing_loop_bw = 0.005;  // Bn*T of the symbol synchronizer loop
    double timing_damping = 1.0;

    SamplingOffsetMode sampling_offset_mode = SamplingOffsetMode::Known;
    // Sample index of the first symbol's pulse centre in the received buffer
    // (transmit filter delay plus channel delay). Used in Known mode and as the
    // Hardened synchronizer's starting point.
    double known_offset_samples = 40.0;

    std::size_t max_symbols = 0;       // 0 = every symbol the matched filter fully covers
    std::size_t warmup_symbols = 256;  // excluded from BER
    bool per_frame_rotation = true;    // resolve the QPSK ambiguity per truth frame
    double lock_threshold = 0.2;       // mean |z - decision|^2 at the output

    [[nodiscard]] static ReceiverConfig baseline();
    [[nodiscard]] static ReceiverConfig hardened();
    void validate() const;
};

struct RxDiagnostics {
    std::vector<double> cfo_estimate_trace;  // Hz, per symbol
    std::vector<double> timing_error_trace;  // symbols, per symbol
    std::vector<double> eq_error_trace;      // per symbol
    int selected_phase_branch = 0;
    double phase_search_score = 0.0;
    double coarse_cfo_hz = 0.0;
    double final_decision_error = 0.0;
    bool lock_flag = false;
};

struct PhaseSearchResult {
    int best_branch = 0;
    double score = 0.0;
    IQBuffer rotated;
};

/// Tries rotations exp(-j 2 pi k / n_branches) and keeps the one with the
/// smallest mean distance to the nearest QPSK point over the pilot window.
/// The pilot window is matched filtered and sampled at the strongest symbol
/// phase at or after `first_symbol_hint` (MF output coordinates).
/// Ties (including the QPSK pi/2 ambiguity) go to the lowest index.
[[nodiscard]] PhaseSearchResult differential_phase_search(const IQBuffer& signal, int n_branches,
                                                          const ModemParams& params,
                                                          int window_symbols = 64,
                                                          double first_symbol_hint = -1.0);

struct MatchedFilterOutput {
    IQBuffer signal;
    int group_delay = 0;  // samples
};

[[nodiscard]] MatchedFilterOutput matched_filter(const IQBuffer& signal, const ModemParams& params);

struct TimingResult {
    std::vector<cplx> symbols;
    std::vector<double> error_trace;  // per symbol, in symbols
    double final_position = 0.0;      // sample position of the last symbol
    double first_position = 0.0;
};

/// Baseline: `signal` is matched-filter output, sampled at the configured
/// (Known) or energy-estimated offset. Hardened: `signal` is the raw shaped
/// signal; a polyphase matched filter bank with a Gardner detector tracks the
/// symbol timing.
[[nodiscard]] TimingResult recover_timing(const IQBuffer& signal, const ReceiverConfig& cfg,
                                          const ModemParams& params);

struct DpllResult {
    std::vector<cplx> corrected;
    std::vector<double> trace_hz;
};

/// Second-order decision-directed QPSK carrier loop (proportional + integral).
[[nodiscard]] DpllResult dpll_cfo_correct(std::span<const cplx> symbols, const ReceiverConfig& cfg,
                                          double symbol_rate = 62'500.0,
                                          double initial_freq_hz = 0.0);

/// First symbol index after which the trace stays within tol_hz of target_hz,
/// or trace.size() if it never settles.
[[nodiscard]] std::size_t convergence_index(std::span<const double> trace_hz, double target_hz,
                                            double tol_hz);

/// Coarse carrier offset from the 4th-power symbol phase increment (Hz).
[[nodiscard]] double coarse_cfo_estimate(std::span<const cplx> symbols, double symbol_rate);

struct EqualizerResult {
    std::vector<cplx> output;
    std::vector<double> error_trace;
    std::vector<cplx> taps;
};

/// Adaptive linear equalizer with centre-spike start. CMA minimises
/// (|y|^2 - 1)^2; DD-LMS drives y toward its QPSK decision with a step
/// normalised by the running received signal strength.
[[nodiscard]] EqualizerResult equalize(std::span<const cplx> symbols, const ReceiverConfig& cfg);

struct BerAlignment {
    double ber = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits_compared = 0;
    std::size_t symbol_offset = 0;  // truth frame index aligned with the first compared symbol
    int rotation = 0;               // quarter turns applied before slicing
};

/// Aligns a repeating truth frame with a recovered symbol stream: searches all
/// cyclic symbol offsets and the four QPSK rotations, counts errors from
/// `skip_symbols` on. With `per_frame_rotation` the quarter-turn ambiguity is
/// then re-resolved for every frame-long block, as a per-frame sync word would.
[[nodiscard]] BerAlignment align_and_count(std::span<const cplx> symbols, const Payload& truth_frame,
                                           std::size_t skip_symbols, bool per_frame_rotation = false);

struct ReceiveResult {
    Payload bits;
    std::vector<cplx> symbols;  // soft symbols that produced `bits`
    RxDiagnostics diagnostics;
    std::optional<BerAlignment> alignment;
};

[[nodiscard]] ReceiveResult receive(const IQBuffer& signal, const ReceiverConfig& cfg,
                                    const ModemParams& params,
                                    const std::optional<Payload>& truth = std::nullopt);

}  // namespace skyreplay

#endif  // SKYREPLAY_RECEIVER_HPP
