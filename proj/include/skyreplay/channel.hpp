// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// Time-variant tapped-delay-line channel emulator with per-path Doppler,
// sinusoidally oscillating path delays, additive noise and signal superposition.

#ifndef SKYREPLAY_CHANNEL_HPP
#define SKYREPLAY_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "skyreplay/iq_buffer.hpp"

namespace skyreplay {

struct ChannelTap {
    double mean_delay = 0.0;           // s
    double delay_osc_amplitude = 0.0;  // s
    double delay_osc_rate = 0.0;       // Hz
    double gain = 1.0;                 // linear amplitude
    double doppler_hz = 0.0;
    double initial_phase = 0.0;        // rad

    void validate() const;
};

struct ChannelProfile {
    static constexpr std::size_t kMaxTaps = 8;

    std::vector<ChannelTap> taps{ChannelTap{}};
    std::optional<double> noise_snr_db;  // nullopt = noiseless
    std::uint64_t seed = 0;

    void validate() const;
};

struct LinkKinematics {
    double relative_speed = 0.0;  // m/s
    double arrival_angle = 0.0;   // rad, between motion and incoming wave
    double carrier_freq = kDefaultCarrierHz;
};

/// Per-sample tap trajectories of one profile over a fixed time span.
struct ChannelRealization {
    double sample_rate = 1.0;
    std::size_t num_samples = 0;
    std::vector<double> gains;                 // per tap
    std::vector<std::vector<double>> delays;   // [tap][n], samples
    std::vector<std::vector<double>> phases;   // [tap][n], rad
    std::optional<double> noise_snr_db;
    std::uint64_t noise_seed = 0;

    [[nodiscard]] std::size_t num_taps() const noexcept { return gains.size(); }
    [[nodiscard]] double duration() const noexcept {
        return static_cast<double>(num_samples) / sample_rate;
    }
};

/// Upper bound on realization length (samples).
inline constexpr std::size_t kMaxRealizationSamples = std::size_t{1} << 26;

/// nu / c * f_c * cos(alpha).
[[nodiscard]] double doppler_shift(const LinkKinematics& kin);

[[nodiscard]] ChannelRealization realize_channel(const ChannelProfile& profile, double duration,
                                                 double sample_rate);

/// y[n] = sum_i beta_i e^{j phi_i(t_n)} x(t_n - tau_i(t_n)) + noise.
/// Output has the input's length; content delayed past the end is dropped.
[[nodiscard]] IQBuffer apply_channel(const IQBuffer& signal, const ChannelRealization& real);

/// Adds circular Gaussian noise at snr_db below the measured signal power.
/// A +infinity SNR returns the input unchanged.
[[nodiscard]] IQBuffer add_awgn(const IQBuffer& signal, double snr_db, std::uint64_t seed);

struct TimedComponent {
    IQBuffer signal;
    double start_offset = 0.0;  // s
};

/// Sample-wise complex sum of components placed at their start offsets.
[[nodiscard]] IQBuffer superpose(const std::vector<TimedComponent>& components);

}  // namespace skyreplay

#endif  // SKYREPLAY_CHANNEL_HPP
