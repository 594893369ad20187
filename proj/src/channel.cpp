// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skyreplay/dsp.hpp"

namespace skyreplay {

void ChannelTap::validate() const {
    if (!(mean_delay >= 0.0)) throw std::invalid_argument("ChannelTap: mean_delay must be >= 0");
    if (std::abs(delay_osc_amplitude) > mean_delay)
        throw std::invalid_argument("ChannelTap: |delay_osc_amplitude| must not exceed mean_delay");
    if (!(gain >= 0.0)) throw std::invalid_argument("ChannelTap: gain must be >= 0");
    if (!std::isfinite(doppler_hz) || !std::isfinite(initial_phase) || !std::isfinite(delay_osc_rate))
        throw std::invalid_argument("ChannelTap: non-finite parameter");
}

void ChannelProfile::validate() const {
    if (taps.empty() || taps.size() > kMaxTaps)
        throw std::invalid_argument("ChannelProfile: tap count must be in [1, 8]");
    for (const auto& t : taps) t.validate();
    for (std::size_t i = 1; i < taps.size(); ++i)
        if (taps[i].mean_delay < taps[i - 1].mean_delay)
            throw std::invalid_argument("ChannelProfile: taps must be sorted by mean_delay");
    if (noise_snr_db && std::isnan(*noise_snr_db))
        throw std::invalid_argument("ChannelProfile: noise SNR is NaN");
}

double doppler_shift(const LinkKinematics& kin) {
    if (!(kin.relative_speed >= 0.0)) throw std::invalid_argument("doppler_shift: speed must be >= 0");
    if (!(kin.carrier_freq > 0.0)) throw std::invalid_argument("doppler_shift: carrier must be > 0");
    return kin.relative_speed / kSpeedOfLight * kin.carrier_freq * std::cos(kin.arrival_angle);
}

ChannelRealization realize_channel(const ChannelProfile& profile, double duration, double sample_rate) {
    profile.validate();
    if (!(sample_rate > 0.0)) throw std::invalid_argument("realize_channel: sample rate must be > 0");
    if (!(duration >= 0.0)) throw std::invalid_argument("realize_channel: duration must be >= 0");
    const double n_real = std::ceil(duration * sample_rate - 1e-9);
    if (n_real > static_cast<double>(kMaxRealizationSamples))
        throw std::invalid_argument("realize_channel: duration exceeds maximum buffer length");
    const auto n = static_cast<std::size_t>(n_real);

    ChannelRealization r;
    r.sample_rate = sample_rate;
    r.num_samples = n;
    r.noise_snr_db = profile.noise_snr_db;
    r.noise_seed = dsp::mix_seed(profile.seed, 0xA5A5);
    for (const auto& tap : profile.taps) {
        r.gains.push_back(tap.gain);
        std::vector<double> delay(n), phase(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate;
            const double tau = tap.delay_osc_amplitude == 0.0
                                   ? tap.mean_delay
                                   : tap.mean_delay + tap.delay_osc_amplitude *
                                                          std::sin(dsp::kTwoPi * tap.delay_osc_rate * t);
            delay[i] = tau * sample_rate;
            phase[i] = tap.initial_phase + dsp::kTwoPi * tap.doppler_hz * t;
        }
        r.delays.push_back(std::move(delay));
        r.phases.push_back(std::move(phase));
    }
    return r;
}

IQBuffer apply_channel(const IQBuffer& signal, const ChannelRealization& real) {
    if (std::abs(signal.sample_rate() - real.sample_rate) > 1e-9 * real.sample_rate)
        throw std::invalid_argument("apply_channel: sample rate mismatch");
    if (real.num_samples < signal.size())
        throw std::invalid_argument("apply_channel: realization shorter than signal");

    const auto x = signal.view();
    const auto& interp = dsp::interpolator();
    std::vector<cplx> y(x.size(), cplx{});
    for (std::size_t i = 0; i < real.num_taps(); ++i) {
        const double beta = real.gains[i];
        if (beta == 0.0) continue;
        const auto& delay = real.delays[i];
        const auto& phase = real.phases[i];
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double pos = static_cast<double>(n) - delay[n];
            const cplx v = interp.at(x, pos);
            if (phase[n] == 0.0 && beta == 1.0) {
                y[n] += v;
            } else {
                y[n] += beta * std::polar(1.0, phase[n]) * v;
            }
        }
    }

    IQBuffer out = signal.with_samples(std::move(y));
    if (real.noise_snr_db) return add_awgn(out, *real.noise_snr_db, real.noise_seed);
    return out;
}

IQBuffer add_awgn(const IQBuffer& signal, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return signal;
    if (std::isnan(snr_db)) throw std::invalid_argument("add_awgn: SNR is NaN");
    const double p = signal.mean_power();
    if (!(p > 0.0)) throw std::invalid_argument("add_awgn: zero-power signal, SNR undefined");

    const double variance = p / db_to_power(snr_db);
    dsp::GaussianSource rng(seed);
    std::vector<cplx> y(signal.samples());
    for (auto& s : y) s += rng.circular(variance);
    return signal.with_samples(std::move(y));
}

IQBuffer superpose(const std::vector<TimedComponent>& components) {
    if (components.empty()) throw std::invalid_argument("superpose: no components");
    const double fs = components.front().signal.sample_rate();
    std::size_t total = 0;
    std::vector<std::size_t> starts;
    for (const auto& c : components) {
        if (std::abs(c.signal.sample_rate() - fs) > 1e-9 * fs)
            throw std::invalid_argument("superpose: mixed sample rates");
        if (!(c.start_offset >= 0.0)) throw std::invalid_argument("superpose: negative start offset");
        const auto start = static_cast<std::size_t>(std::llround(c.start_offset * fs));
        starts.push_back(start);
        total = std::max(total, start + c.signal.size());
    }
    std::vector<cplx> y(total, cplx{});
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& s = components[k].signal.samples();
        for (std::size_t n = 0; n < s.size(); ++n) y[starts[k] + n] += s[n];
    }
    return IQBuffer(std::move(y), fs, components.front().signal.carrier_freq());
}

}  // namespace skyreplay
