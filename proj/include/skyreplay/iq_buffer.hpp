// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#ifndef SKYREPLAY_IQ_BUFFER_HPP
#define SKYREPLAY_IQ_BUFFER_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace skyreplay {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kDefaultCarrierHz = 2.1e9;

/// Complex baseband samples plus the metadata every stage needs.
/// Construction validates that all samples are finite and the rate is positive.
class IQBuffer {
public:
    IQBuffer() = default;
    IQBuffer(std::vector<cplx> samples, double sample_rate,
             double carrier_freq = kDefaultCarrierHz);

    [[nodiscard]] const std::vector<cplx>& samples() const noexcept { return samples_; }
    [[nodiscard]] std::span<const cplx> view() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] double carrier_freq() const noexcept { return carrier_freq_; }
    [[nodiscard]] double duration() const noexcept {
        return static_cast<double>(samples_.size()) / sample_rate_;
    }

    /// Mean of |x|^2 over the whole buffer (0 for an empty buffer).
    [[nodiscard]] double mean_power() const noexcept;

    /// Same metadata, new samples.
    [[nodiscard]] IQBuffer with_samples(std::vector<cplx> samples) const;
    /// Copy scaled by a linear amplitude factor.
    [[nodiscard]] IQBuffer scaled(double amplitude) const;

    const cplx& operator[](std::size_t i) const noexcept { return samples_[i]; }

    friend bool operator==(const IQBuffer&, const IQBuffer&) = default;

private:
    std::vector<cplx> samples_;
    double sample_rate_{1.0};
    double carrier_freq_{kDefaultCarrierHz};
};

[[nodiscard]] inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }
[[nodiscard]] inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace skyreplay

#endif  // SKYREPLAY_IQ_BUFFER_HPP
