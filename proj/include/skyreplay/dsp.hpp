// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// Small DSP building blocks shared by the channel emulator and the receiver.

#ifndef SKYREPLAY_DSP_HPP
#define SKYREPLAY_DSP_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "skyreplay/iq_buffer.hpp"

namespace skyreplay::dsp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Full linear convolution, output length x.size() + taps.size() - 1.
[[nodiscard]] std::vector<cplx> convolve(std::span<const cplx> x, std::span<const double> taps);

/// Band-limited interpolation of x at a fractional sample position.
/// Uses a 16-tap Blackman-windowed sinc; integer positions return x exactly,
/// positions outside the buffer read zeros.
class FractionalInterpolator {
public:
    static constexpr int kTaps = 16;
    static constexpr int kPhases = 2048;

    FractionalInterpolator();

    [[nodiscard]] cplx at(std::span<const cplx> x, double position) const noexcept;

private:
    // Row p holds the kernel for fractional offset p / kPhases.
    std::vector<double> table_;
};

/// Process-wide interpolator (the kernel table is immutable after construction).
const FractionalInterpolator& interpolator();

/// splitmix64 finaliser, used to derive independent stream seeds from one root seed.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Circular complex Gaussian source. Box-Muller on top of mt19937_64 so the
/// sequence is identical on every standard library implementation.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    /// One sample with E|n|^2 = variance.
    cplx circular(double variance);
    /// Uniform in [0, 1).
    double uniform();

private:
    std::mt19937_64 engine_;
};

}  // namespace skyreplay::dsp

#endif  // SKYREPLAY_DSP_HPP
