// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#ifndef SKYREPLAY_METRICS_HPP
#define SKYREPLAY_METRICS_HPP

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skyreplay/iq_buffer.hpp"
#include "skyreplay/modem.hpp"

namespace skyreplay {

/// Hamming distance / length.
[[nodiscard]] double ber(const Payload& truth, const Payload& received);

/// Windowed digital power level: (1/M) sum |x|^2 over consecutive
/// non-overlapping windows of M samples. A trailing partial window is
/// reported only when the buffer is shorter than one window.
[[nodiscard]] std::vector<double> digital_power(const IQBuffer& signal, std::size_t window_m = 1024);

enum class SnrMode { DataAided, BlindM2M4 };

[[nodiscard]] std::string_view to_string(SnrMode mode) noexcept;

struct SnrEstimate {
    double db = 0.0;
    SnrMode mode = SnrMode::DataAided;
};

inline constexpr double kSnrCeilingDb = 60.0;
inline constexpr std::size_t kSnrMinSymbols = 100;

/// SNR of symbol-rate samples. With truth symbols the estimate is data-aided
/// (complex gain fit, error-vector power); otherwise the M2M4 moment estimator.
/// Results are clamped to [-30, 60] dB.
[[nodiscard]] SnrEstimate estimate_snr(std::span<const cplx> symbols,
                                       std::optional<std::span<const cplx>> truth = std::nullopt);

struct PowerStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double lower_whisker = 0.0;
    double upper_whisker = 0.0;
    std::vector<double> outliers;
};

/// Quartiles by linear interpolation between order statistics, Tukey whiskers
/// at the most extreme points inside 1.5 IQR of the box.
[[nodiscard]] PowerStats boxplot_stats(std::span<const double> values);

}  // namespace skyreplay

#endif  // SKYREPLAY_METRICS_HPP
