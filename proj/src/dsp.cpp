// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/dsp.hpp"

#include <cmath>

namespace skyreplay::dsp {

std::vector<cplx> convolve(std::span<const cplx> x, std::span<const double> taps) {
    if (x.empty() || taps.empty()) return {};
    std::vector<cplx> y(x.size() + taps.size() - 1, cplx{});
    for (std::size_t n = 0; n < x.size(); ++n) {
        const cplx v = x[n];
        if (v == cplx{}) continue;
        cplx* out = y.data() + n;
        for (std::size_t k = 0; k < taps.size(); ++k) out[k] += v * taps[k];
    }
    return y;
}

namespace {

double blackman(double t, double half_width) {
    // t in [-half_width, half_width]
    const double u = (t + half_width) / (2.0 * half_width);
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 0.42 - 0.5 * std::cos(kTwoPi * u) + 0.08 * std::cos(2.0 * kTwoPi * u);
}

double sinc(double t) {
    if (t == 0.0) return 1.0;
    return std::sin(kPi * t) / (kPi * t);
}

}  // namespace

FractionalInterpolator::FractionalInterpolator()
    : table_(static_cast<std::size_t>(kPhases + 1) * kTaps) {
    // Kernel taps cover integer offsets -7..8 around floor(position).
    constexpr double half = kTaps / 2.0;
    for (int p = 0; p <= kPhases; ++p) {
        const double mu = static_cast<double>(p) / kPhases;
        double* row = table_.data() + static_cast<std::size_t>(p) * kTaps;
        double sum = 0.0;
        for (int k = 0; k < kTaps; ++k) {
            const double t = static_cast<double>(k - (kTaps / 2 - 1)) - mu;
            row[k] = sinc(t) * blackman(t, half);
            sum += row[k];
        }
        for (int k = 0; k < kTaps; ++k) row[k] /= sum;
    }
}

cplx FractionalInterpolator::at(std::span<const cplx> x, double position) const noexcept {
    const double base = std::floor(position);
    const double mu = position - base;
    const auto n = static_cast<long long>(base);
    const auto size = static_cast<long long>(x.size());
    if (mu == 0.0) return (n >= 0 && n < size) ? x[static_cast<std::size_t>(n)] : cplx{};

    const double fp = mu * kPhases;
    const int p = static_cast<int>(fp);
    const double w = fp - p;
    const double* r0 = table_.data() + static_cast<std::size_t>(p) * kTaps;
    const double* r1 = r0 + kTaps;

    cplx acc{};
    const long long first = n - (kTaps / 2 - 1);
    for (int k = 0; k < kTaps; ++k) {
        const long long idx = first + k;
        if (idx < 0 || idx >= size) continue;
        const double h = r0[k] + w * (r1[k] - r0[k]);
        acc += x[static_cast<std::size_t>(idx)] * h;
    }
    return acc;
}

const FractionalInterpolator& interpolator() {
    static const FractionalInterpolator instance;
    return instance;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double GaussianSource::uniform() {
    // 53 random mantissa bits.
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
}

cplx GaussianSource::circular(double variance) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1) * variance);
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

}  // namespace skyreplay::dsp
