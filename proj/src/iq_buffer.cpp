// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/iq_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace skyreplay {

IQBuffer::IQBuffer(std::vector<cplx> samples, double sample_rate, double carrier_freq)
    : samples_(std::move(samples)), sample_rate_(sample_rate), carrier_freq_(carrier_freq) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        throw std::invalid_argument("IQBuffer: sample rate must be positive");
    for (const auto& s : samples_)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw std::invalid_argument("IQBuffer: non-finite sample");
}

double IQBuffer::mean_power() const noexcept {
    if (samples_.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : samples_) acc += std::norm(s);
    return acc / static_cast<double>(samples_.size());
}

IQBuffer IQBuffer::with_samples(std::vector<cplx> samples) const {
    return IQBuffer(std::move(samples), sample_rate_, carrier_freq_);
}

IQBuffer IQBuffer::scaled(double amplitude) const {
    std::vector<cplx> out(samples_);
    for (auto& s : out) s *= amplitude;
    return with_samples(std::move(out));
}

}  // namespace skyreplay
