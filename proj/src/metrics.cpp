// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skyreplay {

double ber(const Payload& truth, const Payload& received) {
    if (truth.length_bits() != received.length_bits())
        throw std::invalid_argument("ber: length mismatch");
    if (truth.empty()) return 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < truth.length_bits(); ++i) errors += truth[i] != received[i];
    return static_cast<double>(errors) / static_cast<double>(truth.length_bits());
}

std::vector<double> digital_power(const IQBuffer& signal, std::size_t window_m) {
    if (window_m == 0) throw std::invalid_argument("digital_power: window must be >= 1");
    const auto& x = signal.samples();
    std::vector<double> out;
    if (x.empty()) return out;
    if (x.size() < window_m) {
        double acc = 0.0;
        for (const auto& s : x) acc += s.real() * s.real() + s.imag() * s.imag();
        out.push_back(acc / static_cast<double>(x.size()));
        return out;
    }
    for (std::size_t start = 0; start + window_m <= x.size(); start += window_m) {
        double acc = 0.0;
        for (std::size_t n = start; n < start + window_m; ++n)
            acc += x[n].real() * x[n].real() + x[n].imag() * x[n].imag();
        out.push_back(acc / static_cast<double>(window_m));
    }
    return out;
}

std::string_view to_string(SnrMode mode) noexcept {
    return mode == SnrMode::DataAided ? "data-aided" : "blind-m2m4";
}

namespace {

double clamp_db(double ratio) {
    if (!(ratio > 0.0)) return -30.0;
    if (std::isinf(ratio)) return kSnrCeilingDb;
    return std::clamp(10.0 * std::log10(ratio), -30.0, kSnrCeilingDb);
}

}  // namespace

SnrEstimate estimate_snr(std::span<const cplx> symbols, std::optional<std::span<const cplx>> truth) {
    if (symbols.size() < kSnrMinSymbols)
        throw std::invalid_argument("estimate_snr: need at least 100 symbols");

    if (truth) {
        if (truth->size() != symbols.size())
            throw std::invalid_argument("estimate_snr: truth length mismatch");
        cplx num{};
        double den = 0.0;
        for (std::size_t k = 0; k < symbols.size(); ++k) {
            num += symbols[k] * std::conj((*truth)[k]);
            den += std::norm((*truth)[k]);
        }
        const cplx g = den > 0.0 ? num / den : cplx{};
        double err = 0.0;
        for (std::size_t k = 0; k < symbols.size(); ++k) err += std::norm(symbols[k] - g * (*truth)[k]);
        err /= static_cast<double>(symbols.size());
        const double sig = std::norm(g) * den / static_cast<double>(symbols.size());
        if (err <= sig * 1e-6) return {kSnrCeilingDb, SnrMode::DataAided};
        return {clamp_db(sig / err), SnrMode::DataAided};
    }

    // M2M4 for a constant-modulus signal in circular Gaussian noise.
    double m2 = 0.0, m4 = 0.0;
    for (const auto& s : symbols) {
        const double p = std::norm(s);
        m2 += p;
        m4 += p * p;
    }
    m2 /= static_cast<double>(symbols.size());
    m4 /= static_cast<double>(symbols.size());
    const double disc = 2.0 * m2 * m2 - m4;
    const double s = disc > 0.0 ? std::sqrt(disc) : 0.0;
    const double n = m2 - s;
    if (n <= s * 1e-6) return {kSnrCeilingDb, SnrMode::BlindM2M4};
    return {clamp_db(s / n), SnrMode::BlindM2M4};
}

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

PowerStats boxplot_stats(std::span<const double> values) {
    if (values.size() < 5) throw std::invalid_argument("boxplot_stats: need at least 5 values");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());

    PowerStats st;
    st.median = quantile_sorted(v, 0.5);
    st.q1 = quantile_sorted(v, 0.25);
    st.q3 = quantile_sorted(v, 0.75);
    const double iqr = st.q3 - st.q1;
    const double lo_fence = st.q1 - 1.5 * iqr;
    const double hi_fence = st.q3 + 1.5 * iqr;

    st.lower_whisker = st.q1;
    st.upper_whisker = st.q3;
    for (double x : v) {
        if (x < lo_fence || x > hi_fence) {
            st.outliers.push_back(x);
            continue;
        }
        st.lower_whisker = std::min(st.lower_whisker, x);
        st.upper_whisker = std::max(st.upper_whisker, x);
    }
    return st;
}

}  // namespace skyreplay
