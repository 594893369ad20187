// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include "skyreplay/modem.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "skyreplay/dsp.hpp"

namespace skyreplay {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

Payload::Payload(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
        if (b > 1) throw std::invalid_argument("Payload: bits must be 0 or 1");
}

Payload Payload::repeated(std::size_t count) const {
    std::vector<std::uint8_t> out;
    out.reserve(bits_.size() * count);
    for (std::size_t i = 0; i < count; ++i) out.insert(out.end(), bits_.begin(), bits_.end());
    return Payload(std::move(out));
}

void ModemParams::validate() const {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("ModemParams: sample_rate must be > 0");
    if (sps < 2) throw std::invalid_argument("ModemParams: sps must be >= 2");
    if (!(rolloff > 0.0) || rolloff > 1.0)
        throw std::invalid_argument("ModemParams: rolloff must be in (0, 1]");
    if (rrc_span_symbols < 4) throw std::invalid_argument("ModemParams: RRC span must be >= 4 symbols");
    if (!std::isfinite(tx_gain_db)) throw std::invalid_argument("ModemParams: tx gain must be finite");
}

Payload lfsr_generate(int degree, std::uint32_t taps, std::uint32_t seed, std::size_t nbits) {
    if (degree < 2 || degree > 32) throw std::invalid_argument("lfsr_generate: degree must be in [2, 32]");
    const std::uint32_t mask = degree == 32 ? 0xFFFFFFFFu : ((1u << degree) - 1u);
    std::uint32_t state = seed & mask;
    if (state == 0) throw std::invalid_argument("lfsr_generate: seed must be non-zero");
    taps &= mask;

    std::vector<std::uint8_t> bits(nbits);
    for (auto& b : bits) {
        const std::uint32_t out = state & 1u;
        b = static_cast<std::uint8_t>(out);
        state >>= 1;
        if (out) state ^= taps;
    }
    return Payload(std::move(bits));
}

Payload payload_from_hex(std::string_view hex, std::size_t nbits) {
    std::vector<std::uint8_t> bits;
    bits.reserve(hex.size() * 4);
    for (char c : hex) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '_') continue;
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw std::invalid_argument(std::string("payload_from_hex: invalid digit '") + c + "'");
        for (int s = 3; s >= 0; --s) bits.push_back(static_cast<std::uint8_t>((v >> s) & 1));
    }
    if (nbits > bits.size())
        throw std::invalid_argument("payload_from_hex: fewer hex digits than requested bits");
    bits.resize(nbits);
    return Payload(std::move(bits));
}

std::vector<cplx> qpsk_modulate(const Payload& payload) {
    if (payload.length_bits() % 2 != 0)
        throw std::invalid_argument("qpsk_modulate: payload length must be even");
    std::vector<cplx> out(payload.length_bits() / 2);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double q = payload[2 * k] ? -kInvSqrt2 : kInvSqrt2;
        const double i = payload[2 * k + 1] ? -kInvSqrt2 : kInvSqrt2;
        out[k] = {i, q};
    }
    return out;
}

Payload qpsk_demodulate(std::span<const cplx> symbols) {
    std::vector<std::uint8_t> bits(symbols.size() * 2);
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        bits[2 * k] = symbols[k].imag() < 0.0 ? 1 : 0;
        bits[2 * k + 1] = symbols[k].real() < 0.0 ? 1 : 0;
    }
    return Payload(std::move(bits));
}

cplx qpsk_decide(cplx z) noexcept {
    return {z.real() < 0.0 ? -kInvSqrt2 : kInvSqrt2, z.imag() < 0.0 ? -kInvSqrt2 : kInvSqrt2};
}

double rrc_impulse(double t, double a) {
    if (t == 0.0) return 1.0 - a + 4.0 * a / dsp::kPi;
    const double singular = 1.0 / (4.0 * a);
    if (std::abs(std::abs(t) - singular) < 1e-9) {
        const double arg = dsp::kPi / (4.0 * a);
        return a / std::sqrt(2.0) *
               ((1.0 + 2.0 / dsp::kPi) * std::sin(arg) + (1.0 - 2.0 / dsp::kPi) * std::cos(arg));
    }
    const double num = std::sin(dsp::kPi * t * (1.0 - a)) + 4.0 * a * t * std::cos(dsp::kPi * t * (1.0 + a));
    const double den = dsp::kPi * t * (1.0 - (4.0 * a * t) * (4.0 * a * t));
    return num / den;
}

std::vector<double> rrc_taps(const ModemParams& params) {
    params.validate();
    const int n = params.num_taps();
    const int mid = n / 2;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        h[static_cast<std::size_t>(k)] = rrc_impulse(static_cast<double>(k - mid) / params.sps, params.rolloff);

    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double norm = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= norm;
    // Exact symmetry regardless of floating-point evaluation order.
    for (int k = 0; k < mid; ++k) h[static_cast<std::size_t>(n - 1 - k)] = h[static_cast<std::size_t>(k)];
    return h;
}

IQBuffer pulse_shape(std::span<const cplx> symbols, const ModemParams& params) {
    if (symbols.empty()) throw std::invalid_argument("pulse_shape: no symbols");
    const auto taps = rrc_taps(params);
    std::vector<cplx> stuffed(symbols.size() * static_cast<std::size_t>(params.sps), cplx{});
    for (std::size_t k = 0; k < symbols.size(); ++k) stuffed[k * static_cast<std::size_t>(params.sps)] = symbols[k];

    auto shaped = dsp::convolve(stuffed, taps);
    const double gain = db_to_amplitude(params.tx_gain_db);
    if (gain != 1.0)
        for (auto& s : shaped) s *= gain;
    return IQBuffer(std::move(shaped), params.sample_rate, params.carrier_freq);
}

}  // namespace skyreplay
