// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors
//
// QPSK baseband modem: payload generation, Gray mapping, RRC pulse shaping.

#ifndef SKYREPLAY_MODEM_HPP
#define SKYREPLAY_MODEM_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "skyreplay/iq_buffer.hpp"

namespace skyreplay {

/// Ordered payload bits, one byte (0 or 1) per bit.
class Payload {
public:
    Payload() = default;
    explicit Payload(std::vector<std::uint8_t> bits);

    [[nodiscard]] const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t length_bits() const noexcept { return bits_.size(); }
    [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }

    /// Payload repeated back to back `count` times.
    [[nodiscard]] Payload repeated(std::size_t count) const;

    friend bool operator==(const Payload&, const Payload&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct ModemParams {
    double sample_rate = 250'000.0;
    int sps = 4;
    double rolloff = 0.35;
    int rrc_span_symbols = 10;  // per side; 81 taps at sps = 4
    double tx_gain_db = 53.6;
    double carrier_freq = kDefaultCarrierHz;

    [[nodiscard]] double symbol_rate() const noexcept { return sample_rate / sps; }
    [[nodiscard]] int num_taps() const noexcept { return 2 * rrc_span_symbols * sps + 1; }
    /// Group delay of one RRC filter in samples.
    [[nodiscard]] int filter_delay() const noexcept { return rrc_span_symbols * sps; }
    /// Occupied bandwidth (1 + rolloff) * symbol rate, in Hz.
    [[nodiscard]] double occupied_bandwidth() const noexcept { return (1.0 + rolloff) * symbol_rate(); }

    void validate() const;
};

/// Galois LFSR bit generator. `taps` is the feedback mask applied on a
/// right shift when the output bit is 1 (e.g. 0xC for x^4 + x^3 + 1).
[[nodiscard]] Payload lfsr_generate(int degree, std::uint32_t taps, std::uint32_t seed,
                                    std::size_t nbits);

/// Bits from a hex string, most significant bit of each digit first.
/// If nbits is smaller than 4 * digits the tail is dropped.
[[nodiscard]] Payload payload_from_hex(std::string_view hex, std::size_t nbits);

/// Gray-mapped QPSK. Bit pair (b0, b1): I = NRZ(b1), Q = NRZ(b0), NRZ(0) = +1.
///   00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2
[[nodiscard]] std::vector<cplx> qpsk_modulate(const Payload& payload);

/// Quadrant decision inverting qpsk_modulate. Zero components decide as bit 0.
[[nodiscard]] Payload qpsk_demodulate(std::span<const cplx> symbols);

/// Nearest QPSK constellation point (unit modulus).
[[nodiscard]] cplx qpsk_decide(cplx z) noexcept;

/// Unnormalised continuous RRC impulse response, t in symbol periods.
[[nodiscard]] double rrc_impulse(double t, double rolloff);

/// Unit-energy root raised cosine, num_taps() long.
[[nodiscard]] std::vector<double> rrc_taps(const ModemParams& params);

/// Zero-stuff by sps, RRC filter, scale by tx gain.
/// Output length sps * nsymbols + ntaps - 1.
[[nodiscard]] IQBuffer pulse_shape(std::span<const cplx> symbols, const ModemParams& params);

}  // namespace skyreplay

#endif  // SKYREPLAY_MODEM_HPP
