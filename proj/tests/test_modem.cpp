// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "skyreplay/modem.hpp"

using namespace skyreplay;

namespace {

Payload bits_of(const char* s) {
    std::vector<std::uint8_t> b;
    for (; *s; ++s) b.push_back(static_cast<std::uint8_t>(*s - '0'));
    return Payload(std::move(b));
}

// Closed-form RRC, t in symbols, written out independently of the library.
double rrc_closed_form(double t, double a) {
    const double pi = std::numbers::pi;
    if (std::abs(t) < 1e-12) return 1.0 - a + 4.0 * a / pi;
    if (std::abs(std::abs(t) - 1.0 / (4.0 * a)) < 1e-12)
        return a / std::sqrt(2.0) * ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * a)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * a)));
    const double num = std::sin(pi * t * (1.0 - a)) + 4.0 * a * t * std::cos(pi * t * (1.0 + a));
    const double den = pi * t * (1.0 - (4.0 * a * t) * (4.0 * a * t));
    return num / den;
}

std::vector<double> self_convolve(const std::vector<double>& h) {
    std::vector<double> out(2 * h.size() - 1, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += h[i] * h[j];
    return out;
}

// Smallest period of `bits` among divisors of `candidate`.
bool has_period(const Payload& p, std::size_t period) {
    for (std::size_t i = 0; i + period < p.length_bits(); ++i)
        if (p[i] != p[i + period]) return false;
    return true;
}

}  // namespace

TEST_CASE("lfsr: degree 4 sequence matches hand enumeration") {
    // x^4 + x^3 + 1, Galois right shift, mask 0xC, seed 0001.
    // States: 1 C 6 3 D A 5 E 7 F B 9 8 4 2 | 1 ...; output is the state LSB.
    const Payload p = lfsr_generate(4, 0xC, 1, 30);
    CHECK(p == bits_of("100110101111000100110101111000"));
    for (std::size_t i = 0; i + 15 < 30; ++i) CHECK(p[i] == p[i + 15]);
}

TEST_CASE("lfsr: zero seed rejected, empty request allowed") {
    CHECK_THROWS_AS((void)lfsr_generate(4, 0xC, 0, 10), std::invalid_argument);
    CHECK(lfsr_generate(9, 0x110, 1, 0).empty());
}

TEST_CASE("lfsr: maximal period for primitive polynomials up to degree 16") {
    const std::uint32_t masks[] = {0x3,   0x6,   0xC,    0x14,   0x30,   0x60,   0xB8,  0x110,
                                   0x240, 0x500, 0xE08, 0x1C80, 0x3802, 0x6000, 0xB400};
    for (int n = 2; n <= 16; ++n) {
        const std::size_t period = (std::size_t{1} << n) - 1;
        const Payload p = lfsr_generate(n, masks[n - 2], 1, 2 * period + n);
        CAPTURE(n);
        CHECK(has_period(p, period));
        // No proper divisor of the period is itself a period.
        for (std::size_t d = 1; d < period; ++d)
            if (period % d == 0) CHECK_FALSE(has_period(p, d));
    }
}

TEST_CASE("lfsr: deterministic") {
    CHECK(lfsr_generate(9, 0x110, 1, 200) == lfsr_generate(9, 0x110, 1, 200));
}

TEST_CASE("qpsk: Gray map") {
    const double r = 1.0 / std::sqrt(2.0);
    const auto s = qpsk_modulate(bits_of("00011110"));
    REQUIRE(s.size() == 4);
    CHECK(s[0].real() == doctest::Approx(r).epsilon(1e-15));
    CHECK(s[0].imag() == doctest::Approx(r).epsilon(1e-15));
    CHECK(s[1].real() == doctest::Approx(-r).epsilon(1e-15));
    CHECK(s[1].imag() == doctest::Approx(r).epsilon(1e-15));
    CHECK(s[2].real() == doctest::Approx(-r).epsilon(1e-15));
    CHECK(s[2].imag() == doctest::Approx(-r).epsilon(1e-15));
    CHECK(s[3].real() == doctest::Approx(r).epsilon(1e-15));
    CHECK(s[3].imag() == doctest::Approx(-r).epsilon(1e-15));
}

TEST_CASE("qpsk: unit modulus, odd length rejected") {
    const auto s = qpsk_modulate(lfsr_generate(9, 0x110, 1, 200));
    CHECK(s.size() == 100);
    for (const auto& z : s) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
    CHECK_THROWS((void)qpsk_modulate(bits_of("101")));
}

TEST_CASE("qpsk: demodulation") {
    const Payload b = lfsr_generate(11, 0x500, 7, 4000);
    CHECK(qpsk_demodulate(qpsk_modulate(b)) == b);

    const std::vector<cplx> one{{0.9, -1.1}};
    CHECK(qpsk_demodulate(one) == bits_of("10"));
    const std::vector<cplx> zero{{0.0, 0.0}};
    CHECK(qpsk_demodulate(zero) == bits_of("00"));

    // 0.1 rad is well inside the pi/4 decision margin.
    auto s = qpsk_modulate(b);
    for (auto& z : s) z *= std::polar(1.0, 0.1);
    CHECK(qpsk_demodulate(s) == b);
}

TEST_CASE("rrc: impulse matches closed form including singular points") {
    for (double a : {0.05, 0.2, 0.35, 0.5, 1.0}) {
        for (double t = -10.0; t <= 10.0; t += 0.125) CHECK(rrc_impulse(t, a) == doctest::Approx(rrc_closed_form(t, a)).epsilon(1e-9));
        // Singular points agree with the limit from both sides.
        const double ts = 1.0 / (4.0 * a);
        const double side = 0.5 * (rrc_closed_form(ts - 1e-6, a) + rrc_closed_form(ts + 1e-6, a));
        CHECK(rrc_impulse(ts, a) == doctest::Approx(side).epsilon(1e-5));
    }
}

namespace {

double worst_isi(const std::vector<double>& h) {
    const auto rc = self_convolve(h);
    const std::size_t peak = h.size() - 1;
    double worst = 0.0;
    for (std::size_t k = peak % 4; k < rc.size(); k += 4)
        if (k != peak) worst = std::max(worst, std::abs(rc[k]));
    return worst / rc[peak];
}

}  // namespace

TEST_CASE("rrc: symmetry and unit energy") {
    for (double a : {0.05, 0.2, 0.35, 0.5, 1.0}) {
        ModemParams p;
        p.rolloff = a;
        const auto h = rrc_taps(p);
        CAPTURE(a);
        REQUIRE(h.size() == 81);
        double e = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            CHECK(h[k] == h[h.size() - 1 - k]);
            e += h[k] * h[k];
        }
        CHECK(std::abs(e - 1.0) < 1e-9);
    }
}

TEST_CASE("rrc: RC zero-ISI once truncation is negligible") {
    for (double a : {0.05, 0.2, 0.35, 0.5, 1.0}) {
        ModemParams p;
        p.rolloff = a;
        p.rrc_span_symbols = 64;
        CAPTURE(a);
        CHECK(worst_isi(rrc_taps(p)) < 1e-3);
    }
}

TEST_CASE("rrc: truncation ISI at the default span") {
    // 81 taps: 6.8e-4 at 0.2, 2.9e-4 at 0.5, 2.1e-4 at 1.0; 0.35 leaves
    // 1.74e-3 at lag 10 and 0.05 about 2.6e-2.
    auto isi = [](double a) {
        ModemParams p;
        p.rolloff = a;
        return worst_isi(rrc_taps(p));
    };
    CHECK(isi(0.2) < 1e-3);
    CHECK(isi(0.5) < 1e-3);
    CHECK(isi(1.0) < 1e-3);
    CHECK(isi(0.35) == doctest::Approx(1.7444e-3).epsilon(1e-3));
    CHECK(isi(0.05) > 1e-2);
}

TEST_CASE("rrc: bad rolloff rejected") {
    ModemParams p;
    p.rolloff = 0.0;
    CHECK_THROWS((void)rrc_taps(p));
}

TEST_CASE("pulse shape: impulse response, length and bandwidth") {
    ModemParams p;
    CHECK(p.symbol_rate() == 62'500.0);
    CHECK(p.occupied_bandwidth() == 84'375.0);

    ModemParams unity = p;
    unity.tx_gain_db = 0.0;
    const std::vector<cplx> one{{1.0, 0.0}};
    const IQBuffer y = pulse_shape(one, unity);
    const auto h = rrc_taps(unity);
    REQUIRE(y.size() == h.size() + 3);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(y[k].real() == doctest::Approx(h[k]).epsilon(1e-15));

    const auto syms = qpsk_modulate(lfsr_generate(9, 0x110, 1, 200));
    const IQBuffer shaped = pulse_shape(syms, p);
    CHECK(shaped.size() == 4 * syms.size() + 80);
    CHECK(shaped == pulse_shape(syms, p));
}

TEST_CASE("pulse shape: energy stays inside (1 + a) Rs") {
    // Direct DFT of a long shaped QPSK burst.
    ModemParams p;
    p.tx_gain_db = 0.0;
    const auto syms = qpsk_modulate(lfsr_generate(11, 0x500, 3, 1024));
    const IQBuffer y = pulse_shape(syms, p);
    const std::size_t n = 4096;
    double inside = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t m = 0; m < y.size(); ++m)
            acc += y[m] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * m % n) / static_cast<double>(n));
        const double f = (k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n)) *
                         p.sample_rate / static_cast<double>(n);
        (std::abs(f) <= p.occupied_bandwidth() / 2.0 ? inside : outside) += std::norm(acc);
    }
    CHECK(outside < 1e-3 * inside);
}
