// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "skyreplay/channel.hpp"
#include "skyreplay/dsp.hpp"

using namespace skyreplay;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFs = 250'000.0;

IQBuffer tone(double freq, std::size_t n, double fs = kFs) {
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::polar(1.0, 2.0 * kPi * freq * static_cast<double>(i) / fs);
    return IQBuffer(std::move(x), fs);
}

// Peak of |X(f)| by direct DFT evaluation on a frequency grid.
double dft_peak(const IQBuffer& y, double f_lo, double f_hi, double step) {
    double best_f = f_lo, best = -1.0;
    for (double f = f_lo; f <= f_hi; f += step) {
        cplx acc{};
        for (std::size_t n = 0; n < y.size(); ++n)
            acc += y[n] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(n) / y.sample_rate());
        if (std::abs(acc) > best) {
            best = std::abs(acc);
            best_f = f;
        }
    }
    return best_f;
}

ChannelProfile single_tap(double gain, double delay_s = 0.0, double doppler = 0.0) {
    ChannelProfile p;
    p.taps = {ChannelTap{delay_s, 0.0, 0.0, gain, doppler, 0.0}};
    return p;
}

IQBuffer noise_buffer(std::size_t n, std::uint64_t seed) {
    dsp::GaussianSource g(seed);
    std::vector<cplx> x(n);
    for (auto& v : x) v = g.circular(1.0);
    return IQBuffer(std::move(x), kFs);
}

}  // namespace

TEST_CASE("doppler: hand-evaluated examples") {
    const double mq9 = 444.0 / 3.6;
    CHECK(doppler_shift({mq9, 0.0, 2.1e9}) == doctest::Approx(863.8).epsilon(0.5 / 863.8));
    CHECK(doppler_shift({467.0, 0.0, 2.1e9}) == doctest::Approx(3271.0).epsilon(1.0 / 3271.0));
    CHECK(std::abs(doppler_shift({300.0, kPi / 2.0, 2.1e9})) < 1e-9);
    CHECK(doppler_shift({300.0, kPi, 2.1e9}) < 0.0);
}

TEST_CASE("doppler: 20-point grid against v f cos(a) / c") {
    const double speeds[] = {444.0 / 3.6, 574.0 / 3.6, 467.0, 125.0, 125.0 + 574.0 / 3.6};
    const double angles[] = {0.0, 40.0, 53.0, 135.0};
    for (double v : speeds) {
        for (double deg : angles) {
            const double a = deg * kPi / 180.0;
            const double want = v * 2.1e9 * std::cos(a) / 2.998e8;
            CHECK(doppler_shift({v, a, 2.1e9}) == doctest::Approx(want).epsilon(1e-3));
        }
    }
}

TEST_CASE("realize: trajectories follow the tap definitions") {
    ChannelProfile p;
    p.taps = {ChannelTap{10e-6, 0.0, 0.0, 1.0, 100.0, 0.3}, ChannelTap{20e-6, 4e-6, 1.0, 0.5, -50.0, 0.0}};
    const auto r = realize_channel(p, 0.01, kFs);
    REQUIRE(r.num_taps() == 2);
    // Constant delay when the oscillation amplitude is zero.
    for (double d : r.delays[0]) CHECK(d == doctest::Approx(10e-6 * kFs));
    // 100 Hz advances the phase by pi in 5 ms.
    const std::size_t n5 = static_cast<std::size_t>(0.005 * kFs);
    CHECK(r.phases[0][n5] - r.phases[0][0] == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(r.phases[0][0] == doctest::Approx(0.3));
    // Sinusoidal delay on tap 2: quarter period of 1 Hz is 0.25 s; check t = 5 ms instead.
    const double t = 0.005;
    CHECK(r.delays[1][n5] == doctest::Approx((20e-6 + 4e-6 * std::sin(2.0 * kPi * t)) * kFs).epsilon(1e-9));
}

TEST_CASE("realize: oversize request rejected") {
    CHECK_THROWS((void)realize_channel(single_tap(1.0), 1e6, kFs));
}

TEST_CASE("apply: identity and scalar gain") {
    const IQBuffer x = noise_buffer(4096, 11);
    const auto id = realize_channel(single_tap(1.0), x.duration(), kFs);
    CHECK(apply_channel(x, id) == x);

    const auto half = realize_channel(single_tap(0.5), x.duration(), kFs);
    const IQBuffer y = apply_channel(x, half);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - 0.5 * x[i]) < 1e-15);
}

TEST_CASE("apply: sample-rate mismatch rejected") {
    const IQBuffer x = noise_buffer(1000, 1);
    const auto r = realize_channel(single_tap(1.0), 1.0, 2.0 * kFs);
    CHECK_THROWS((void)apply_channel(x, r));
}

TEST_CASE("apply: pure Doppler shifts a tone's spectral peak") {
    const double f0 = 1000.0, fd = doppler_shift({444.0 / 3.6, 0.0, 2.1e9});
    const IQBuffer x = tone(f0, 25'000);  // 0.1 s, 10 Hz bins
    const auto r = realize_channel(single_tap(1.0, 0.0, fd), x.duration(), kFs);
    const IQBuffer y = apply_channel(x, r);
    const double bin = kFs / static_cast<double>(x.size());
    const double peak = dft_peak(y, f0 + fd - 5 * bin, f0 + fd + 5 * bin, 0.5);
    CHECK(std::abs(peak - (f0 + fd)) <= bin);
}

TEST_CASE("apply: instantaneous frequency equals tone plus Doppler within 1 Hz") {
    const double f0 = 2000.0, fd = 3271.0;
    const IQBuffer x = tone(f0, static_cast<std::size_t>(kFs));  // 1 s
    ChannelProfile p = single_tap(1.0, 7.3 / kFs, fd);
    p.taps[0].delay_osc_amplitude = 0.0;
    const IQBuffer y = apply_channel(x, realize_channel(p, x.duration(), kFs));
    cplx acc{};
    for (std::size_t n = 100; n + 1 < y.size(); ++n) acc += y[n + 1] * std::conj(y[n]);
    const double f_est = std::arg(acc) * kFs / (2.0 * kPi);
    CHECK(std::abs(f_est - (f0 + fd)) < 1.0);
}

TEST_CASE("apply: linear and energy preserving up to gain squared") {
    const IQBuffer a = noise_buffer(5000, 2), b = noise_buffer(5000, 3);
    ChannelProfile p;
    p.taps = {ChannelTap{3.25 / kFs, 0.5 / kFs, 1.0, 1.0, 321.0, 0.2}, ChannelTap{6.5 / kFs, 0.0, 0.0, 0.3, -80.0, 1.0}};
    const auto r = realize_channel(p, a.duration(), kFs);
    std::vector<cplx> sum(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
    const IQBuffer ya = apply_channel(a, r), yb = apply_channel(b, r), ys = apply_channel(IQBuffer(sum, kFs), r);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(ys[i] - ya[i] - yb[i]));
    CHECK(worst < 1e-9);

    const double beta = 0.7;
    const IQBuffer y = apply_channel(a, realize_channel(single_tap(beta, 0.0, 1234.0), a.duration(), kFs));
    CHECK(y.mean_power() == doctest::Approx(beta * beta * a.mean_power()).epsilon(1e-9));
}

TEST_CASE("apply: fractional delay of a band-limited signal") {
    // Slow tone delayed by 2.5 samples against the analytic value.
    const double f0 = 5000.0;
    const IQBuffer x = tone(f0, 2000);
    const IQBuffer y = apply_channel(x, realize_channel(single_tap(1.0, 2.5 / kFs), x.duration(), kFs));
    double worst = 0.0;
    for (std::size_t n = 50; n < 1950; ++n) {
        const cplx want = std::polar(1.0, 2.0 * kPi * f0 * (static_cast<double>(n) - 2.5) / kFs);
        worst = std::max(worst, std::abs(y[n] - want));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("apply: reproducible for the same profile and seed") {
    const IQBuffer x = noise_buffer(3000, 5);
    ChannelProfile p = single_tap(1.0, 1e-5, 400.0);
    p.noise_snr_db = 20.0;
    p.seed = 99;
    const auto r = realize_channel(p, x.duration(), kFs);
    CHECK(apply_channel(x, r) == apply_channel(x, realize_channel(p, x.duration(), kFs)));
}

TEST_CASE("awgn: variance oracle") {
    const IQBuffer x = tone(1234.0, 1'000'000);
    const IQBuffer y = add_awgn(x, 10.0, 7);
    double p = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) p += std::norm(y[i] - x[i]);
    p /= static_cast<double>(x.size());
    CHECK(std::abs(p - 0.1) < 0.005);
    const double snr = 10.0 * std::log10(x.mean_power() / p);
    CHECK(std::abs(snr - 10.0) < 0.2);
}

TEST_CASE("awgn: noiseless sentinel, determinism, zero power") {
    const IQBuffer x = tone(100.0, 1000);
    CHECK(add_awgn(x, std::numeric_limits<double>::infinity(), 1) == x);
    CHECK(add_awgn(x, 5.0, 42) == add_awgn(x, 5.0, 42));
    CHECK_FALSE(add_awgn(x, 5.0, 42) == add_awgn(x, 5.0, 43));
    const IQBuffer z(std::vector<cplx>(100), kFs);
    CHECK_THROWS((void)add_awgn(z, 10.0, 1));
}

TEST_CASE("superpose: offsets, cancellation, commutativity") {
    const IQBuffer a = noise_buffer(600, 8), b = noise_buffer(400, 9);
    CHECK(superpose({{a, 0.0}}) == a);

    std::vector<cplx> neg(a.samples());
    for (auto& v : neg) v = -v;
    const IQBuffer c = superpose({{a, 0.0}, {IQBuffer(neg, kFs), 0.0}});
    for (const auto& v : c.samples()) CHECK(std::abs(v) == 0.0);

    const IQBuffer s = superpose({{a, 0.0}, {b, 1e-3}});
    REQUIRE(s.size() == 650);
    CHECK(s[249] == a[249]);
    CHECK(s[250] == a[250] + b[0]);
    CHECK(s[649] == b[399]);
    CHECK(superpose({{b, 1e-3}, {a, 0.0}}) == s);

    const IQBuffer other_rate(std::vector<cplx>(10), 2.0 * kFs);
    CHECK_THROWS((void)superpose({{a, 0.0}, {other_rate, 0.0}}));
}
