// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The skyreplay Authors

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "skyreplay/metrics.hpp"
#include "skyreplay/modem.hpp"

using namespace skyreplay;

namespace {

struct OracleBox {
    double median, q1, q3, lo, hi;
    std::size_t n_out;
};

// Sort, interpolate at p (n - 1), fence at 1.5 IQR.
OracleBox oracle_box(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double f = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] + f * (v[i + 1] - v[i]) : v[i];
    };
    OracleBox b{q(0.5), q(0.25), q(0.75), 0.0, 0.0, 0};
    const double iqr = b.q3 - b.q1;
    b.lo = b.q1;
    b.hi = b.q3;
    for (double x : v) {
        if (x < b.q1 - 1.5 * iqr || x > b.q3 + 1.5 * iqr) {
            ++b.n_out;
        } else {
            b.lo = std::min(b.lo, x);
            b.hi = std::max(b.hi, x);
        }
    }
    return b;
}

std::vector<cplx> qpsk_with_noise(std::size_t n, double snr_db, std::uint32_t seed, std::vector<cplx>& clean) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0)));
    clean = qpsk_modulate(lfsr_generate(17, 0x12000, 1 + seed, 2 * n));
    std::vector<cplx> y(clean);
    for (auto& v : y) v += cplx(g(rng), g(rng));
    return y;
}

}  // namespace

TEST_CASE("ber: counting") {
    const Payload a = lfsr_generate(9, 0x110, 1, 200);
    std::vector<std::uint8_t> flipped(a.bits()), comp(a.bits());
    flipped[17] ^= 1;
    for (auto& b : comp) b ^= 1;
    CHECK(ber(a, a) == 0.0);
    CHECK(ber(a, Payload(comp)) == 1.0);
    CHECK(ber(a, Payload(flipped)) == doctest::Approx(0.005));
    CHECK(ber(Payload(flipped), a) == ber(a, Payload(flipped)));
    CHECK_THROWS((void)ber(a, lfsr_generate(9, 0x110, 1, 198)));
}

TEST_CASE("digital power: examples") {
    CHECK(digital_power(IQBuffer(std::vector<cplx>(4096, {1.0, 0.0}), 1.0), 512) == std::vector<double>(8, 1.0));
    CHECK(digital_power(IQBuffer(std::vector<cplx>(100), 1.0), 10) == std::vector<double>(10, 0.0));
    const std::vector<cplx> s{{1, 0}, {0, 1}, {1, 1}, {0, 0}};
    CHECK(digital_power(IQBuffer(s, 1.0), 4) == std::vector<double>{1.0});
    // Window larger than the buffer: one partial-window value.
    CHECK(digital_power(IQBuffer(s, 1.0), 100) == std::vector<double>{1.0});
    CHECK_THROWS((void)digital_power(IQBuffer(s, 1.0), 0));
}

TEST_CASE("digital power: direct per-window oracle, exact") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<cplx> x(10'000);
    for (auto& v : x) v = {u(rng), u(rng)};
    const IQBuffer buf(x, 1.0);
    for (std::size_t m : {1u, 7u, 1024u, 2500u}) {
        const auto got = digital_power(buf, m);
        REQUIRE(got.size() == x.size() / m);
        for (std::size_t w = 0; w < got.size(); ++w) {
            double acc = 0.0;
            for (std::size_t i = w * m; i < (w + 1) * m; ++i) acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
            CHECK(got[w] == acc / static_cast<double>(m));
        }
    }
}

TEST_CASE("digital power: phase rotation invariance") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    std::vector<cplx> x(8192), xj(8192), xr(8192);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = {g(rng), g(rng)};
        xj[i] = {-x[i].imag(), x[i].real()};  // exact multiplication by j
        xr[i] = x[i] * std::polar(1.0, 0.731);
    }
    const auto p = digital_power(IQBuffer(x, 1.0));
    CHECK(digital_power(IQBuffer(xj, 1.0)) == p);
    const auto pr = digital_power(IQBuffer(xr, 1.0));
    for (std::size_t w = 0; w < p.size(); ++w) CHECK(pr[w] == doctest::Approx(p[w]).epsilon(1e-13));
}

TEST_CASE("boxplot: small hand examples") {
    const std::vector<double> five{1, 2, 3, 4, 5};
    const auto b = boxplot_stats(five);
    CHECK(b.median == 3.0);
    CHECK(b.q1 == 2.0);
    CHECK(b.q3 == 4.0);
    CHECK(b.outliers.empty());

    const std::vector<double> flat(20, 2.5);
    const auto f = boxplot_stats(flat);
    CHECK(f.q1 == f.q3);
    CHECK(f.lower_whisker == 2.5);
    CHECK(f.upper_whisker == 2.5);
    CHECK(f.outliers.empty());

    std::vector<double> v;
    for (int i = 1; i <= 99; ++i) v.push_back(i);
    v.push_back(1000.0);
    const auto o = boxplot_stats(v);
    // Q1 = 25.75, Q3 = 75.25, upper fence 149.5.
    REQUIRE(o.outliers.size() == 1);
    CHECK(o.outliers[0] == 1000.0);
    CHECK(o.upper_whisker == 99.0);

    CHECK_THROWS((void)boxplot_stats(std::vector<double>{1, 2, 3, 4}));
}

TEST_CASE("boxplot: sort-based oracle on random sequences") {
    std::mt19937_64 rng(2026);
    std::uniform_int_distribution<std::size_t> len(5, 10'000);
    std::lognormal_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(len(rng));
        for (auto& x : v) x = val(rng);
        const auto got = boxplot_stats(v);
        const auto want = oracle_box(v);
        CHECK(got.median == doctest::Approx(want.median).epsilon(1e-12));
        CHECK(got.q1 == doctest::Approx(want.q1).epsilon(1e-12));
        CHECK(got.q3 == doctest::Approx(want.q3).epsilon(1e-12));
        CHECK(got.lower_whisker == want.lo);
        CHECK(got.upper_whisker == want.hi);
        CHECK(got.outliers.size() == want.n_out);
        CHECK(got.lower_whisker <= got.q1);
        CHECK(got.q1 <= got.median);
        CHECK(got.median <= got.q3);
        CHECK(got.q3 <= got.upper_whisker);
    }
}

TEST_CASE("snr: data-aided within 0.2 dB on constructed inputs") {
    for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
        std::vector<cplx> clean;
        const auto y = qpsk_with_noise(100'000, snr, static_cast<std::uint32_t>(snr) + 3, clean);
        const auto e = estimate_snr(y, std::span<const cplx>(clean));
        CAPTURE(snr);
        CHECK(e.mode == SnrMode::DataAided);
        CHECK(std::abs(e.db - snr) < 0.2);
    }
}

TEST_CASE("snr: blind estimate, ceiling, self difference, short input") {
    std::vector<cplx> clean;
    const auto y = qpsk_with_noise(100'000, 12.0, 9, clean);
    const auto blind = estimate_snr(y);
    CHECK(blind.mode == SnrMode::BlindM2M4);
    CHECK(std::abs(blind.db - 12.0) < 0.5);

    CHECK(estimate_snr(clean, std::span<const cplx>(clean)).db >= kSnrCeilingDb);
    CHECK(estimate_snr(clean).db >= kSnrCeilingDb);

    const double a = estimate_snr(y, std::span<const cplx>(clean)).db;
    CHECK(std::abs(a - estimate_snr(y, std::span<const cplx>(clean)).db) < 0.05);

    const std::vector<cplx> few(clean.begin(), clean.begin() + 50);
    CHECK_THROWS((void)estimate_snr(few));
}
